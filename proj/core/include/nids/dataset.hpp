// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nids/binary_io.hpp"
#include "nids/features.hpp"
#include "nids/label_map.hpp"

namespace nids {

/// Everything fitted on the training split that is needed to turn raw CSV
/// rows into model inputs.
struct Preprocessor {
  Schema schema;
  CategoricalEncoder encoder;
  Standardizer standardizer;
  std::vector<std::string> class_names;
  std::vector<std::string> feature_names;  // after categorical expansion

  /// Encodes, maps labels and standardizes `rows` (already cleaned).
  FlowTable transform(const RawTable& rows, const LabelMap& labels) const;

  void write(BinaryWriter& out) const;
  static Preprocessor read(BinaryReader& in);
  bool operator==(const Preprocessor&) const = default;
};

/// A standardized FlowTable together with the preprocessor that produced it.
struct Dataset {
  Preprocessor preprocessor;
  FlowTable table;

  /// Container layout: magic "NIDSDATA", version byte, preprocessor,
  /// f64 feature matrix (row-major), i32 labels.
  void save(const std::filesystem::path& path) const;
  static Dataset load(const std::filesystem::path& path);
  void write(BinaryWriter& out) const;
  std::vector<std::uint8_t> serialize() const;
  static Dataset deserialize(BinaryReader& in);
};

inline constexpr char kDatasetMagic[] = "NIDSDATA";
inline constexpr std::uint8_t kDatasetVersion = 1;

struct PrepareOptions {
  bool split = true;
  double test_fraction = 0.2;
  std::uint64_t seed = 0;
};

struct PreparedData {
  Dataset train;
  std::optional<Dataset> test;
  std::vector<std::string> warnings;
};

/// Cleaned rows -> labelled, encoded, standardized train (and test) sets.
/// The split is drawn first; the encoder vocabulary and the standardizer are
/// fitted on training rows only.
PreparedData prepare(const RawTable& cleaned, const LabelMap& labels, const PrepareOptions& options);

}  // namespace nids
