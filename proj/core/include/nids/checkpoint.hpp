// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nids/binary_io.hpp"
#include "nids/dataset.hpp"
#include "nids/network.hpp"
#include "nids/optim.hpp"
#include "nids/run_config.hpp"

namespace nids {

struct EpochRecord {
  double loss = 0.0;      // mean training loss over the epoch
  double accuracy = 0.0;  // training accuracy (dropout active)
  std::optional<double> holdout_loss;
  std::optional<double> holdout_accuracy;

  bool operator==(const EpochRecord&) const = default;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;

  /// Columns epoch,loss,accuracy plus holdout_loss,holdout_accuracy when any
  /// epoch carries them.
  std::string to_csv() const;
  bool operator==(const TrainHistory&) const = default;
};


/// A trained model with the preprocessing it expects and the configuration
/// that produced it.
///
/// Layout: magic "NIDSCKPT", version byte, model config, the ten tensors as
/// (name, shape, row-major payload), preprocessor, run config text, training
/// history, then an optional Adam block (constants, step, moments).
struct Checkpoint {
  Model model;
  Preprocessor preprocessor;
  RunConfig config;
  TrainHistory history;
  std::optional<AdamState> adam;  // present for resumable checkpoints

  void write(BinaryWriter& out) const;
  std::vector<std::uint8_t> serialize() const;
  void save(const std::filesystem::path& path) const;
  static Checkpoint deserialize(BinaryReader& in);
  static Checkpoint load(const std::filesystem::path& path);
};

inline constexpr char kCheckpointMagic[] = "NIDSCKPT";
inline constexpr std::uint8_t kCheckpointVersion = 1;

/// Human-readable summary of a dataset container or checkpoint. Throws
/// DataError for anything else or for a damaged file.
std::string inspect_file(const std::filesystem::path& path);

}  // namespace nids
