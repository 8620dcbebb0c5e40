// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "nids/csv.hpp"
#include "nids/types.hpp"

namespace nids {

/// Cleaned numeric features with integer class labels.
struct FlowTable {
  RowMatrix features;
  std::vector<ClassId> labels;
  std::vector<std::string> class_names;

  std::size_t num_rows() const { return labels.size(); }
  std::size_t num_features() const { return static_cast<std::size_t>(features.cols()); }
  std::size_t num_classes() const { return class_names.size(); }

  /// Per-class row counts, length num_classes().
  std::vector<std::size_t> histogram() const;
  FlowTable select(std::span<const std::size_t> rows) const;
  /// Throws DataError on non-finite features, out-of-range labels or a
  /// row-count mismatch.
  void validate() const;
};

/// One-hot expansion of categorical columns with a vocabulary fitted on
/// training rows. Unseen values encode to an all-zero block.
class CategoricalEncoder {
 public:
  struct Column {
    std::size_t index = 0;  // position in the raw schema
    std::vector<std::string> vocabulary;  // first-seen order

    bool operator==(const Column&) const = default;
  };

  CategoricalEncoder() = default;
  explicit CategoricalEncoder(std::vector<Column> columns) : columns_(std::move(columns)) {}

  static CategoricalEncoder fit(const RawTable& train);

  /// Dense matrix with categorical columns replaced in place by their blocks.
  /// Numeric fields must already be finite (see clean()).
  RowMatrix transform(const RawTable& rows) const;
  /// Feature names after expansion, e.g. "protocol_type=tcp".
  std::vector<std::string> feature_names(const Schema& schema) const;
  std::size_t output_width(const Schema& schema) const;

  const std::vector<Column>& columns() const { return columns_; }
  bool operator==(const CategoricalEncoder&) const = default;

 private:
  std::vector<Column> columns_;
};

/// Per-column affine standardization (population standard deviation).
struct Standardizer {
  static constexpr double kStdGuard = 1e-12;

  std::vector<double> means;
  std::vector<double> stds;  // always > 0 after the guard

  /// Throws DataError on an empty matrix.
  static Standardizer fit(const RowMatrix& train);
  RowMatrix apply(const RowMatrix& features) const;
  void apply_in_place(RowMatrix& features) const;

  bool operator==(const Standardizer&) const = default;
};

/// Rows = records, columns = classes, one 1 per row. Throws DataError for a
/// label outside [0, num_classes).
Matrix one_hot(std::span<const ClassId> labels, std::size_t num_classes);

struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
  std::vector<std::string> warnings;
};

/// Stratified split: each class with n >= 2 rows sends round(fraction * n)
/// rows to test, clamped to [1, n - 1]; classes with fewer than 2 rows stay in
/// train with a warning. Both index lists are ascending. Throws UsageError
/// unless 0 < fraction < 1.
SplitIndices stratified_split(std::span<const ClassId> labels, std::size_t num_classes, double test_fraction,
                              std::uint64_t seed);

/// Stratified subsample of about `rows` records, ascending. Each class keeps a
/// share proportional to its size (largest remainders fill the budget) but
/// never fewer than min(n_c, min_per_class) rows, so the result may slightly
/// exceed `rows` when tiny classes are topped up. Returns every index when
/// rows >= labels.size().
std::vector<std::size_t> stratified_sample(std::span<const ClassId> labels, std::size_t num_classes,
                                           std::size_t rows, std::uint64_t seed, std::size_t min_per_class = 50);

std::pair<FlowTable, FlowTable> split(const FlowTable& table, double test_fraction, std::uint64_t seed);

/// Fixed-length sequences built from flat records.
///
/// Row i holds record i zero-padded to steps * width values, where
/// width = ceil(F / steps); timestep t is columns [t * width, (t + 1) * width).
struct SequenceSet {
  RowMatrix data;
  std::vector<ClassId> labels;
  std::size_t steps = 1;
  std::size_t width = 0;
  std::size_t original_width = 0;

  std::size_t size() const { return labels.size(); }
  /// Inverse of windowize: the original F features of every record.
  RowMatrix flatten() const;
};

SequenceSet windowize(const FlowTable& table, std::size_t steps);

}  // namespace nids
