// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nids/errors.hpp"
#include "nids/features.hpp"

namespace nids {

/// Raised when a class is too small to interpolate from.
class CannotSynthesize : public DataError {
 public:
  using DataError::DataError;
};

/// How many rows each class should have after oversampling.
struct TargetPolicy {
  enum class Kind { kMatchMajority, kRatio, kExplicit };

  Kind kind = Kind::kMatchMajority;
  double ratio = 1.0;               // kRatio: fraction of the majority count
  std::vector<std::size_t> counts;  // kExplicit: one target per class

  /// "match-majority", "ratio:<r>" or "explicit:<n0>,<n1>,...".
  static TargetPolicy parse(std::string_view text);
  std::string to_string() const;

  /// Per-class targets for the given histogram. Absent classes stay absent
  /// under the majority and ratio policies. Throws UsageError when an
  /// explicit target is below the current count.
  std::vector<std::size_t> targets(const std::vector<std::size_t>& histogram) const;
};

struct SmoteConfig {
  std::size_t k = 5;
  TargetPolicy policy;
  std::uint64_t seed = 0;
};

struct NeighborTable {
  std::size_t k = 0;  // effective k after capping
  std::vector<std::vector<std::size_t>> neighbors;
  std::vector<std::string> warnings;
};

/// k nearest neighbours of every point among the other points (squared
/// Euclidean distance, ties to the lower index). k is capped at n - 1 with a
/// warning; a single point throws CannotSynthesize.
NeighborTable knn_minority(const RowMatrix& points, std::size_t k);

/// x + lambda * (neighbor - x), componentwise.
Vector interpolate(const Vector& x, const Vector& neighbor, double lambda);

/// Provenance of one synthetic row; indices refer to rows of the input table.
struct SyntheticRecord {
  std::size_t seed_row = 0;
  std::size_t neighbor_row = 0;
  double lambda = 0.0;
};

struct SmoteResult {
  /// Original rows first and unchanged, then synthetics grouped by class id.
  FlowTable table;
  /// synthetic[i] describes output row (input rows + i).
  std::vector<SyntheticRecord> synthetic;
  std::vector<std::string> warnings;
};

/// Synthetic minority oversampling in the (standardized) flat feature space.
///
/// For each class needing m more rows, m times: pick a uniformly random class
/// member x, a uniformly random member x_nn of its k-neighbourhood and
/// lambda ~ U[0, 1), and append x + lambda * (x_nn - x). Every class draws
/// from its own RNG stream keyed by (seed, class id). A class with a single
/// row is duplicated with a warning.
SmoteResult smote_oversample(const FlowTable& table, const SmoteConfig& config);

}  // namespace nids
