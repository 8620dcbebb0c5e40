// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace nids {

enum class DatasetKind : std::uint8_t { kKdd99 = 0, kCicids2017 = 1, kGeneric = 2 };

std::string_view to_string(DatasetKind kind);
/// Accepts "kdd99", "cicids2017", "generic" (case-insensitive); throws UsageError.
DatasetKind parse_dataset_kind(std::string_view text);

/// Column layout of a raw flow CSV.
///
/// KDD99 files carry no header and a fixed 41-feature layout. CICIDS2017 and
/// GENERIC files are headered; their feature names stay empty until a header
/// has been read (see resolve_header).
struct Schema {
  DatasetKind kind = DatasetKind::kGeneric;
  std::vector<std::string> feature_names;
  std::set<std::size_t> categorical_indices;
  std::string label_column = "label";
  /// GENERIC only: categorical columns by name, resolved against the header.
  std::vector<std::string> categorical_names;

  bool has_header() const { return kind != DatasetKind::kKdd99; }
  bool resolved() const { return !feature_names.empty(); }
  bool is_categorical(std::size_t column) const { return categorical_indices.contains(column); }

  /// Binds a header row. Returns the position of the label column within
  /// `header`. Throws DataError naming the first offending column.
  std::size_t resolve_header(const std::vector<std::string>& header);

  /// Throws DataError if the invariants do not hold.
  void validate() const;
  bool operator==(const Schema&) const = default;
};

inline constexpr std::size_t kKdd99FeatureCount = 41;
inline constexpr std::size_t kCicids2017FeatureCount = 78;

Schema kdd99_schema();
Schema cicids2017_schema();
Schema generic_schema(std::string label_column, std::vector<std::string> categorical_names = {});

}  // namespace nids
