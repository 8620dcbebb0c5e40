// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nids/schema.hpp"

namespace nids {

/// Parsed but still textual flow records in schema column order.
///
/// Each row's feature fields are kept in one string joined by the ASCII unit
/// separator, so a multi-million-row CICIDS2017 merge costs roughly its text
/// size rather than one std::string per cell.
class RawTable {
 public:
  static constexpr char kSeparator = '\x1f';

  RawTable() = default;
  explicit RawTable(Schema schema) : schema_(std::move(schema)) {}

  const Schema& schema() const { return schema_; }
  std::size_t num_rows() const { return rows_.size(); }
  std::size_t num_features() const { return schema_.feature_names.size(); }

  void add_row(std::span<const std::string_view> features, std::string_view label);
  /// Splits row `r` into its feature fields (views into the table).
  std::vector<std::string_view> fields(std::size_t r) const;
  const std::string& label(std::size_t r) const { return labels_[r]; }
  std::span<const std::string> labels() const { return labels_; }
  std::string& mutable_label(std::size_t r) { return labels_[r]; }
  /// Overwrites one field; used by tests that tamper with rows.
  void set_field(std::size_t r, std::size_t c, std::string_view value);

  RawTable select(std::span<const std::size_t> rows) const;
  /// Appends another table whose schema must match. Throws DataError naming
  /// the first differing column.
  void append(const RawTable& other);

  /// Malformed rows (wrong arity) skipped while parsing.
  std::size_t skipped = 0;

 private:
  Schema schema_;
  std::vector<std::string> rows_;
  std::vector<std::string> labels_;
};

/// Reads a flow CSV. Rows with the wrong number of fields are skipped and
/// counted; a missing file or a header that does not match the schema throws
/// DataError. Double-quoted fields are unquoted.
RawTable parse_csv(const std::filesystem::path& path, const Schema& schema);
RawTable parse_csv_text(std::string_view text, const Schema& schema);

/// Parses one numeric field. Empty, unparsable, NaN and infinite values all
/// return false.
bool parse_finite(std::string_view field, double& out);

struct CleanResult {
  RawTable table;
  std::size_t dropped = 0;
  /// (column name, rows dropped because of it), in column order. A row is
  /// charged to its first bad column.
  std::vector<std::pair<std::string, std::size_t>> drops_by_column;
};

/// Drops every row whose numeric (non-categorical) fields contain NaN, ±Inf
/// or unparsable text.
CleanResult clean(const RawTable& rows);

}  // namespace nids
