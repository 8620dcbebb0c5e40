// SPDX-License-Identifier: Apache-2.0
#include "nids/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "nids/errors.hpp"
#include "text.hpp"

namespace nids {

void RawTable::add_row(std::span<const std::string_view> features, std::string_view label) {
  std::string joined;
  std::size_t total = features.size();
  for (auto f : features) total += f.size();
  joined.reserve(total);
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i > 0) joined.push_back(kSeparator);
    joined.append(features[i]);
  }
  rows_.push_back(std::move(joined));
  labels_.emplace_back(label);
}

std::vector<std::string_view> RawTable::fields(std::size_t r) const { return detail::split(rows_[r], kSeparator); }

void RawTable::set_field(std::size_t r, std::size_t c, std::string_view value) {
  const auto parts = fields(r);
  if (c >= parts.size()) throw DataError("field index " + std::to_string(c) + " out of range");
  std::string joined;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) joined.push_back(kSeparator);
    joined.append(i == c ? value : parts[i]);
  }
  rows_[r] = std::move(joined);
}

RawTable RawTable::select(std::span<const std::size_t> rows) const {
  RawTable out(schema_);
  out.rows_.reserve(rows.size());
  out.labels_.reserve(rows.size());
  for (std::size_t r : rows) {
    out.rows_.push_back(rows_.at(r));
    out.labels_.push_back(labels_.at(r));
  }
  return out;
}

void RawTable::append(const RawTable& other) {
  if (schema_.kind != other.schema_.kind) throw DataError("cannot merge tables of different dataset kinds");
  const auto& a = schema_.feature_names;
  const auto& b = other.schema_.feature_names;
  for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
    const std::string lhs = i < a.size() ? a[i] : "<missing>";
    const std::string rhs = i < b.size() ? b[i] : "<missing>";
    if (lhs != rhs) {
      throw DataError("cannot merge tables: column " + std::to_string(i) + " is '" + rhs + "', expected '" + lhs + "'");
    }
  }
  rows_.insert(rows_.end(), other.rows_.begin(), other.rows_.end());
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
  skipped += other.skipped;
}

namespace {

// Splits one CSV line. Quoted fields are unquoted into `storage`; the returned
// views point either into `line` or into `storage`.
void split_csv_line(std::string_view line, std::vector<std::string_view>& out, std::vector<std::string>& storage) {
  out.clear();
  storage.clear();
  if (line.find('"') == std::string_view::npos) {
    std::size_t start = 0;
    for (;;) {
      const std::size_t end = line.find(',', start);
      if (end == std::string_view::npos) {
        out.push_back(line.substr(start));
        return;
      }
      out.push_back(line.substr(start, end - start));
      start = end + 1;
    }
  }
  // Slow path; storage must not reallocate while views into it are live, so
  // collect owned strings first and take views at the end.
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        current.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  fields.push_back(std::move(current));
  storage = std::move(fields);
  for (const auto& f : storage) out.emplace_back(f);
}

}  // namespace

RawTable parse_csv_text(std::string_view text, const Schema& schema_in) {
  Schema schema = schema_in;
  std::vector<std::string_view> fields;
  std::vector<std::string> storage;
  std::vector<std::string_view> features;

  std::size_t pos = 0;
  auto next_line = [&](std::string_view& line) {
    while (pos < text.size()) {
      std::size_t end = text.find('\n', pos);
      if (end == std::string_view::npos) end = text.size();
      line = text.substr(pos, end - pos);
      pos = end + 1;
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      if (!detail::trim(line).empty()) return true;
    }
    return false;
  };

  std::string_view line;
  std::size_t label_pos = schema.feature_names.size();
  if (schema.has_header()) {
    if (!next_line(line)) throw DataError("empty input: expected a header row");
    split_csv_line(line, fields, storage);
    std::vector<std::string> header(fields.begin(), fields.end());
    label_pos = schema.resolve_header(header);
  } else {
    schema.validate();
  }

  RawTable table(schema);
  const std::size_t arity = schema.feature_names.size() + 1;
  while (next_line(line)) {
    split_csv_line(line, fields, storage);
    if (fields.size() != arity) {
      ++table.skipped;
      continue;
    }
    features.clear();
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i != label_pos) features.push_back(fields[i]);
    }
    table.add_row(features, detail::trim(fields[label_pos]));
  }
  return table;
}

RawTable parse_csv(const std::filesystem::path& path, const Schema& schema) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_csv_text(buffer.str(), schema);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

bool parse_finite(std::string_view field, double& out) {
  field = detail::trim(field);
  if (!field.empty() && field.front() == '+') field.remove_prefix(1);
  if (field.empty()) return false;
  const char* end = field.data() + field.size();
  const auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

CleanResult clean(const RawTable& rows) {
  const Schema& schema = rows.schema();
  std::vector<std::size_t> keep;
  keep.reserve(rows.num_rows());
  double scratch = 0.0;
  std::map<std::size_t, std::size_t> bad_columns;
  for (std::size_t r = 0; r < rows.num_rows(); ++r) {
    const auto fields = rows.fields(r);
    bool ok = true;
    for (std::size_t c = 0; c < fields.size() && ok; ++c) {
      if (!schema.is_categorical(c)) ok = parse_finite(fields[c], scratch);
      if (!ok) ++bad_columns[c];
    }
    if (ok) keep.push_back(r);
  }
  CleanResult result{rows.select(keep), rows.num_rows() - keep.size(), {}};
  for (const auto& [column, count] : bad_columns) {
    result.drops_by_column.emplace_back(schema.feature_names[column], count);
  }
  result.table.skipped = rows.skipped;
  return result;
}

}  // namespace nids
