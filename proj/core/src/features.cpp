// SPDX-License-Identifier: Apache-2.0
#include "nids/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "nids/errors.hpp"
#include "nids/rng.hpp"

namespace nids {

std::vector<std::size_t> FlowTable::histogram() const {
  std::vector<std::size_t> counts(num_classes(), 0);
  for (ClassId y : labels) ++counts.at(static_cast<std::size_t>(y));
  return counts;
}

FlowTable FlowTable::select(std::span<const std::size_t> rows) const {
  FlowTable out;
  out.class_names = class_names;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), features.cols());
  out.labels.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.features.row(static_cast<Eigen::Index>(i)) = features.row(static_cast<Eigen::Index>(rows[i]));
    out.labels.push_back(labels[rows[i]]);
  }
  return out;
}

void FlowTable::validate() const {
  if (static_cast<std::size_t>(features.rows()) != labels.size()) {
    throw DataError("feature rows (" + std::to_string(features.rows()) + ") != labels (" +
                    std::to_string(labels.size()) + ")");
  }
  if (!features.allFinite()) throw DataError("feature matrix contains non-finite values");
  for (ClassId y : labels) {
    if (y < 0 || static_cast<std::size_t>(y) >= class_names.size()) {
      throw DataError("label " + std::to_string(y) + " outside [0, " + std::to_string(class_names.size()) + ")");
    }
  }
}

CategoricalEncoder CategoricalEncoder::fit(const RawTable& train) {
  const Schema& schema = train.schema();
  std::vector<Column> columns;
  std::vector<std::unordered_map<std::string, std::size_t>> seen;
  for (std::size_t idx : schema.categorical_indices) {
    columns.push_back({idx, {}});
    seen.emplace_back();
  }
  for (std::size_t r = 0; r < train.num_rows(); ++r) {
    const auto fields = train.fields(r);
    for (std::size_t k = 0; k < columns.size(); ++k) {
      std::string value(fields[columns[k].index]);
      if (seen[k].emplace(value, columns[k].vocabulary.size()).second) {
        columns[k].vocabulary.push_back(std::move(value));
      }
    }
  }
  return CategoricalEncoder(std::move(columns));
}

std::size_t CategoricalEncoder::output_width(const Schema& schema) const {
  std::size_t width = schema.feature_names.size() - columns_.size();
  for (const auto& col : columns_) width += col.vocabulary.size();
  return width;
}

std::vector<std::string> CategoricalEncoder::feature_names(const Schema& schema) const {
  std::vector<std::string> names;
  names.reserve(output_width(schema));
  std::size_t k = 0;
  for (std::size_t c = 0; c < schema.feature_names.size(); ++c) {
    if (k < columns_.size() && columns_[k].index == c) {
      for (const auto& v : columns_[k].vocabulary) names.push_back(schema.feature_names[c] + "=" + v);
      ++k;
    } else {
      names.push_back(schema.feature_names[c]);
    }
  }
  return names;
}

RowMatrix CategoricalEncoder::transform(const RawTable& rows) const {
  const Schema& schema = rows.schema();
  for (const auto& col : columns_) {
    if (!schema.is_categorical(col.index)) {
      throw DataError("encoder column " + std::to_string(col.index) + " is not categorical in this schema");
    }
  }
  if (columns_.size() != schema.categorical_indices.size()) {
    throw DataError("encoder was fitted on a different set of categorical columns");
  }

  // Output offset of each raw column and a lookup per categorical column.
  std::vector<std::size_t> offset(schema.feature_names.size());
  std::vector<const Column*> column_at(schema.feature_names.size(), nullptr);
  std::vector<std::unordered_map<std::string_view, std::size_t>> lookup(columns_.size());
  std::size_t out = 0;
  std::size_t k = 0;
  for (std::size_t c = 0; c < schema.feature_names.size(); ++c) {
    offset[c] = out;
    if (k < columns_.size() && columns_[k].index == c) {
      column_at[c] = &columns_[k];
      for (std::size_t v = 0; v < columns_[k].vocabulary.size(); ++v) lookup[k].emplace(columns_[k].vocabulary[v], v);
      out += columns_[k].vocabulary.size();
      ++k;
    } else {
      ++out;
    }
  }

  RowMatrix matrix = RowMatrix::Zero(static_cast<Eigen::Index>(rows.num_rows()), static_cast<Eigen::Index>(out));
  for (std::size_t r = 0; r < rows.num_rows(); ++r) {
    const auto fields = rows.fields(r);
    const auto row = static_cast<Eigen::Index>(r);
    std::size_t cat = 0;
    for (std::size_t c = 0; c < fields.size(); ++c) {
      if (column_at[c] != nullptr) {
        const auto& map = lookup[cat++];
        if (const auto it = map.find(fields[c]); it != map.end()) {
          matrix(row, static_cast<Eigen::Index>(offset[c] + it->second)) = 1.0;
        }
      } else {
        double value = 0.0;
        if (!parse_finite(fields[c], value)) {
          throw DataError("row " + std::to_string(r) + " column '" + schema.feature_names[c] +
                          "' is not a finite number (run clean() first)");
        }
        matrix(row, static_cast<Eigen::Index>(offset[c])) = value;
      }
    }
  }
  return matrix;
}

Standardizer Standardizer::fit(const RowMatrix& train) {
  if (train.rows() == 0) throw DataError("cannot fit a standardizer on an empty matrix");
  Standardizer s;
  const auto n = static_cast<double>(train.rows());
  s.means.resize(static_cast<std::size_t>(train.cols()));
  s.stds.resize(static_cast<std::size_t>(train.cols()));
  for (Eigen::Index c = 0; c < train.cols(); ++c) {
    const double mean = train.col(c).sum() / n;
    const double var = (train.col(c).array() - mean).square().sum() / n;
    const double std = std::sqrt(var);
    s.means[static_cast<std::size_t>(c)] = mean;
    s.stds[static_cast<std::size_t>(c)] = std < kStdGuard ? 1.0 : std;
  }
  return s;
}

void Standardizer::apply_in_place(RowMatrix& features) const {
  if (static_cast<std::size_t>(features.cols()) != means.size()) {
    throw DataError("standardizer expects " + std::to_string(means.size()) + " columns, got " +
                    std::to_string(features.cols()));
  }
  for (Eigen::Index c = 0; c < features.cols(); ++c) {
    const auto k = static_cast<std::size_t>(c);
    features.col(c) = (features.col(c).array() - means[k]) / stds[k];
  }
}

RowMatrix Standardizer::apply(const RowMatrix& features) const {
  RowMatrix out = features;
  apply_in_place(out);
  return out;
}

Matrix one_hot(std::span<const ClassId> labels, std::size_t num_classes) {
  Matrix out = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), static_cast<Eigen::Index>(num_classes));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const ClassId y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) {
      throw DataError("label " + std::to_string(y) + " outside [0, " + std::to_string(num_classes) + ")");
    }
    out(static_cast<Eigen::Index>(i), y) = 1.0;
  }
  return out;
}

SplitIndices stratified_split(std::span<const ClassId> labels, std::size_t num_classes, double test_fraction,
                              std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test fraction must lie in (0, 1), got " + std::to_string(test_fraction));
  }
  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const ClassId y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) throw DataError("label out of range in split");
    by_class[static_cast<std::size_t>(y)].push_back(i);
  }

  SplitIndices out;
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& rows = by_class[c];
    const std::size_t n = rows.size();
    if (n == 0) continue;
    if (n < 2) {
      out.warnings.push_back("class " + std::to_string(c) + " has " + std::to_string(n) +
                             " row(s); kept entirely in the training split");
      out.train.insert(out.train.end(), rows.begin(), rows.end());
      continue;
    }
    auto k = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    k = std::clamp<std::size_t>(k, 1, n - 1);
    Rng rng(seed, Stream::kSplit, c);
    rng.shuffle(std::span<std::size_t>(rows));
    out.test.insert(out.test.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(k));
    out.train.insert(out.train.end(), rows.begin() + static_cast<std::ptrdiff_t>(k), rows.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<std::size_t> stratified_sample(std::span<const ClassId> labels, std::size_t num_classes,
                                           std::size_t rows, std::uint64_t seed, std::size_t min_per_class) {
  const std::size_t n = labels.size();
  std::vector<std::size_t> out(n);
  std::iota(out.begin(), out.end(), std::size_t{0});
  if (rows >= n) return out;

  std::vector<std::vector<std::size_t>> by_class(num_classes);
  for (std::size_t i = 0; i < n; ++i) {
    const ClassId y = labels[i];
    if (y < 0 || static_cast<std::size_t>(y) >= num_classes) throw DataError("label out of range in sample");
    by_class[static_cast<std::size_t>(y)].push_back(i);
  }
  std::vector<std::size_t> quota(num_classes);
  std::vector<std::pair<double, std::size_t>> remainders;
  std::size_t used = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    const double exact = static_cast<double>(rows) * static_cast<double>(by_class[c].size()) / static_cast<double>(n);
    quota[c] = static_cast<std::size_t>(exact);
    remainders.emplace_back(exact - static_cast<double>(quota[c]), c);
    quota[c] = std::max(quota[c], std::min(by_class[c].size(), min_per_class));
    used += quota[c];
  }
  std::stable_sort(remainders.begin(), remainders.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (const auto& [rem, c] : remainders) {
    if (used >= rows) break;
    if (quota[c] < by_class[c].size()) {
      ++quota[c];
      ++used;
    }
  }

  out.clear();
  for (std::size_t c = 0; c < num_classes; ++c) {
    auto& members = by_class[c];
    Rng(seed, Stream::kSample, c).shuffle(std::span<std::size_t>(members));
    out.insert(out.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(quota[c]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::pair<FlowTable, FlowTable> split(const FlowTable& table, double test_fraction, std::uint64_t seed) {
  const auto idx = stratified_split(table.labels, table.num_classes(), test_fraction, seed);
  return {table.select(idx.train), table.select(idx.test)};
}

SequenceSet windowize(const FlowTable& table, std::size_t steps) {
  if (steps == 0) throw UsageError("sequence length must be at least 1");
  const std::size_t f = table.num_features();
  if (f == 0) throw DataError("cannot windowize a table without features");
  SequenceSet seq;
  seq.steps = steps;
  seq.width = (f + steps - 1) / steps;
  seq.original_width = f;
  seq.labels = table.labels;
  seq.data = RowMatrix::Zero(table.features.rows(), static_cast<Eigen::Index>(steps * seq.width));
  seq.data.leftCols(static_cast<Eigen::Index>(f)) = table.features;
  return seq;
}

RowMatrix SequenceSet::flatten() const { return data.leftCols(static_cast<Eigen::Index>(original_width)); }

}  // namespace nids
