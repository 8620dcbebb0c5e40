// SPDX-License-Identifier: Apache-2.0
#include "nids/smote.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <optional>
#include <sstream>

#include "nids/rng.hpp"
#include "text.hpp"

namespace nids {

TargetPolicy TargetPolicy::parse(std::string_view text) {
  const std::string t = detail::to_lower(detail::trim(text));
  TargetPolicy p;
  if (t == "match-majority") return p;
  if (t.starts_with("ratio:")) {
    p.kind = Kind::kRatio;
    const std::string value = t.substr(6);
    char* end = nullptr;
    p.ratio = std::strtod(value.c_str(), &end);
    if (value.empty() || *end != '\0' || !(p.ratio > 0.0) || !std::isfinite(p.ratio)) {
      throw UsageError("bad SMOTE ratio '" + value + "'");
    }
    return p;
  }
  if (t.starts_with("explicit:")) {
    p.kind = Kind::kExplicit;
    for (auto part : detail::split(std::string_view(t).substr(9), ',')) {
      part = detail::trim(part);
      std::size_t n = 0;
      const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), n);
      if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) {
        throw UsageError("bad SMOTE explicit count '" + std::string(part) + "'");
      }
      p.counts.push_back(n);
    }
    return p;
  }
  throw UsageError("unknown SMOTE policy '" + std::string(text) +
                   "' (expected match-majority, ratio:<r> or explicit:<counts>)");
}

std::string TargetPolicy::to_string() const {
  switch (kind) {
    case Kind::kMatchMajority:
      return "match-majority";
    case Kind::kRatio: {
      std::ostringstream os;
      os.precision(17);
      os << "ratio:" << ratio;
      return os.str();
    }
    case Kind::kExplicit: {
      std::string s = "explicit:";
      for (std::size_t i = 0; i < counts.size(); ++i) s += (i ? "," : "") + std::to_string(counts[i]);
      return s;
    }
  }
  return {};
}

std::vector<std::size_t> TargetPolicy::targets(const std::vector<std::size_t>& histogram) const {
  const std::size_t majority = histogram.empty() ? 0 : *std::max_element(histogram.begin(), histogram.end());
  std::vector<std::size_t> out(histogram.size());
  for (std::size_t c = 0; c < histogram.size(); ++c) {
    const std::size_t n = histogram[c];
    switch (kind) {
      case Kind::kMatchMajority:
        out[c] = n > 0 ? majority : 0;
        break;
      case Kind::kRatio:
        out[c] = n > 0 ? std::max(n, static_cast<std::size_t>(std::llround(ratio * static_cast<double>(majority)))) : 0;
        break;
      case Kind::kExplicit:
        if (counts.size() != histogram.size()) {
          throw UsageError("explicit SMOTE policy lists " + std::to_string(counts.size()) + " counts for " +
                           std::to_string(histogram.size()) + " classes");
        }
        if (counts[c] < n) {
          throw UsageError("explicit SMOTE target " + std::to_string(counts[c]) + " for class " + std::to_string(c) +
                           " is below its current count " + std::to_string(n));
        }
        out[c] = counts[c];
        break;
    }
  }
  return out;
}

namespace {

std::vector<std::size_t> nearest(const RowMatrix& points, std::size_t i, std::size_t k) {
  const auto n = static_cast<std::size_t>(points.rows());
  const Eigen::VectorXd dist = (points.rowwise() - points.row(static_cast<Eigen::Index>(i))).rowwise().squaredNorm();
  std::vector<std::pair<double, std::size_t>> order;
  order.reserve(n - 1);
  for (std::size_t j = 0; j < n; ++j) {
    if (j != i) order.emplace_back(dist(static_cast<Eigen::Index>(j)), j);
  }
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end());
  std::vector<std::size_t> out(k);
  for (std::size_t j = 0; j < k; ++j) out[j] = order[j].second;
  return out;
}

std::size_t effective_k(std::size_t n, std::size_t k, std::vector<std::string>& warnings) {
  if (k == 0) throw UsageError("SMOTE k must be at least 1");
  if (n < 2) throw CannotSynthesize("cannot synthesize from a class with " + std::to_string(n) + " point(s)");
  if (k > n - 1) {
    warnings.push_back("SMOTE k=" + std::to_string(k) + " capped at " + std::to_string(n - 1) +
                       " for a class of " + std::to_string(n) + " points");
    return n - 1;
  }
  return k;
}

}  // namespace

NeighborTable knn_minority(const RowMatrix& points, std::size_t k) {
  NeighborTable table;
  const auto n = static_cast<std::size_t>(points.rows());
  table.k = effective_k(n, k, table.warnings);
  table.neighbors.reserve(n);
  for (std::size_t i = 0; i < n; ++i) table.neighbors.push_back(nearest(points, i, table.k));
  return table;
}

Vector interpolate(const Vector& x, const Vector& neighbor, double lambda) {
  return (x.array() + lambda * (neighbor.array() - x.array())).matrix();
}

SmoteResult smote_oversample(const FlowTable& table, const SmoteConfig& config) {
  table.validate();
  if (config.k == 0) throw UsageError("SMOTE k must be at least 1");
  const auto histogram = table.histogram();
  const auto targets = config.policy.targets(histogram);
  const auto num_classes = table.num_classes();

  std::vector<std::vector<std::size_t>> members(num_classes);
  for (std::size_t i = 0; i < table.num_rows(); ++i) members[static_cast<std::size_t>(table.labels[i])].push_back(i);

  std::size_t total = 0;
  for (std::size_t c = 0; c < num_classes; ++c) {
    if (targets[c] > 0 && histogram[c] == 0) {
      throw CannotSynthesize("class " + std::to_string(c) + " has no rows to oversample from");
    }
    total += targets[c];
  }

  SmoteResult result;
  FlowTable& out = result.table;
  out.class_names = table.class_names;
  out.features.resize(static_cast<Eigen::Index>(total), table.features.cols());
  out.features.topRows(table.features.rows()) = table.features;
  out.labels = table.labels;
  out.labels.reserve(total);
  result.synthetic.reserve(total - table.num_rows());

  auto row = static_cast<Eigen::Index>(table.num_rows());
  for (std::size_t c = 0; c < num_classes; ++c) {
    const std::size_t n = histogram[c];
    const std::size_t needed = targets[c] - n;
    if (needed == 0) continue;
    const auto& idx = members[c];
    Rng rng(config.seed, Stream::kSmote, c);

    if (n == 1) {
      result.warnings.push_back("class " + std::to_string(c) + " has a single row; duplicating it " +
                                std::to_string(needed) + " time(s)");
      for (std::size_t j = 0; j < needed; ++j, ++row) {
        out.features.row(row) = table.features.row(static_cast<Eigen::Index>(idx[0]));
        out.labels.push_back(static_cast<ClassId>(c));
        result.synthetic.push_back({idx[0], idx[0], 0.0});
      }
      continue;
    }

    RowMatrix points(static_cast<Eigen::Index>(n), table.features.cols());
    for (std::size_t j = 0; j < n; ++j) {
      points.row(static_cast<Eigen::Index>(j)) = table.features.row(static_cast<Eigen::Index>(idx[j]));
    }
    const std::size_t k = effective_k(n, config.k, result.warnings);
    // Neighbourhoods are computed only for points actually drawn as seeds.
    std::vector<std::optional<std::vector<std::size_t>>> cache(n);

    for (std::size_t j = 0; j < needed; ++j, ++row) {
      const std::size_t s = rng.index(n);
      if (!cache[s]) cache[s] = nearest(points, s, k);
      const std::size_t nn = (*cache[s])[rng.index(k)];
      const double lambda = rng.uniform();
      const auto xs = points.row(static_cast<Eigen::Index>(s));
      const auto xn = points.row(static_cast<Eigen::Index>(nn));
      out.features.row(row) = xs.array() + lambda * (xn.array() - xs.array());
      out.labels.push_back(static_cast<ClassId>(c));
      result.synthetic.push_back({idx[s], idx[nn], lambda});
    }
  }
  return result;
}

}  // namespace nids
