// SPDX-License-Identifier: Apache-2.0
#include "nids/loss.hpp"

#include <cmath>
#include <sstream>

#include "nids/errors.hpp"
#include "text.hpp"

namespace nids {

AlphaSpec AlphaSpec::parse(std::string_view text) {
  const std::string t = detail::to_lower(detail::trim(text));
  AlphaSpec spec;
  if (t == "inverse-frequency") return spec;
  if (t == "uniform") {
    spec.mode = AlphaMode::kUniform;
    return spec;
  }
  if (t.starts_with("explicit:")) {
    spec.mode = AlphaMode::kExplicit;
    for (auto part : detail::split(std::string_view(t).substr(9), ',')) {
      const std::string value(detail::trim(part));
      char* end = nullptr;
      const double a = std::strtod(value.c_str(), &end);
      if (value.empty() || *end != '\0' || !std::isfinite(a) || !(a > 0.0)) {
        throw UsageError("alpha weights must be positive numbers, got '" + value + "'");
      }
      spec.values.push_back(a);
    }
    return spec;
  }
  throw UsageError("unknown alpha mode '" + std::string(text) +
                   "' (expected uniform, inverse-frequency or explicit:<weights>)");
}

std::string AlphaSpec::to_string() const {
  switch (mode) {
    case AlphaMode::kUniform:
      return "uniform";
    case AlphaMode::kInverseFrequency:
      return "inverse-frequency";
    case AlphaMode::kExplicit: {
      std::ostringstream os;
      os.precision(17);
      os << "explicit:";
      for (std::size_t i = 0; i < values.size(); ++i) os << (i ? "," : "") << values[i];
      return os.str();
    }
  }
  return {};
}

Vector resolve_alpha(const AlphaSpec& spec, const std::vector<std::size_t>& histogram) {
  const auto classes = static_cast<Eigen::Index>(histogram.size());
  switch (spec.mode) {
    case AlphaMode::kUniform:
      return Vector::Ones(classes);
    case AlphaMode::kExplicit: {
      if (spec.values.size() != histogram.size()) {
        throw UsageError("explicit alpha has " + std::to_string(spec.values.size()) + " weights for " +
                         std::to_string(histogram.size()) + " classes");
      }
      Vector alpha(classes);
      for (Eigen::Index i = 0; i < classes; ++i) alpha(i) = spec.values[static_cast<std::size_t>(i)];
      return alpha;
    }
    case AlphaMode::kInverseFrequency: {
      double total = 0.0;
      std::size_t present = 0;
      for (std::size_t n : histogram) {
        total += static_cast<double>(n);
        present += n > 0 ? 1 : 0;
      }
      Vector alpha = Vector::Ones(classes);
      if (present == 0) return alpha;
      double sum = 0.0;
      for (Eigen::Index i = 0; i < classes; ++i) {
        const auto n = static_cast<double>(histogram[static_cast<std::size_t>(i)]);
        if (n > 0) {
          alpha(i) = total / (static_cast<double>(classes) * n);
          sum += alpha(i);
        }
      }
      const double mean = sum / static_cast<double>(present);
      for (Eigen::Index i = 0; i < classes; ++i) {
        if (histogram[static_cast<std::size_t>(i)] > 0) alpha(i) /= mean;
      }
      return alpha;
    }
  }
  return Vector::Ones(classes);
}

FocalConfig FocalConfig::cross_entropy(std::size_t num_classes) {
  return {0.0, Vector::Ones(static_cast<Eigen::Index>(num_classes))};
}

namespace {

void check_shapes(const Matrix& probs, const Matrix& targets, const FocalConfig& config) {
  if (probs.rows() != targets.rows() || probs.cols() != targets.cols()) {
    throw DataError("probabilities are " + std::to_string(probs.rows()) + "x" + std::to_string(probs.cols()) +
                    " but targets are " + std::to_string(targets.rows()) + "x" + std::to_string(targets.cols()));
  }
  if (config.alpha.size() != probs.cols()) {
    throw DataError("alpha has " + std::to_string(config.alpha.size()) + " weights for " +
                    std::to_string(probs.cols()) + " classes");
  }
  if (probs.rows() == 0) throw DataError("loss over an empty batch");
  if (config.gamma < 0.0) throw UsageError("focal gamma must be non-negative");
}

}  // namespace

double cfcl(const Matrix& probs, const Matrix& targets, const FocalConfig& config) {
  check_shapes(probs, targets, config);
  double total = 0.0;
  for (Eigen::Index b = 0; b < probs.rows(); ++b) {
    for (Eigen::Index i = 0; i < probs.cols(); ++i) {
      const double y = targets(b, i);
      if (y == 0.0) continue;
      const double p = probs(b, i);
      const double modulating = config.gamma == 0.0 ? 1.0 : std::pow(1.0 - p, config.gamma);
      total -= y * config.alpha(i) * modulating * std::log(std::max(p, kProbabilityFloor));
    }
  }
  return total / static_cast<double>(probs.rows());
}

Matrix cfcl_grad_logits(const Matrix& probs, const Matrix& targets, const FocalConfig& config) {
  check_shapes(probs, targets, config);
  const double inv_batch = 1.0 / static_cast<double>(probs.rows());
  Matrix grad(probs.rows(), probs.cols());
  for (Eigen::Index b = 0; b < probs.rows(); ++b) {
    // w_i = -y_i * p_i * d(loss_i)/d(p_i); then dL/dz_j = p_j * sum(w) - w_j.
    double w_sum = 0.0;
    Eigen::VectorXd w = Eigen::VectorXd::Zero(probs.cols());
    for (Eigen::Index i = 0; i < probs.cols(); ++i) {
      const double y = targets(b, i);
      if (y == 0.0) continue;
      const double p = probs(b, i);
      const double q = 1.0 - p;
      const double log_p = std::log(std::max(p, kProbabilityFloor));
      const double modulating = config.gamma == 0.0 ? 1.0 : std::pow(q, config.gamma);
      const double direct = p >= kProbabilityFloor ? modulating : 0.0;
      const double focal = (config.gamma == 0.0 || q == 0.0)
                               ? 0.0
                               : config.gamma * p * std::pow(q, config.gamma - 1.0) * log_p;
      w(i) = y * config.alpha(i) * (direct - focal);
      w_sum += w(i);
    }
    for (Eigen::Index j = 0; j < probs.cols(); ++j) grad(b, j) = (probs(b, j) * w_sum - w(j)) * inv_batch;
  }
  return grad;
}

double categorical_ce(const Matrix& probs, const Matrix& targets) {
  return cfcl(probs, targets, FocalConfig::cross_entropy(static_cast<std::size_t>(probs.cols())));
}

}  // namespace nids
