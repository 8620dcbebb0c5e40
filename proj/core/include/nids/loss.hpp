// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "nids/types.hpp"

namespace nids {

inline constexpr double kProbabilityFloor = 1e-12;

enum class AlphaMode { kUniform, kInverseFrequency, kExplicit };

/// Unresolved class-weight choice as given on the command line.
struct AlphaSpec {
  AlphaMode mode = AlphaMode::kInverseFrequency;
  std::vector<double> values;  // kExplicit only

  /// "uniform", "inverse-frequency" or "explicit:<a0>,<a1>,...".
  static AlphaSpec parse(std::string_view text);
  std::string to_string() const;
};

/// Resolves class weights against a training histogram.
///
/// Inverse frequency gives alpha_i = N / (C * N_i), rescaled so the weights
/// of present classes average to 1; classes absent from the histogram get 1.
/// Throws UsageError for a wrong-length or non-positive explicit vector.
Vector resolve_alpha(const AlphaSpec& spec, const std::vector<std::size_t>& histogram);

struct FocalConfig {
  double gamma = 2.0;
  Vector alpha;  // resolved, one positive weight per class

  static FocalConfig cross_entropy(std::size_t num_classes);
};

/// Categorical focal cross-entropy, batch mean of
///   -sum_i y_i * alpha_i * (1 - p_i)^gamma * log(max(p_i, 1e-12)).
/// probs and targets are batch x classes; throws DataError on shape mismatch.
double cfcl(const Matrix& probs, const Matrix& targets, const FocalConfig& config);

/// Gradient of cfcl(softmax(z)) with respect to the logits z, batch x
/// classes, including the 1/batch of the mean. For gamma = 0 and unit alpha
/// this is (probs - targets) / batch.
Matrix cfcl_grad_logits(const Matrix& probs, const Matrix& targets, const FocalConfig& config);

/// cfcl with gamma = 0 and unit weights.
double categorical_ce(const Matrix& probs, const Matrix& targets);

}  // namespace nids
