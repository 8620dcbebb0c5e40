// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "nids/network.hpp"

namespace nids {

struct AdamConfig {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  /// Throws UsageError unless lr, eps > 0 and both betas lie in (0, 1).
  void validate() const;
  bool operator==(const AdamConfig&) const = default;
};

/// First and second moments for every parameter tensor, flattened in
/// kTensorNames order.
struct AdamState {
  AdamConfig config;
  std::uint64_t step = 0;
  std::array<std::vector<double>, kNumTensors> m;
  std::array<std::vector<double>, kNumTensors> v;

  static AdamState for_model(const Model& model, const AdamConfig& config);
};

/// One Adam update with bias correction, epsilon outside the square root:
///   theta -= lr * m_hat / (sqrt(v_hat) + eps).
/// Throws NumericError on a non-finite gradient and DataError on a shape
/// mismatch between the parameters, gradients and state.
void adam_step(LstmParams& lstm, DenseParams& dense, const Gradients& grads, AdamState& state);
inline void adam_step(Model& model, const Gradients& grads, AdamState& state) {
  adam_step(model.lstm, model.dense, grads, state);
}

/// Rescales `grads` so their global L2 norm is at most `max_norm`. Returns the
/// norm before clipping.
double clip_global_norm(Gradients& grads, double max_norm);

}  // namespace nids
