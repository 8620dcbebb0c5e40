// SPDX-License-Identifier: Apache-2.0
#include "nids/optim.hpp"

#include <cmath>

#include "nids/errors.hpp"

namespace nids {

void AdamConfig::validate() const {
  if (!(lr > 0.0) || !(eps > 0.0)) throw UsageError("Adam lr and eps must be positive");
  if (!(beta1 > 0.0 && beta1 < 1.0) || !(beta2 > 0.0 && beta2 < 1.0)) {
    throw UsageError("Adam beta1 and beta2 must lie in (0, 1)");
  }
}

AdamState AdamState::for_model(const Model& model, const AdamConfig& config) {
  config.validate();
  AdamState state;
  state.config = config;
  const auto views = tensor_views(model.lstm, model.dense);
  for (std::size_t k = 0; k < kNumTensors; ++k) {
    state.m[k].assign(views[k].size(), 0.0);
    state.v[k].assign(views[k].size(), 0.0);
  }
  return state;
}

void adam_step(LstmParams& lstm, DenseParams& dense, const Gradients& grads, AdamState& state) {
  const auto params = tensor_views(lstm, dense);
  const auto g = tensor_views(grads.lstm, grads.dense);
  for (std::size_t k = 0; k < kNumTensors; ++k) {
    if (params[k].size() != g[k].size() || state.m[k].size() != g[k].size() || state.v[k].size() != g[k].size()) {
      throw DataError("Adam shape mismatch in tensor " + std::string(kTensorNames[k]));
    }
    for (double x : g[k]) {
      if (!std::isfinite(x)) throw NumericError("non-finite gradient in " + std::string(kTensorNames[k]));
    }
  }

  const AdamConfig& c = state.config;
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double bias1 = 1.0 - std::pow(c.beta1, t);
  const double bias2 = 1.0 - std::pow(c.beta2, t);
  for (std::size_t k = 0; k < kNumTensors; ++k) {
    auto& m = state.m[k];
    auto& v = state.v[k];
    for (std::size_t i = 0; i < g[k].size(); ++i) {
      const double gi = g[k][i];
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * gi;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * gi * gi;
      const double m_hat = m[i] / bias1;
      const double v_hat = v[i] / bias2;
      params[k][i] -= c.lr * m_hat / (std::sqrt(v_hat) + c.eps);
    }
  }
}

double clip_global_norm(Gradients& grads, double max_norm) {
  const double norm = std::sqrt(grads.squared_norm());
  if (!std::isfinite(norm)) throw NumericError("non-finite gradient norm");
  if (max_norm > 0.0 && norm > max_norm) grads.scale(max_norm / norm);
  return norm;
}

}  // namespace nids
