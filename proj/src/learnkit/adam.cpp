// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/learnkit/adam.hpp"

#include <cmath>

namespace uaai::learnkit {

void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state) {
  for (const auto& [key, p] : params.tensors()) {
    if (!grads.contains(key) || grads.at(key).shape() != p.shape()) {
      throw ShapeError("adam: gradient for '" + key + "' missing or mis-shaped");
    }
  }
  if (state.step_ == 0) {
    state.first_moment_ = params.cast<double>().zeros_like();
    state.second_moment_ = params.cast<double>().zeros_like();
  }
  const auto& cfg = state.config_;
  ++state.step_;
  const double t = static_cast<double>(state.step_);
  const double correction1 = 1.0 - std::pow(cfg.beta1, t);
  const double correction2 = 1.0 - std::pow(cfg.beta2, t);

  for (auto& [key, p] : params.mutable_tensors()) {
    const auto& g = grads.at(key);
    auto& m = state.first_moment_.mutable_at(key);
    auto& v = state.second_moment_.mutable_at(key);
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double gi = g[i];
      m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * gi;
      v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * gi * gi;
      const double m_hat = m[i] / correction1;
      const double v_hat = v[i] / correction2;
      p[i] = static_cast<float>(p[i] - cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon));
    }
  }
}

}  // namespace uaai::learnkit
