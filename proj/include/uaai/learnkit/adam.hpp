// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "uaai/learnkit/param_set.hpp"

namespace uaai::learnkit {

struct AdamConfig {
  double learning_rate = 3e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

class AdamState {
 public:
  explicit AdamState(AdamConfig config = {}) : config_(config) {}

  const AdamConfig& config() const { return config_; }
  std::uint64_t step() const { return step_; }

 private:
  friend void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state);

  AdamConfig config_;
  std::uint64_t step_ = 0;
  BasicParamSet<double> first_moment_;
  BasicParamSet<double> second_moment_;
};

/// Bias-corrected Adam update. Moments are kept in double; parameters stay float.
/// Throws ShapeError when `grads` does not mirror `params`.
void adam_step(ParamSet& params, const ParamSet& grads, AdamState& state);

}  // namespace uaai::learnkit
