// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "uaai/learnkit/network.hpp"

namespace uaai::learnkit {

using DoubleParamSet = BasicParamSet<double>;

/// Scalar loss of a network output; writes d loss / d output into `grad`
/// when it is non-null.
using OutputLoss = std::function<double(const numkit::NumArray& output, numkit::NumArray* grad)>;

/// Loss of an arbitrary differentiable computation. When `grads` is non-null
/// it must be filled with analytic gradients for every key of `params`.
using Objective = std::function<double(const DoubleParamSet& params, DoubleParamSet* grads)>;

/// |a - n| / max(|a|, |n|, 1e-6).
double relative_error(double analytic, double numeric);

/// Central differences on every parameter of `params` against the analytic
/// gradients reported by `objective`; returns the worst relative error.
/// The objective must be deterministic (freeze dropout masks by replaying a
/// copied RngStream). `epsilon` must lie in [1e-7, 1e-3].
double grad_check(const DoubleParamSet& params, const Objective& objective, double epsilon);

/// Sequential-network convenience: promotes `params` to double, runs a
/// train-mode forward whose dropout masks are frozen by `mask_seed`, and
/// checks every parameter.
double grad_check(const std::vector<LayerSpec>& net, const ParamSet& params, const numkit::NumArray& input,
                  const OutputLoss& loss, double epsilon, std::uint64_t mask_seed = 0);

}  // namespace uaai::learnkit
