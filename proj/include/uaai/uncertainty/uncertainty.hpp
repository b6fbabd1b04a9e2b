// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "uaai/learnkit/network.hpp"
#include "uaai/numkit/categorical.hpp"
#include "uaai/numkit/rng.hpp"

namespace uaai::uncertainty {

using numkit::Categorical;

struct MCConfig {
  std::size_t passes = 5;
  double dropout_rate = 0.3;

  void validate() const;
};

struct UncertaintyScore {
  /// max over per_class_variance.
  double u = 0.0;
  std::vector<double> per_class_variance;
};

enum class WeightRule { exp_beta, one_minus_u };

std::string to_string(WeightRule rule);
WeightRule weight_rule_from_string(const std::string& name);

struct SampleWeight {
  double w = 1.0;
  double source_u = 0.0;
};

/// One stochastic (dropout-active) prediction; the stream is owned by the pass.
using StochasticPass = std::function<Categorical(numkit::RngStream& rng)>;

/// Population (divide-by-T) variance of each class probability across the
/// passes, and its maximum.
UncertaintyScore score_from_passes(std::span<const Categorical> passes);

/// Runs cfg.passes stochastic passes, pass t drawing from rng.child(t).
UncertaintyScore mc_uncertainty(const StochasticPass& pass, const MCConfig& cfg, const numkit::RngStream& rng);

/// Sequential-network form: train-mode forwards of `input` (a single sample,
/// batch axis 1) followed by a softmax over the output logits.
UncertaintyScore mc_uncertainty(const std::vector<learnkit::LayerSpec>& net, const learnkit::ParamSet& params,
                                const numkit::FloatArray& input, const MCConfig& cfg, const numkit::RngStream& rng);

/// exp_beta: w = exp(-alpha u) + beta. one_minus_u: w = 1 - u.
/// Throws InvalidInput for u outside [0, 0.25], alpha < 0 or beta <= 0.
SampleWeight weight_from_uncertainty(double u, double alpha, double beta, WeightRule rule = WeightRule::exp_beta);

}  // namespace uaai::uncertainty
