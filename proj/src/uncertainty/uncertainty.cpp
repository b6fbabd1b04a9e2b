// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/uncertainty/uncertainty.hpp"

#include <algorithm>
#include <cmath>

#include "uaai/error.hpp"

namespace uaai::uncertainty {

void MCConfig::validate() const {
  if (passes < 1) throw InvalidConfig("MC passes must be at least 1");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) throw InvalidConfig("MC dropout rate must lie in [0,1)");
}

std::string to_string(WeightRule rule) { return rule == WeightRule::exp_beta ? "exp_beta" : "one_minus_u"; }

WeightRule weight_rule_from_string(const std::string& name) {
  if (name == "exp_beta") return WeightRule::exp_beta;
  if (name == "one_minus_u") return WeightRule::one_minus_u;
  throw InvalidConfig("unknown weight rule '" + name + "'");
}

UncertaintyScore score_from_passes(std::span<const Categorical> passes) {
  if (passes.empty()) throw InvalidInput("uncertainty needs at least one pass");
  const std::size_t k = passes.front().size();
  const double t = static_cast<double>(passes.size());
  UncertaintyScore score;
  score.per_class_variance.assign(k, 0.0);
  for (std::size_t c = 0; c < k; ++c) {
    double mean = 0.0;
    for (const auto& p : passes) {
      if (p.size() != k) throw ShapeError("uncertainty passes disagree on class count");
      mean += p[c];
    }
    mean /= t;
    double var = 0.0;
    for (const auto& p : passes) var += (p[c] - mean) * (p[c] - mean);
    score.per_class_variance[c] = var / t;
  }
  score.u = *std::max_element(score.per_class_variance.begin(), score.per_class_variance.end());
  return score;
}

UncertaintyScore mc_uncertainty(const StochasticPass& pass, const MCConfig& cfg, const numkit::RngStream& rng) {
  cfg.validate();
  std::vector<Categorical> outputs;
  outputs.reserve(cfg.passes);
  for (std::size_t t = 0; t < cfg.passes; ++t) {
    numkit::RngStream stream = rng.child(t);
    outputs.push_back(pass(stream));
  }
  return score_from_passes(outputs);
}

UncertaintyScore mc_uncertainty(const std::vector<learnkit::LayerSpec>& net, const learnkit::ParamSet& params,
                                const numkit::FloatArray& input, const MCConfig& cfg, const numkit::RngStream& rng) {
  const learnkit::Sequential<float> chain(net);
  return mc_uncertainty(
      [&](numkit::RngStream& stream) {
        const auto logits = chain.forward(params, input, learnkit::Mode::train, stream);
        std::vector<double> z(logits.storage().begin(), logits.storage().end());
        return numkit::softmax(z);
      },
      cfg, rng);
}

SampleWeight weight_from_uncertainty(double u, double alpha, double beta, WeightRule rule) {
  constexpr double kSlack = 1e-12;
  if (!(u >= -kSlack && u <= 0.25 + kSlack)) throw InvalidInput("uncertainty outside [0, 0.25]: " + std::to_string(u));
  if (!(alpha >= 0.0)) throw InvalidInput("weight alpha must be nonnegative");
  if (!(beta > 0.0)) throw InvalidInput("weight beta must be positive");
  u = std::clamp(u, 0.0, 0.25);
  SampleWeight sw;
  sw.source_u = u;
  sw.w = rule == WeightRule::exp_beta ? std::exp(-alpha * u) + beta : 1.0 - u;
  return sw;
}

}  // namespace uaai::uncertainty
