// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/learnkit/grad_check.hpp"

#include <algorithm>
#include <cmath>

namespace uaai::learnkit {

double relative_error(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-6});
  return std::abs(analytic - numeric) / scale;
}

double grad_check(const DoubleParamSet& params, const Objective& objective, double epsilon) {
  if (!(epsilon >= 1e-7 && epsilon <= 1e-3)) throw InvalidInput("grad_check epsilon must lie in [1e-7, 1e-3]");
  DoubleParamSet analytic = params.zeros_like();
  objective(params, &analytic);

  DoubleParamSet probe = params;
  double worst = 0.0;
  for (const auto& [key, tensor] : params.tensors()) {
    const auto& g = analytic.at(key);
    for (std::size_t i = 0; i < tensor.size(); ++i) {
      const double original = tensor[i];
      probe.mutable_at(key)[i] = original + epsilon;
      const double plus = objective(probe, nullptr);
      probe.mutable_at(key)[i] = original - epsilon;
      const double minus = objective(probe, nullptr);
      probe.mutable_at(key)[i] = original;
      worst = std::max(worst, relative_error(g[i], (plus - minus) / (2.0 * epsilon)));
    }
  }
  return worst;
}

double grad_check(const std::vector<LayerSpec>& net, const ParamSet& params, const numkit::NumArray& input,
                  const OutputLoss& loss, double epsilon, std::uint64_t mask_seed) {
  const Sequential<double> chain(net);
  const numkit::RngStream masks(mask_seed, 0);
  Objective objective = [&](const DoubleParamSet& p, DoubleParamSet* grads) {
    numkit::RngStream rng = masks;
    ForwardTrace<double> trace;
    const auto out = chain.forward(p, input, Mode::train, rng, grads ? &trace : nullptr);
    numkit::NumArray upstream(out.shape());
    const double value = loss(out, grads ? &upstream : nullptr);
    if (grads) chain.backward(p, trace, upstream, *grads);
    return value;
  };
  return grad_check(params.cast<double>(), objective, epsilon);
}

}  // namespace uaai::learnkit
