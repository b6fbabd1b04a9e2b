// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/learnkit/param_set.hpp"

#include <cmath>

namespace uaai::learnkit {

numkit::Shape weight_shape(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::linear:
      return {spec.out_features, spec.in_features};
    case LayerKind::conv2d:
      return {spec.out_channels, spec.in_channels, spec.kernel, spec.kernel};
    default:
      return {};
  }
}

numkit::Shape bias_shape(const LayerSpec& spec) {
  switch (spec.kind) {
    case LayerKind::linear:
      return {spec.out_features};
    case LayerKind::conv2d:
      return {spec.out_channels};
    default:
      return {};
  }
}

void init_params(const std::vector<LayerSpec>& net, ParamSet& params, numkit::RngStream& rng) {
  for (const auto& spec : net) {
    spec.validate();
    if (!spec.has_params()) continue;
    double fan_in = 0.0;
    double fan_out = 0.0;
    if (spec.kind == LayerKind::linear) {
      fan_in = static_cast<double>(spec.in_features);
      fan_out = static_cast<double>(spec.out_features);
    } else {
      const double area = static_cast<double>(spec.kernel * spec.kernel);
      fan_in = static_cast<double>(spec.in_channels) * area;
      fan_out = static_cast<double>(spec.out_channels) * area;
    }
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    numkit::FloatArray w(weight_shape(spec));
    for (float& v : w.values()) v = static_cast<float>(rng.uniform(-limit, limit));
    params.add(spec.weight_key(), std::move(w));
    params.add(spec.bias_key(), numkit::FloatArray(bias_shape(spec)));
  }
}

}  // namespace uaai::learnkit
