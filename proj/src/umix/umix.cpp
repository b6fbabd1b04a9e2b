// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/umix/umix.hpp"

#include "uaai/error.hpp"
#include "uaai/numkit/categorical.hpp"

namespace uaai::umix {

std::vector<double> MixedSample::soft_label(std::size_t classes) const {
  if (y_i >= classes || y_j >= classes) throw InvalidInput("mixed label out of range");
  std::vector<double> y(classes, 0.0);
  y[y_i] += lambda;
  y[y_j] += 1.0 - lambda;
  return y;
}

MixedSample mix_samples(const numkit::FloatArray& x_i, std::size_t y_i, const numkit::FloatArray& x_j,
                        std::size_t y_j, double lambda, double w_i, double w_j) {
  if (x_i.shape() != x_j.shape()) throw ShapeError("mix_samples: samples have different shapes");
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw InvalidInput("mixing coefficient outside [0,1]");
  MixedSample m{numkit::FloatArray(x_i.shape()), y_i, y_j, lambda, w_i, w_j};
  const float a = static_cast<float>(lambda);
  const float b = static_cast<float>(1.0 - lambda);
  for (std::size_t n = 0; n < x_i.size(); ++n) m.x_mixed[n] = a * x_i[n] + b * x_j[n];
  return m;
}

double umix_loss(std::span<const double> logits, const MixedSample& sample, std::span<double> grad_logits) {
  const auto p = numkit::softmax(logits);
  const double a = sample.w_i * sample.lambda;
  const double b = sample.w_j * (1.0 - sample.lambda);
  if (!grad_logits.empty()) {
    if (grad_logits.size() != p.size()) throw ShapeError("umix_loss: gradient buffer has wrong length");
    for (std::size_t k = 0; k < p.size(); ++k) {
      grad_logits[k] = a * (p[k] - (k == sample.y_i ? 1.0 : 0.0)) + b * (p[k] - (k == sample.y_j ? 1.0 : 0.0));
    }
  }
  return a * numkit::cross_entropy(p, sample.y_i) + b * numkit::cross_entropy(p, sample.y_j);
}

}  // namespace uaai::umix
