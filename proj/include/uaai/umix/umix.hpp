// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "uaai/numkit/array.hpp"

namespace uaai::umix {

/// Convex combination of two samples. The soft label
/// lambda * onehot(y_i) + (1 - lambda) * onehot(y_j) stays implicit in
/// (y_i, y_j, lambda).
struct MixedSample {
  numkit::FloatArray x_mixed;
  std::size_t y_i = 0;
  std::size_t y_j = 0;
  double lambda = 1.0;
  double w_i = 1.0;
  double w_j = 1.0;

  std::vector<double> soft_label(std::size_t classes) const;
};

/// x_mixed = lambda x_i + (1 - lambda) x_j. Throws ShapeError on mismatched
/// shapes, InvalidInput for lambda outside [0,1].
MixedSample mix_samples(const numkit::FloatArray& x_i, std::size_t y_i, const numkit::FloatArray& x_j,
                        std::size_t y_j, double lambda, double w_i = 1.0, double w_j = 1.0);

/// w_i lambda CE(logits, y_i) + w_j (1 - lambda) CE(logits, y_j); the
/// gradient with respect to the logits goes to `grad_logits` when non-empty.
double umix_loss(std::span<const double> logits, const MixedSample& sample, std::span<double> grad_logits = {});

}  // namespace uaai::umix
