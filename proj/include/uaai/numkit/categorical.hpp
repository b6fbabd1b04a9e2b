// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace uaai::numkit {

/// Floor applied to probabilities before any logarithm.
inline constexpr double kProbFloor = 1e-12;

/// Categorical distribution over K >= 2 outcomes. Construction validates the
/// simplex (entries in [0,1], sum within 1e-9 of one).
class Categorical {
 public:
  explicit Categorical(std::vector<double> probs);

  static Categorical uniform(std::size_t k);
  static Categorical one_hot(std::size_t k, std::size_t index);
  /// Normalizes nonnegative weights. Throws InvalidInput when they sum to zero.
  static Categorical from_weights(std::span<const double> weights);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  /// Index of the largest probability; ties go to the lowest index.
  std::size_t argmax() const;

  bool operator==(const Categorical&) const = default;

 private:
  std::vector<double> probs_;
};

Categorical softmax(std::span<const double> logits);
double kl_divergence(const Categorical& p, const Categorical& q);
double entropy(const Categorical& p);
/// -ln p[label], clamped at kProbFloor.
double cross_entropy(const Categorical& p, std::size_t label);

}  // namespace uaai::numkit
