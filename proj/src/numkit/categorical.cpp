// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/numkit/categorical.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "uaai/error.hpp"

namespace uaai::numkit {

Categorical::Categorical(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.size() < 2) throw InvalidInput("categorical needs at least two outcomes");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidInput("probability outside [0,1]: " + std::to_string(p));
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw InvalidInput("probabilities sum to " + std::to_string(sum));
}

Categorical Categorical::uniform(std::size_t k) {
  if (k < 2) throw InvalidInput("categorical needs at least two outcomes");
  return Categorical(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

Categorical Categorical::one_hot(std::size_t k, std::size_t index) {
  if (index >= k) throw InvalidInput("one-hot index out of range");
  std::vector<double> p(k, 0.0);
  p[index] = 1.0;
  return Categorical(std::move(p));
}

Categorical Categorical::from_weights(std::span<const double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw InvalidInput("weights must be finite and nonnegative");
    sum += w;
  }
  if (!(sum > 0.0)) throw InvalidInput("weights sum to zero");
  std::vector<double> p(weights.begin(), weights.end());
  for (double& v : p) v /= sum;
  return Categorical(std::move(p));
}

std::size_t Categorical::argmax() const {
  return static_cast<std::size_t>(std::max_element(probs_.begin(), probs_.end()) - probs_.begin());
}

Categorical softmax(std::span<const double> logits) {
  if (logits.size() < 2) throw InvalidInput("softmax needs at least two logits");
  double hi = logits[0];
  for (double z : logits) {
    if (!std::isfinite(z)) throw InvalidInput("softmax input is not finite");
    hi = std::max(hi, z);
  }
  std::vector<double> p(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    p[i] = std::exp(logits[i] - hi);
    sum += p[i];
  }
  for (double& v : p) v /= sum;
  return Categorical(std::move(p));
}

double kl_divergence(const Categorical& p, const Categorical& q) {
  if (p.size() != q.size()) throw ShapeError("kl_divergence: length mismatch");
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= 0.0) continue;
    kl += p[i] * (std::log(std::max(p[i], kProbFloor)) - std::log(std::max(q[i], kProbFloor)));
  }
  return std::max(kl, 0.0);
}

double entropy(const Categorical& p) {
  double h = 0.0;
  for (double v : p.probs()) {
    if (v > 0.0) h -= v * std::log(std::max(v, kProbFloor));
  }
  return std::clamp(h, 0.0, std::log(static_cast<double>(p.size())));
}

double cross_entropy(const Categorical& p, std::size_t label) {
  if (label >= p.size()) throw InvalidInput("label out of range");
  return -std::log(std::max(p[label], kProbFloor));
}

}  // namespace uaai::numkit
