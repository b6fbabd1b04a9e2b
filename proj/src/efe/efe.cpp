// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/efe/efe.hpp"

#include <algorithm>
#include <cmath>

#include "uaai/error.hpp"

namespace uaai::efe {
namespace {

// Predictive p(o) = sum_i b_i A(i,o), written relative to row 0 so that a
// column with identical entries reproduces that entry exactly.
std::vector<double> predictive(const Belief& belief, const Eigen::MatrixXd& a) {
  const std::size_t k = belief.size();
  std::vector<double> p(k);
  for (std::size_t o = 0; o < k; ++o) {
    const double ref = a(0, static_cast<Eigen::Index>(o));
    double delta = 0.0;
    for (std::size_t i = 1; i < k; ++i) {
      delta += belief[i] * (a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(o)) - ref);
    }
    p[o] = ref + delta;
  }
  return p;
}

void check_shapes(const Belief& belief, const LikelihoodMatrix& likelihood) {
  if (likelihood.classes() != belief.size() || likelihood.matrix.cols() != likelihood.matrix.rows()) {
    throw ShapeError("likelihood matrix does not match belief size");
  }
}

}  // namespace

double expected_info_gain(const Belief& belief, const LikelihoodMatrix& likelihood) {
  check_shapes(belief, likelihood);
  const auto& a = likelihood.matrix;
  const auto p = predictive(belief, a);
  double gain = 0.0;
  for (std::size_t s = 0; s < belief.size(); ++s) {
    if (belief[s] <= 0.0) continue;
    for (std::size_t o = 0; o < belief.size(); ++o) {
      const double a_so = a(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(o));
      if (a_so <= 0.0 || p[o] <= 0.0) continue;
      gain += belief[s] * a_so * std::log(a_so / p[o]);
    }
  }
  return std::max(gain, 0.0);
}

EFEScore expected_free_energy(const Belief& belief, const LikelihoodMatrix& likelihood, const EFEMode& mode) {
  EFEScore score;
  score.action = likelihood.source_action;
  if (mode.variant == EFEVariant::info_gain) {
    score.epistemic = -expected_info_gain(belief, likelihood);
    score.entropy_term = 0.0;
    score.total = score.epistemic;
    return score;
  }
  if (!mode.target) throw MissingTarget("label_target EFE mode requires a target class");
  check_shapes(belief, likelihood);
  const std::size_t k = belief.size();
  const std::size_t target = *mode.target;
  if (target >= k) throw InvalidInput("EFE target class out of range");
  const auto& a = likelihood.matrix;
  const auto p = predictive(belief, a);

  double epistemic = 0.0;
  for (std::size_t o = 0; o < k; ++o) {
    if (p[o] <= 0.0) continue;
    const double q_target = belief[target] * a(static_cast<Eigen::Index>(target), static_cast<Eigen::Index>(o)) / p[o];
    epistemic += p[o] * -std::log(std::max(q_target, numkit::kProbFloor));
  }
  double entropy_term = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    if (belief[i] <= 0.0) continue;
    double h = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double v = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (v > 0.0) h -= v * std::log(v);
    }
    entropy_term += belief[i] * h;
  }
  score.epistemic = epistemic;
  score.entropy_term = entropy_term;
  score.total = epistemic - entropy_term;
  return score;
}

SelectionResult select_frames(std::span<const Categorical> frame_softmaxes, const genmodel::ConfusionModel& confusion,
                              std::size_t budget, const EFEMode& mode) {
  if (frame_softmaxes.empty()) throw InvalidInput("select_frames needs at least one frame");
  if (budget == 0) throw InvalidInput("frame budget must be positive");
  const std::size_t k = confusion.classes();
  const Eigen::MatrixXd rows = confusion.row_stochastic();

  std::vector<LikelihoodMatrix> likelihoods;
  likelihoods.reserve(frame_softmaxes.size());
  for (std::size_t t = 0; t < frame_softmaxes.size(); ++t) {
    if (frame_softmaxes[t].size() != k) throw ShapeError("frame softmax size differs from confusion model");
    likelihoods.push_back(genmodel::frame_likelihood(rows, frame_softmaxes[t], t));
  }

  SelectionResult result;
  std::vector<bool> taken(frame_softmaxes.size(), false);
  Belief belief(k);
  const std::size_t rounds = std::min(budget, frame_softmaxes.size());
  for (std::size_t round = 0; round < rounds; ++round) {
    std::vector<EFEScore> scores;
    std::size_t best = frame_softmaxes.size();
    double best_total = 0.0;
    for (std::size_t t = 0; t < frame_softmaxes.size(); ++t) {
      if (taken[t]) continue;
      scores.push_back(expected_free_energy(belief, likelihoods[t], mode));
      if (best == frame_softmaxes.size() || scores.back().total < best_total) {
        best = t;
        best_total = scores.back().total;
      }
    }
    taken[best] = true;
    result.selected.push_back(best);
    try {
      belief = genmodel::belief_update(belief, likelihoods[best], frame_softmaxes[best].argmax());
    } catch (const DegenerateObservation&) {
      // keep the previous belief
    }
    result.beliefs.push_back(belief);
    result.scores.push_back(std::move(scores));
  }
  return result;
}

std::vector<std::size_t> uniform_stride(std::size_t frames, std::size_t budget) {
  if (frames == 0 || budget == 0) throw InvalidInput("uniform_stride needs positive frames and budget");
  const std::size_t n = std::min(frames, budget);
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = ((2 * i + 1) * frames) / (2 * n);
  return idx;
}

std::size_t default_budget(std::size_t frames) {
  return std::max<std::size_t>(4, (frames + 7) / 8);
}

}  // namespace uaai::efe
