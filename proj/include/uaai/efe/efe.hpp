// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "uaai/genmodel/genmodel.hpp"

namespace uaai::efe {

using genmodel::Belief;
using genmodel::LikelihoodMatrix;
using numkit::Categorical;

/// Expected free energy of observing one frame. `total` is what the selector
/// minimizes and always equals epistemic - entropy_term.
struct EFEScore {
  double total = 0.0;
  double epistemic = 0.0;
  double entropy_term = 0.0;
  std::size_t action = 0;
};

enum class EFEVariant { info_gain, label_target };

struct EFEMode {
  EFEVariant variant = EFEVariant::info_gain;
  std::optional<std::size_t> target;

  static EFEMode info_gain() { return {}; }
  static EFEMode label_target(std::size_t target_class) { return {EFEVariant::label_target, target_class}; }
};

/// Mutual information I(s; o) under (belief, A): sum_o p(o) KL(q(s|o) || belief).
double expected_info_gain(const Belief& belief, const LikelihoodMatrix& likelihood);

/// info_gain:    epistemic = -I(s;o), entropy_term = 0.
/// label_target: epistemic = E_p(o)[-ln q(target|o)],
///               entropy_term = sum_i belief_i H(A row i).
/// Throws MissingTarget for label_target without a target.
EFEScore expected_free_energy(const Belief& belief, const LikelihoodMatrix& likelihood, const EFEMode& mode);

struct SelectionResult {
  std::vector<std::size_t> selected;
  /// Belief after each selection round.
  std::vector<Belief> beliefs;
  /// Scores of every candidate considered, one vector per round.
  std::vector<std::vector<EFEScore>> scores;
};

/// Greedy EFE frame selection. Each round scores every unselected frame,
/// takes the argmin (ties to the lowest index), observes that frame's argmax
/// class and updates the belief. Runs min(budget, T) rounds.
SelectionResult select_frames(std::span<const Categorical> frame_softmaxes, const genmodel::ConfusionModel& confusion,
                              std::size_t budget, const EFEMode& mode);

/// Evenly spaced frame indices (centre of each of `budget` equal segments).
std::vector<std::size_t> uniform_stride(std::size_t frames, std::size_t budget);

/// max(4, ceil(T / 8)).
std::size_t default_budget(std::size_t frames);

}  // namespace uaai::efe
