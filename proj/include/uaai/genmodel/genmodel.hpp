// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <cstddef>
#include <filesystem>
#include <span>

#include "uaai/numkit/categorical.hpp"

namespace uaai::genmodel {

using numkit::Categorical;

/// The agent's state estimate over K gesture classes.
class Belief {
 public:
  explicit Belief(std::size_t k) : dist_(Categorical::uniform(k)) {}
  explicit Belief(Categorical dist) : dist_(std::move(dist)) {}

  const Categorical& dist() const { return dist_; }
  std::size_t size() const { return dist_.size(); }
  double operator[](std::size_t i) const { return dist_[i]; }

 private:
  Categorical dist_;
};

/// Running (true class, predicted class) counts with Laplace smoothing.
/// Row i of the stochastic view estimates p(observed = j | true = i).
class ConfusionModel {
 public:
  explicit ConfusionModel(std::size_t k, double smoothing = 1.0);
  ConfusionModel(Eigen::MatrixXd counts, double smoothing);

  std::size_t classes() const { return static_cast<std::size_t>(counts_.rows()); }
  double smoothing() const { return smoothing_; }
  const Eigen::MatrixXd& counts() const { return counts_; }
  Eigen::MatrixXd row_stochastic() const;

  /// counts(true, predicted) += 1. Throws InvalidInput on out-of-range indices.
  void update(std::size_t predicted_class, std::size_t true_class);

  /// CSV: header row of class ids, then K rows of row-stochastic probabilities.
  void write_csv(const std::filesystem::path& path) const;

 private:
  Eigen::MatrixXd counts_;
  double smoothing_;
};

ConfusionModel update_confusion(ConfusionModel model, std::size_t predicted_class, std::size_t true_class);

/// Row-stochastic A(i,j) = p(o = j | s = i) for one candidate frame.
struct LikelihoodMatrix {
  Eigen::MatrixXd matrix;
  std::size_t source_action = 0;
  double confidence = 0.0;

  std::size_t classes() const { return static_cast<std::size_t>(matrix.rows()); }
};

/// Confidence-tempered likelihood: lambda = 1 - H(frame)/ln K and
/// A = lambda * C + (1 - lambda) * U.
LikelihoodMatrix frame_likelihood(const Eigen::MatrixXd& confusion_rows, const Categorical& frame_softmax,
                                  std::size_t source_action = 0);
LikelihoodMatrix frame_likelihood(const ConfusionModel& confusion, const Categorical& frame_softmax,
                                  std::size_t source_action = 0);

/// posterior_i = belief_i A(i, observed) / sum_k belief_k A(k, observed).
/// Throws DegenerateObservation when the normalizer is <= 1e-12.
Belief belief_update(const Belief& belief, const LikelihoodMatrix& likelihood, std::size_t observed);

struct VFEConfig {
  double beta_kl = 0.01;
  Categorical prior;

  explicit VFEConfig(std::size_t k, double beta = 0.01) : beta_kl(beta), prior(Categorical::uniform(k)) {}
};

/// CE(posterior, label) + beta_kl * KL(posterior || prior).
double vfe_loss(const Categorical& posterior, std::size_t label, const VFEConfig& cfg);

/// vfe_loss of softmax(logits), with d loss / d logits written to `grad_logits`.
double vfe_loss_from_logits(std::span<const double> logits, std::size_t label, const VFEConfig& cfg,
                            std::span<double> grad_logits);

}  // namespace uaai::genmodel
