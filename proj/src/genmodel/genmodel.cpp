// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/genmodel/genmodel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <vector>

#include "uaai/error.hpp"

namespace uaai::genmodel {

ConfusionModel::ConfusionModel(std::size_t k, double smoothing)
    : ConfusionModel(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)), smoothing) {}

ConfusionModel::ConfusionModel(Eigen::MatrixXd counts, double smoothing)
    : counts_(std::move(counts)), smoothing_(smoothing) {
  if (counts_.rows() < 2 || counts_.rows() != counts_.cols()) throw InvalidInput("confusion model must be KxK, K >= 2");
  if (!(smoothing_ > 0.0)) throw InvalidInput("confusion smoothing must be positive");
  if ((counts_.array() < 0.0).any() || !counts_.allFinite()) throw InvalidInput("confusion counts must be nonnegative");
}

Eigen::MatrixXd ConfusionModel::row_stochastic() const {
  const double k = static_cast<double>(classes());
  Eigen::MatrixXd rows = counts_.array() + smoothing_;
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    rows.row(i) /= counts_.row(i).sum() + k * smoothing_;
  }
  return rows;
}

void ConfusionModel::update(std::size_t predicted_class, std::size_t true_class) {
  if (predicted_class >= classes() || true_class >= classes()) throw InvalidInput("confusion index out of range");
  counts_(static_cast<Eigen::Index>(true_class), static_cast<Eigen::Index>(predicted_class)) += 1.0;
}

void ConfusionModel::write_csv(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write " + path.string());
  const auto rows = row_stochastic();
  for (std::size_t j = 0; j < classes(); ++j) out << (j ? "," : "") << j;
  out << "\n" << std::setprecision(17);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out << (j ? "," : "") << rows(i, j);
    out << "\n";
  }
}

ConfusionModel update_confusion(ConfusionModel model, std::size_t predicted_class, std::size_t true_class) {
  model.update(predicted_class, true_class);
  return model;
}

LikelihoodMatrix frame_likelihood(const Eigen::MatrixXd& confusion_rows, const Categorical& frame_softmax,
                                  std::size_t source_action) {
  const std::size_t k = frame_softmax.size();
  if (static_cast<std::size_t>(confusion_rows.rows()) != k || static_cast<std::size_t>(confusion_rows.cols()) != k) {
    throw ShapeError("frame_likelihood: confusion is not KxK for the frame's K");
  }
  const double confidence = std::clamp(1.0 - numkit::entropy(frame_softmax) / std::log(static_cast<double>(k)), 0.0, 1.0);
  LikelihoodMatrix lm;
  lm.source_action = source_action;
  lm.confidence = confidence;
  lm.matrix = confidence * confusion_rows;
  lm.matrix.array() += (1.0 - confidence) / static_cast<double>(k);
  return lm;
}

LikelihoodMatrix frame_likelihood(const ConfusionModel& confusion, const Categorical& frame_softmax,
                                  std::size_t source_action) {
  return frame_likelihood(confusion.row_stochastic(), frame_softmax, source_action);
}

Belief belief_update(const Belief& belief, const LikelihoodMatrix& likelihood, std::size_t observed) {
  const std::size_t k = belief.size();
  if (likelihood.classes() != k) throw ShapeError("belief_update: likelihood size differs from belief");
  if (observed >= k) throw InvalidInput("belief_update: observation index out of range");
  std::vector<double> post(k);
  double normalizer = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    post[i] = belief[i] * likelihood.matrix(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(observed));
    normalizer += post[i];
  }
  if (!(normalizer > 1e-12)) throw DegenerateObservation("observation has vanishing predictive probability");
  for (double& p : post) p /= normalizer;
  return Belief(Categorical(std::move(post)));
}

double vfe_loss(const Categorical& posterior, std::size_t label, const VFEConfig& cfg) {
  if (!(cfg.beta_kl >= 0.0)) throw InvalidInput("beta_kl must be nonnegative");
  return numkit::cross_entropy(posterior, label) + cfg.beta_kl * numkit::kl_divergence(posterior, cfg.prior);
}

double vfe_loss_from_logits(std::span<const double> logits, std::size_t label, const VFEConfig& cfg,
                            std::span<double> grad_logits) {
  const auto p = numkit::softmax(logits);
  if (grad_logits.size() != p.size()) throw ShapeError("vfe_loss: gradient buffer has wrong length");
  const double kl = numkit::kl_divergence(p, cfg.prior);
  for (std::size_t j = 0; j < p.size(); ++j) {
    // d/dz KL(p||q) = p_j (ln(p_j / q_j) - KL)
    const double log_ratio = std::log(std::max(p[j], numkit::kProbFloor)) - std::log(std::max(cfg.prior[j], numkit::kProbFloor));
    grad_logits[j] = p[j] - (j == label ? 1.0 : 0.0) + cfg.beta_kl * p[j] * (log_ratio - kl);
  }
  return vfe_loss(p, label, cfg);
}

}  // namespace uaai::genmodel
