// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "json.hpp"
#include "uaai/efe/efe.hpp"
#include "uaai/uncertainty/uncertainty.hpp"

namespace uaai::pipeline {

struct UmixSettings {
  bool enabled = true;
  double alpha_mix = 0.4;
  uncertainty::WeightRule weight_rule = uncertainty::WeightRule::exp_beta;
  double weight_alpha = 10.0;
  double weight_beta = 0.1;
};

struct EfeSettings {
  /// "info_gain" or "label_target" (the latter targets the training label).
  std::string train_mode = "info_gain";
  std::string eval_mode = "info_gain";
  /// 0 selects max(4, ceil(T / 8)).
  std::size_t budget = 0;
};

struct TrainConfig {
  std::string dataset_path;
  std::size_t epochs = 50;
  std::size_t batch_size = 32;
  double learning_rate = 3e-4;
  bool temporal_selection = true;
  bool spatial_selection = true;
  UmixSettings umix;
  uncertainty::MCConfig mc;
  EfeSettings efe;
  double beta_kl = 0.01;
  double confusion_smoothing = 1.0;
  /// Epochs run with uniform-stride selection and a frozen confusion model.
  std::size_t warmup_epochs = 1;
  std::size_t conv_channels = 8;
  std::size_t embedding_dim = 32;
  /// When false the metrics `seconds` column is written as 0 so that runs are
  /// byte-comparable.
  bool record_wall_clock = true;
  std::uint64_t seed = 1;

  /// Throws InvalidConfig.
  void validate() const;
  std::size_t frame_budget(std::size_t frames) const;
};

efe::EFEVariant efe_variant_from_string(const std::string& name);

void to_json(nlohmann::json& j, const TrainConfig& cfg);
/// Missing keys keep their defaults; unknown keys throw InvalidConfig.
void from_json(const nlohmann::json& j, TrainConfig& cfg);

TrainConfig load_train_config(const std::string& path);

}  // namespace uaai::pipeline
