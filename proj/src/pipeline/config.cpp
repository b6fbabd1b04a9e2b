// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/pipeline/config.hpp"

#include <fstream>

#include "uaai/error.hpp"

namespace uaai::pipeline {
namespace {

// Overlay `src` on `dst`, rejecting keys `dst` does not already have.
void overlay(nlohmann::json& dst, const nlohmann::json& src, const std::string& where) {
  if (!src.is_object()) throw InvalidConfig(where + " must be a JSON object");
  for (const auto& [key, value] : src.items()) {
    if (!dst.contains(key)) throw InvalidConfig("unknown config key '" + where + key + "'");
    if (dst[key].is_object()) {
      overlay(dst[key], value, where + key + ".");
    } else {
      dst[key] = value;
    }
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs < 1) throw InvalidConfig("epochs must be at least 1");
  if (batch_size < 1) throw InvalidConfig("batch_size must be at least 1");
  if (!(learning_rate > 0.0)) throw InvalidConfig("learning_rate must be positive");
  if (!(umix.alpha_mix > 0.0)) throw InvalidConfig("umix.alpha_mix must be positive");
  if (!(umix.weight_alpha >= 0.0) || !(umix.weight_beta > 0.0)) throw InvalidConfig("umix weight alpha/beta out of range");
  if (!(beta_kl >= 0.0)) throw InvalidConfig("beta_kl must be nonnegative");
  if (!(confusion_smoothing > 0.0)) throw InvalidConfig("confusion_smoothing must be positive");
  if (conv_channels < 1 || embedding_dim < 1) throw InvalidConfig("model widths must be positive");
  mc.validate();
  efe_variant_from_string(efe.train_mode);
  if (efe_variant_from_string(efe.eval_mode) != efe::EFEVariant::info_gain) {
    throw InvalidConfig("efe.eval_mode must be info_gain: labels are unavailable at inference");
  }
}

std::size_t TrainConfig::frame_budget(std::size_t frames) const {
  return std::min(frames, efe.budget == 0 ? efe::default_budget(frames) : efe.budget);
}

efe::EFEVariant efe_variant_from_string(const std::string& name) {
  if (name == "info_gain") return efe::EFEVariant::info_gain;
  if (name == "label_target") return efe::EFEVariant::label_target;
  throw InvalidConfig("unknown EFE mode '" + name + "'");
}

void to_json(nlohmann::json& j, const TrainConfig& c) {
  j = nlohmann::json{
      {"dataset_path", c.dataset_path},
      {"epochs", c.epochs},
      {"batch_size", c.batch_size},
      {"learning_rate", c.learning_rate},
      {"temporal_selection", c.temporal_selection},
      {"spatial_selection", c.spatial_selection},
      {"umix",
       {{"enabled", c.umix.enabled},
        {"alpha_mix", c.umix.alpha_mix},
        {"weight_rule", uncertainty::to_string(c.umix.weight_rule)},
        {"weight_alpha", c.umix.weight_alpha},
        {"weight_beta", c.umix.weight_beta}}},
      {"mc", {{"passes", c.mc.passes}, {"dropout_rate", c.mc.dropout_rate}}},
      {"efe", {{"train_mode", c.efe.train_mode}, {"eval_mode", c.efe.eval_mode}, {"budget", c.efe.budget}}},
      {"beta_kl", c.beta_kl},
      {"confusion_smoothing", c.confusion_smoothing},
      {"warmup_epochs", c.warmup_epochs},
      {"conv_channels", c.conv_channels},
      {"embedding_dim", c.embedding_dim},
      {"record_wall_clock", c.record_wall_clock},
      {"seed", c.seed},
  };
}

void from_json(const nlohmann::json& j, TrainConfig& c) {
  nlohmann::json merged = c;
  overlay(merged, j, "");
  try {
    c.dataset_path = merged.at("dataset_path").get<std::string>();
    c.epochs = merged.at("epochs").get<std::size_t>();
    c.batch_size = merged.at("batch_size").get<std::size_t>();
    c.learning_rate = merged.at("learning_rate").get<double>();
    c.temporal_selection = merged.at("temporal_selection").get<bool>();
    c.spatial_selection = merged.at("spatial_selection").get<bool>();
    const auto& u = merged.at("umix");
    c.umix.enabled = u.at("enabled").get<bool>();
    c.umix.alpha_mix = u.at("alpha_mix").get<double>();
    c.umix.weight_rule = uncertainty::weight_rule_from_string(u.at("weight_rule").get<std::string>());
    c.umix.weight_alpha = u.at("weight_alpha").get<double>();
    c.umix.weight_beta = u.at("weight_beta").get<double>();
    c.mc.passes = merged.at("mc").at("passes").get<std::size_t>();
    c.mc.dropout_rate = merged.at("mc").at("dropout_rate").get<double>();
    c.efe.train_mode = merged.at("efe").at("train_mode").get<std::string>();
    c.efe.eval_mode = merged.at("efe").at("eval_mode").get<std::string>();
    c.efe.budget = merged.at("efe").at("budget").get<std::size_t>();
    c.beta_kl = merged.at("beta_kl").get<double>();
    c.confusion_smoothing = merged.at("confusion_smoothing").get<double>();
    c.warmup_epochs = merged.at("warmup_epochs").get<std::size_t>();
    c.conv_channels = merged.at("conv_channels").get<std::size_t>();
    c.embedding_dim = merged.at("embedding_dim").get<std::size_t>();
    c.record_wall_clock = merged.at("record_wall_clock").get<bool>();
    c.seed = merged.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("train config: ") + e.what());
  }
}

TrainConfig load_train_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot read config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("config " + path + " is not valid JSON: " + e.what());
  }
  TrainConfig cfg = j.get<TrainConfig>();
  cfg.validate();
  return cfg;
}

}  // namespace uaai::pipeline
