// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/learnkit/layer.hpp"

#include <array>
#include <utility>

#include "uaai/error.hpp"

namespace uaai::learnkit {
namespace {

constexpr std::array<std::pair<LayerKind, const char*>, 9> kKindNames = {{
    {LayerKind::linear, "linear"},
    {LayerKind::relu, "relu"},
    {LayerKind::sigmoid, "sigmoid"},
    {LayerKind::dropout, "dropout"},
    {LayerKind::conv2d, "conv2d"},
    {LayerKind::channel_avg_pool, "channel_avg_pool"},
    {LayerKind::channel_max_pool, "channel_max_pool"},
    {LayerKind::concat_channels, "concat_channels"},
    {LayerKind::flatten, "flatten"},
}};

}  // namespace

std::string to_string(LayerKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

LayerKind layer_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames) {
    if (name == n) return k;
  }
  throw InvalidInput("unknown layer kind '" + name + "'");
}

LayerSpec LayerSpec::linear(std::string name, std::size_t in, std::size_t out) {
  LayerSpec s = of(LayerKind::linear, std::move(name));
  s.in_features = in;
  s.out_features = out;
  return s;
}

LayerSpec LayerSpec::conv2d(std::string name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel) {
  LayerSpec s = of(LayerKind::conv2d, std::move(name));
  s.in_channels = in_channels;
  s.out_channels = out_channels;
  s.kernel = kernel;
  return s;
}

LayerSpec LayerSpec::dropout(double rate) {
  LayerSpec s = of(LayerKind::dropout);
  s.rate = rate;
  return s;
}

void LayerSpec::validate() const {
  switch (kind) {
    case LayerKind::linear:
      if (in_features == 0 || out_features == 0) throw InvalidInput("linear '" + name + "': widths must be positive");
      if (name.empty()) throw InvalidInput("linear layer needs a name");
      break;
    case LayerKind::conv2d:
      if (in_channels == 0 || out_channels == 0) throw InvalidInput("conv2d '" + name + "': channels must be positive");
      if (kernel == 0 || kernel % 2 == 0) throw InvalidInput("conv2d '" + name + "': kernel must be odd");
      if (name.empty()) throw InvalidInput("conv2d layer needs a name");
      break;
    case LayerKind::dropout:
      if (!(rate >= 0.0 && rate < 1.0)) throw InvalidInput("dropout rate must lie in [0,1)");
      break;
    default:
      break;
  }
}

void to_json(nlohmann::json& j, const LayerSpec& spec) {
  j = nlohmann::json{{"kind", to_string(spec.kind)}};
  if (!spec.name.empty()) j["name"] = spec.name;
  switch (spec.kind) {
    case LayerKind::linear:
      j["in_features"] = spec.in_features;
      j["out_features"] = spec.out_features;
      break;
    case LayerKind::conv2d:
      j["in_channels"] = spec.in_channels;
      j["out_channels"] = spec.out_channels;
      j["kernel"] = spec.kernel;
      break;
    case LayerKind::dropout:
      j["rate"] = spec.rate;
      break;
    default:
      break;
  }
}

void from_json(const nlohmann::json& j, LayerSpec& spec) {
  spec = LayerSpec::of(layer_kind_from_string(j.at("kind").get<std::string>()));
  spec.name = j.value("name", std::string{});
  spec.in_features = j.value("in_features", std::size_t{0});
  spec.out_features = j.value("out_features", std::size_t{0});
  spec.in_channels = j.value("in_channels", std::size_t{0});
  spec.out_channels = j.value("out_channels", std::size_t{0});
  spec.kernel = j.value("kernel", std::size_t{0});
  spec.rate = j.value("rate", 0.0);
  spec.validate();
}

}  // namespace uaai::learnkit
