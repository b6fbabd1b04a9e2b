// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

namespace uaai::learnkit {

enum class LayerKind {
  linear,
  relu,
  sigmoid,
  dropout,
  conv2d,
  channel_avg_pool,
  channel_max_pool,
  concat_channels,
  flatten,
};

enum class Mode { train, infer };

std::string to_string(LayerKind kind);
LayerKind layer_kind_from_string(const std::string& name);

/// One layer of a network. `name` prefixes the layer's parameter keys
/// ("<name>.weight", "<name>.bias") and is empty for parameter-free layers.
struct LayerSpec {
  LayerKind kind = LayerKind::relu;
  std::string name;
  std::size_t in_features = 0;
  std::size_t out_features = 0;
  std::size_t in_channels = 0;
  std::size_t out_channels = 0;
  std::size_t kernel = 0;
  double rate = 0.0;

  static LayerSpec of(LayerKind kind, std::string name = {}) {
    LayerSpec s;
    s.kind = kind;
    s.name = std::move(name);
    return s;
  }
  static LayerSpec linear(std::string name, std::size_t in, std::size_t out);
  static LayerSpec conv2d(std::string name, std::size_t in_channels, std::size_t out_channels, std::size_t kernel);
  static LayerSpec dropout(double rate);
  static LayerSpec relu() { return of(LayerKind::relu); }
  static LayerSpec sigmoid() { return of(LayerKind::sigmoid); }
  static LayerSpec flatten() { return of(LayerKind::flatten); }
  static LayerSpec channel_avg_pool() { return of(LayerKind::channel_avg_pool); }
  static LayerSpec channel_max_pool() { return of(LayerKind::channel_max_pool); }
  static LayerSpec concat_channels() { return of(LayerKind::concat_channels); }

  /// "Same" padding; kernels are odd.
  std::size_t padding() const { return (kernel - 1) / 2; }
  bool has_params() const { return kind == LayerKind::linear || kind == LayerKind::conv2d; }
  std::string weight_key() const { return name + ".weight"; }
  std::string bias_key() const { return name + ".bias"; }
  /// Throws InvalidInput on nonpositive widths, even kernels or a rate outside [0,1).
  void validate() const;

  bool operator==(const LayerSpec&) const = default;
};

void to_json(nlohmann::json& j, const LayerSpec& spec);
void from_json(const nlohmann::json& j, LayerSpec& spec);

}  // namespace uaai::learnkit
