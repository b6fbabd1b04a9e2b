// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "uaai/learnkit/layer.hpp"
#include "uaai/learnkit/param_set.hpp"
#include "uaai/numkit/array.hpp"

namespace uaai::efe {

using numkit::BasicArray;

inline constexpr std::size_t kAttentionKernel = 7;

/// The attention head's convolution: [avg; max] pooled maps (2 channels) to one logit map.
learnkit::LayerSpec attention_conv_spec(const std::string& name = "attention.conv");

template <typename S>
struct AttentionTrace {
  BasicArray<S> features;
  BasicArray<S> pooled;
  std::vector<std::uint32_t> max_winners;
  BasicArray<S> mask;
  const void* params = nullptr;
  std::uint64_t params_version = 0;
};

template <typename S>
struct AttentionOutput {
  /// [N, 1, H, W], every entry in (0,1).
  BasicArray<S> mask;
  /// mask broadcast over channels times the input features, [N, C, H, W].
  BasicArray<S> reweighted;
};

/// mask = sigmoid(conv7x7([mean_c F; max_c F])), reweighted = mask * F.
/// Accepts [N,C,H,W] or a single [C,H,W] map.
template <typename S>
AttentionOutput<S> spatial_attention_forward(const BasicArray<S>& features, const learnkit::BasicParamSet<S>& params,
                                             AttentionTrace<S>* trace = nullptr,
                                             const std::string& name = "attention.conv");

/// Gradient of the reweighted output back to the features; head parameter
/// gradients accumulate into `grads`. `mask_upstream`, when given, adds a
/// direct gradient on the mask.
template <typename S>
BasicArray<S> spatial_attention_backward(const learnkit::BasicParamSet<S>& params, const AttentionTrace<S>& trace,
                                         const BasicArray<S>& upstream, learnkit::BasicParamSet<S>& grads,
                                         const BasicArray<S>* mask_upstream = nullptr,
                                         const std::string& name = "attention.conv");

/// Mask-weighted sum of per-location EFE contributions, sum_i M_i G_i.
double spatial_efe(const numkit::NumArray& per_location_g, const numkit::NumArray& mask);

}  // namespace uaai::efe
