// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "uaai/numkit/array.hpp"

// Batched primitive kernels. Activations are laid out [N, ...] with N the
// batch axis; images are [N, C, H, W]. Backward kernels accumulate into the
// parameter gradients they receive and return the input gradient.
namespace uaai::learnkit::ops {

using numkit::BasicArray;
using numkit::Shape;

template <typename S>
BasicArray<S> linear_forward(const BasicArray<S>& x, const BasicArray<S>& w, const BasicArray<S>& b);
template <typename S>
BasicArray<S> linear_backward(const BasicArray<S>& x, const BasicArray<S>& w, const BasicArray<S>& dy,
                              BasicArray<S>& dw, BasicArray<S>& db);

template <typename S>
BasicArray<S> conv2d_forward(const BasicArray<S>& x, const BasicArray<S>& w, const BasicArray<S>& b,
                             std::size_t padding);
template <typename S>
BasicArray<S> conv2d_backward(const BasicArray<S>& x, const BasicArray<S>& w, const BasicArray<S>& dy,
                              std::size_t padding, BasicArray<S>& dw, BasicArray<S>& db);

template <typename S>
BasicArray<S> channel_avg_pool_forward(const BasicArray<S>& x);
template <typename S>
BasicArray<S> channel_avg_pool_backward(const Shape& input_shape, const BasicArray<S>& dy);

/// `winners` receives the arg-max channel per location (ties: lowest channel).
template <typename S>
BasicArray<S> channel_max_pool_forward(const BasicArray<S>& x, std::vector<std::uint32_t>* winners);
template <typename S>
BasicArray<S> channel_max_pool_backward(const Shape& input_shape, const std::vector<std::uint32_t>& winners,
                                        const BasicArray<S>& dy);

template <typename S>
BasicArray<S> concat_channels(const BasicArray<S>& a, const BasicArray<S>& b);
template <typename S>
std::pair<BasicArray<S>, BasicArray<S>> split_channels(const BasicArray<S>& x, std::size_t first);

template <typename S>
void relu_forward(BasicArray<S>& x);
/// `y` is the relu output.
template <typename S>
void relu_backward(const BasicArray<S>& y, BasicArray<S>& dy);

template <typename S>
void sigmoid_forward(BasicArray<S>& x);
/// `y` is the sigmoid output.
template <typename S>
void sigmoid_backward(const BasicArray<S>& y, BasicArray<S>& dy);

}  // namespace uaai::learnkit::ops
