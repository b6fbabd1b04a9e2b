// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <vector>

#include "uaai/learnkit/layer.hpp"
#include "uaai/learnkit/param_set.hpp"
#include "uaai/numkit/rng.hpp"

namespace uaai::learnkit {

/// Activations cached by a forward pass for the matching backward pass.
template <typename Scalar>
struct ForwardTrace {
  Mode mode = Mode::infer;
  std::vector<BasicArray<Scalar>> inputs;
  std::vector<BasicArray<Scalar>> outputs;
  std::vector<std::vector<Scalar>> dropout_masks;
  std::vector<std::vector<std::uint32_t>> max_winners;
  const void* params = nullptr;
  std::uint64_t params_version = 0;
};

/// A feed-forward chain of layers. `concat_channels` needs two inputs and is
/// therefore only available as a primitive op, not inside a chain.
template <typename Scalar>
class Sequential {
 public:
  Sequential() = default;
  explicit Sequential(std::vector<LayerSpec> layers);

  const std::vector<LayerSpec>& layers() const { return layers_; }

  /// In train mode dropout masks are drawn from `rng` and scaled by
  /// 1/(1-rate); infer mode is the identity. Pass a trace to enable backward.
  BasicArray<Scalar> forward(const BasicParamSet<Scalar>& params, BasicArray<Scalar> input, Mode mode,
                             numkit::RngStream& rng, ForwardTrace<Scalar>* trace = nullptr) const;

  /// Accumulates parameter gradients into `grads` (missing keys are created)
  /// and returns the gradient with respect to the forward input. Throws
  /// InvalidState when `trace` was recorded against other parameter values.
  BasicArray<Scalar> backward(const BasicParamSet<Scalar>& params, const ForwardTrace<Scalar>& trace,
                              BasicArray<Scalar> upstream, BasicParamSet<Scalar>& grads) const;

 private:
  std::vector<LayerSpec> layers_;
};

template <typename Scalar>
struct ForwardResult {
  BasicArray<Scalar> output;
  ForwardTrace<Scalar> trace;
};

template <typename Scalar>
struct BackwardResult {
  BasicParamSet<Scalar> param_grads;
  BasicArray<Scalar> input_grad;
};

template <typename Scalar>
ForwardResult<Scalar> forward(const std::vector<LayerSpec>& net, const BasicParamSet<Scalar>& params,
                              const BasicArray<Scalar>& input, Mode mode, numkit::RngStream& rng) {
  ForwardResult<Scalar> r;
  r.output = Sequential<Scalar>(net).forward(params, input, mode, rng, &r.trace);
  return r;
}

template <typename Scalar>
BackwardResult<Scalar> backward(const std::vector<LayerSpec>& net, const BasicParamSet<Scalar>& params,
                                const ForwardTrace<Scalar>& trace, const BasicArray<Scalar>& upstream) {
  BackwardResult<Scalar> r;
  r.param_grads = params.zeros_like();
  r.input_grad = Sequential<Scalar>(net).backward(params, trace, upstream, r.param_grads);
  return r;
}

}  // namespace uaai::learnkit
