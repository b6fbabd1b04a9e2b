// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/learnkit/network.hpp"

#include "uaai/learnkit/ops.hpp"

namespace uaai::learnkit {
namespace {

std::string layer_label(const LayerSpec& spec, std::size_t index) {
  std::string label = "layer " + std::to_string(index) + " (" + to_string(spec.kind);
  if (!spec.name.empty()) label += " '" + spec.name + "'";
  return label + ")";
}

template <typename S>
BasicArray<S>& grad_slot(BasicParamSet<S>& grads, const std::string& key, const numkit::Shape& shape) {
  if (!grads.contains(key)) grads.add(key, BasicArray<S>(shape));
  return grads.mutable_at(key);
}

}  // namespace

template <typename S>
Sequential<S>::Sequential(std::vector<LayerSpec> layers) : layers_(std::move(layers)) {
  for (const auto& spec : layers_) {
    spec.validate();
    if (spec.kind == LayerKind::concat_channels) {
      throw InvalidInput("concat_channels takes two inputs and cannot appear in a sequential chain");
    }
  }
}

template <typename S>
BasicArray<S> Sequential<S>::forward(const BasicParamSet<S>& params, BasicArray<S> x, Mode mode,
                                     numkit::RngStream& rng, ForwardTrace<S>* trace) const {
  if (trace) {
    *trace = ForwardTrace<S>{};
    trace->mode = mode;
    trace->params = &params;
    trace->params_version = params.version();
    trace->inputs.resize(layers_.size());
    trace->outputs.resize(layers_.size());
    trace->dropout_masks.resize(layers_.size());
    trace->max_winners.resize(layers_.size());
  }
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const LayerSpec& spec = layers_[l];
    try {
      switch (spec.kind) {
        case LayerKind::linear: {
          auto y = ops::linear_forward(x, params.at(spec.weight_key()), params.at(spec.bias_key()));
          if (trace) trace->inputs[l] = std::move(x);
          x = std::move(y);
          break;
        }
        case LayerKind::conv2d: {
          if (x.rank() != 4 || x.dim(1) != spec.in_channels) {
            throw ShapeError("expected [N," + std::to_string(spec.in_channels) + ",H,W], got " +
                             numkit::shape_string(x.shape()));
          }
          auto y = ops::conv2d_forward(x, params.at(spec.weight_key()), params.at(spec.bias_key()), spec.padding());
          if (trace) trace->inputs[l] = std::move(x);
          x = std::move(y);
          break;
        }
        case LayerKind::relu:
          ops::relu_forward(x);
          if (trace) trace->outputs[l] = x;
          break;
        case LayerKind::sigmoid:
          ops::sigmoid_forward(x);
          if (trace) trace->outputs[l] = x;
          break;
        case LayerKind::dropout:
          if (mode == Mode::train && spec.rate > 0.0) {
            const S keep_scale = static_cast<S>(1.0 / (1.0 - spec.rate));
            std::vector<S> mask(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
              mask[i] = rng.uniform() >= spec.rate ? keep_scale : S{0};
              x[i] *= mask[i];
            }
            if (trace) trace->dropout_masks[l] = std::move(mask);
          }
          break;
        case LayerKind::channel_avg_pool: {
          auto y = ops::channel_avg_pool_forward(x);
          if (trace) trace->inputs[l] = BasicArray<S>(x.shape());
          x = std::move(y);
          break;
        }
        case LayerKind::channel_max_pool: {
          auto y = ops::channel_max_pool_forward(x, trace ? &trace->max_winners[l] : nullptr);
          if (trace) trace->inputs[l] = BasicArray<S>(x.shape());
          x = std::move(y);
          break;
        }
        case LayerKind::flatten: {
          if (x.rank() < 1) throw ShapeError("flatten needs a batch axis");
          if (trace) trace->inputs[l] = BasicArray<S>(x.shape());
          const std::size_t n = x.dim(0);
          x.reshape({n, n == 0 ? 0 : x.size() / n});
          break;
        }
        case LayerKind::concat_channels:
          throw InvalidInput("concat_channels inside a chain");
      }
    } catch (const ShapeError& e) {
      throw ShapeError(layer_label(spec, l) + ": " + e.what());
    }
  }
  return x;
}

template <typename S>
BasicArray<S> Sequential<S>::backward(const BasicParamSet<S>& params, const ForwardTrace<S>& trace,
                                      BasicArray<S> dy, BasicParamSet<S>& grads) const {
  if (trace.params != &params || trace.params_version != params.version() ||
      trace.inputs.size() != layers_.size()) {
    throw InvalidState("backward called with a stale forward trace");
  }
  for (std::size_t l = layers_.size(); l-- > 0;) {
    const LayerSpec& spec = layers_[l];
    switch (spec.kind) {
      case LayerKind::linear: {
        const auto& w = params.at(spec.weight_key());
        auto& dw = grad_slot(grads, spec.weight_key(), w.shape());
        auto& db = grad_slot(grads, spec.bias_key(), bias_shape(spec));
        dy = ops::linear_backward(trace.inputs[l], w, dy, dw, db);
        break;
      }
      case LayerKind::conv2d: {
        const auto& w = params.at(spec.weight_key());
        auto& dw = grad_slot(grads, spec.weight_key(), w.shape());
        auto& db = grad_slot(grads, spec.bias_key(), bias_shape(spec));
        dy = ops::conv2d_backward(trace.inputs[l], w, dy, spec.padding(), dw, db);
        break;
      }
      case LayerKind::relu:
        ops::relu_backward(trace.outputs[l], dy);
        break;
      case LayerKind::sigmoid:
        ops::sigmoid_backward(trace.outputs[l], dy);
        break;
      case LayerKind::dropout: {
        const auto& mask = trace.dropout_masks[l];
        if (!mask.empty()) {
          for (std::size_t i = 0; i < dy.size(); ++i) dy[i] *= mask[i];
        }
        break;
      }
      case LayerKind::channel_avg_pool:
        dy = ops::channel_avg_pool_backward(trace.inputs[l].shape(), dy);
        break;
      case LayerKind::channel_max_pool:
        dy = ops::channel_max_pool_backward(trace.inputs[l].shape(), trace.max_winners[l], dy);
        break;
      case LayerKind::flatten:
        dy.reshape(trace.inputs[l].shape());
        break;
      case LayerKind::concat_channels:
        throw InvalidInput("concat_channels inside a chain");
    }
  }
  return dy;
}

template class Sequential<float>;
template class Sequential<double>;

}  // namespace uaai::learnkit
