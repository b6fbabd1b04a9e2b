// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/efe/spatial.hpp"

#include "uaai/error.hpp"
#include "uaai/learnkit/ops.hpp"

namespace uaai::efe {

namespace ops = learnkit::ops;

learnkit::LayerSpec attention_conv_spec(const std::string& name) {
  return learnkit::LayerSpec::conv2d(name, 2, 1, kAttentionKernel);
}

template <typename S>
AttentionOutput<S> spatial_attention_forward(const BasicArray<S>& features, const learnkit::BasicParamSet<S>& params,
                                             AttentionTrace<S>* trace, const std::string& name) {
  BasicArray<S> f = features;
  if (f.rank() == 3) f.reshape({1, f.dim(0), f.dim(1), f.dim(2)});
  if (f.rank() != 4 || f.dim(1) == 0 || f.dim(2) == 0 || f.dim(3) == 0) {
    throw ShapeError("spatial attention expects [N,C,H,W] features, got " + numkit::shape_string(features.shape()));
  }
  const auto spec = attention_conv_spec(name);
  learnkit::check_params(std::vector{spec}, params);

  std::vector<std::uint32_t> winners;
  auto pooled = ops::concat_channels(ops::channel_avg_pool_forward(f), ops::channel_max_pool_forward(f, &winners));
  auto mask = ops::conv2d_forward(pooled, params.at(spec.weight_key()), params.at(spec.bias_key()), spec.padding());
  ops::sigmoid_forward(mask);

  const std::size_t n = f.dim(0), c = f.dim(1), hw = f.dim(2) * f.dim(3);
  BasicArray<S> out(f.shape());
  for (std::size_t b = 0; b < n; ++b) {
    for (std::size_t ch = 0; ch < c; ++ch) {
      const S* src = f.data() + (b * c + ch) * hw;
      const S* m = mask.data() + b * hw;
      S* dst = out.data() + (b * c + ch) * hw;
      for (std::size_t i = 0; i < hw; ++i) dst[i] = m[i] * src[i];
    }
  }
  if (trace) {
    trace->features = f;
    trace->pooled = std::move(pooled);
    trace->max_winners = std::move(winners);
    trace->mask = mask;
    trace->params = &params;
    trace->params_version = params.version();
  }
  if (features.rank() == 3) out.reshape(features.shape());
  return {std::move(mask), std::move(out)};
}

template <typename S>
BasicArray<S> spatial_attention_backward(const learnkit::BasicParamSet<S>& params, const AttentionTrace<S>& trace,
                                         const BasicArray<S>& upstream, learnkit::BasicParamSet<S>& grads,
                                         const BasicArray<S>* mask_upstream, const std::string& name) {
  if (trace.params != &params || trace.params_version != params.version()) {
    throw InvalidState("spatial attention backward called with a stale trace");
  }
  const auto& f = trace.features;
  if (upstream.size() != f.size()) throw ShapeError("spatial attention backward: upstream shape mismatch");
  const std::size_t n = f.dim(0), c = f.dim(1), hw = f.dim(2) * f.dim(3);

  BasicArray<S> df(f.shape());
  BasicArray<S> dmask(trace.mask.shape());
  for (std::size_t b = 0; b < n; ++b) {
    const S* m = trace.mask.data() + b * hw;
    S* dm = dmask.data() + b * hw;
    for (std::size_t ch = 0; ch < c; ++ch) {
      const std::size_t base = (b * c + ch) * hw;
      for (std::size_t i = 0; i < hw; ++i) {
        df[base + i] = m[i] * upstream[base + i];
        dm[i] += f[base + i] * upstream[base + i];
      }
    }
  }
  if (mask_upstream) {
    for (std::size_t i = 0; i < dmask.size(); ++i) dmask[i] += (*mask_upstream)[i];
  }
  ops::sigmoid_backward(trace.mask, dmask);

  const auto spec = attention_conv_spec(name);
  if (!grads.contains(spec.weight_key())) grads.add(spec.weight_key(), BasicArray<S>(learnkit::weight_shape(spec)));
  if (!grads.contains(spec.bias_key())) grads.add(spec.bias_key(), BasicArray<S>(learnkit::bias_shape(spec)));
  auto dpooled = ops::conv2d_backward(trace.pooled, params.at(spec.weight_key()), dmask, spec.padding(),
                                      grads.mutable_at(spec.weight_key()), grads.mutable_at(spec.bias_key()));
  auto [davg, dmax] = ops::split_channels(dpooled, 1);
  const auto from_avg = ops::channel_avg_pool_backward(f.shape(), davg);
  const auto from_max = ops::channel_max_pool_backward(f.shape(), trace.max_winners, dmax);
  for (std::size_t i = 0; i < df.size(); ++i) df[i] += from_avg[i] + from_max[i];
  return df;
}

double spatial_efe(const numkit::NumArray& per_location_g, const numkit::NumArray& mask) {
  if (per_location_g.size() != mask.size()) throw ShapeError("spatial_efe: field and mask sizes differ");
  double total = 0.0;
  for (std::size_t i = 0; i < mask.size(); ++i) total += mask[i] * per_location_g[i];
  return total;
}

template AttentionOutput<float> spatial_attention_forward(const BasicArray<float>&, const learnkit::BasicParamSet<float>&,
                                                          AttentionTrace<float>*, const std::string&);
template AttentionOutput<double> spatial_attention_forward(const BasicArray<double>&,
                                                           const learnkit::BasicParamSet<double>&,
                                                           AttentionTrace<double>*, const std::string&);
template BasicArray<float> spatial_attention_backward(const learnkit::BasicParamSet<float>&, const AttentionTrace<float>&,
                                                      const BasicArray<float>&, learnkit::BasicParamSet<float>&,
                                                      const BasicArray<float>*, const std::string&);
template BasicArray<double> spatial_attention_backward(const learnkit::BasicParamSet<double>&,
                                                       const AttentionTrace<double>&, const BasicArray<double>&,
                                                       learnkit::BasicParamSet<double>&, const BasicArray<double>*,
                                                       const std::string&);

}  // namespace uaai::efe
