// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/pipeline/model.hpp"

#include "uaai/error.hpp"

namespace uaai::pipeline {

using learnkit::LayerSpec;

void to_json(nlohmann::json& j, const ModelShape& s) {
  j = nlohmann::json{{"classes", s.classes},   {"grid", s.grid},       {"channels", s.channels},
                     {"embedding", s.embedding}, {"dropout", s.dropout}, {"spatial", s.spatial}};
}

void from_json(const nlohmann::json& j, ModelShape& s) {
  s.classes = j.at("classes").get<std::size_t>();
  s.grid = j.at("grid").get<std::size_t>();
  s.channels = j.at("channels").get<std::size_t>();
  s.embedding = j.at("embedding").get<std::size_t>();
  s.dropout = j.at("dropout").get<double>();
  s.spatial = j.at("spatial").get<bool>();
}

namespace {

std::vector<LayerSpec> trunk_layers(const ModelShape& s) {
  return {LayerSpec::conv2d("encoder.conv1", 1, s.channels, 3), LayerSpec::relu(),
          LayerSpec::conv2d("encoder.conv2", s.channels, s.channels, 3), LayerSpec::relu()};
}

std::vector<LayerSpec> tail_layers(const ModelShape& s) {
  return {LayerSpec::flatten(), LayerSpec::linear("encoder.fc", s.channels * s.grid * s.grid, s.embedding),
          LayerSpec::relu(), LayerSpec::dropout(s.dropout)};
}

std::vector<LayerSpec> head_layers(const ModelShape& s) {
  return {LayerSpec::linear("classifier.fc1", s.embedding, s.embedding), LayerSpec::relu(),
          LayerSpec::dropout(s.dropout), LayerSpec::linear("classifier.fc2", s.embedding, s.classes)};
}

}  // namespace

template <typename S>
BasicModel<S>::BasicModel(ModelShape shape)
    : shape_(shape), trunk_(trunk_layers(shape)), tail_(tail_layers(shape)), head_(head_layers(shape)) {
  if (shape.classes < 2 || shape.grid < 1 || shape.channels < 1 || shape.embedding < 1) {
    throw InvalidConfig("model dimensions out of range");
  }
  if (!(shape.dropout >= 0.0 && shape.dropout < 1.0)) throw InvalidConfig("dropout rate must lie in [0, 1)");
}

template <typename S>
std::map<std::string, std::vector<LayerSpec>> BasicModel<S>::networks() const {
  std::map<std::string, std::vector<LayerSpec>> nets{
      {"encoder", trunk_layers(shape_)}, {"embedding", tail_layers(shape_)}, {"classifier", head_layers(shape_)}};
  if (shape_.spatial) nets["attention"] = {efe::attention_conv_spec()};
  return nets;
}

template <typename S>
learnkit::BasicParamSet<S> BasicModel<S>::init(numkit::RngStream& rng) const {
  static const std::map<std::string, std::uint64_t> kInitStream{
      {"encoder", 1}, {"attention", 2}, {"embedding", 3}, {"classifier", 4}};
  learnkit::ParamSet params;
  for (const auto& [name, net] : networks()) {
    numkit::RngStream child = rng.child(kInitStream.at(name));
    learnkit::init_params(net, params, child);
  }
  if constexpr (std::is_same_v<S, float>) {
    return params;
  } else {
    return params.template cast<S>();
  }
}

template <typename S>
void BasicModel<S>::check(const learnkit::BasicParamSet<S>& params) const {
  for (const auto& [name, net] : networks()) learnkit::check_params(net, params);
}

template <typename S>
BasicArray<S> BasicModel<S>::as_images(const BasicArray<S>& frames) const {
  const std::size_t g = shape_.grid;
  if (frames.rank() == 3 && frames.dim(1) == g && frames.dim(2) == g) {
    BasicArray<S> out = frames;
    out.reshape({frames.dim(0), 1, g, g});
    return out;
  }
  if (frames.rank() == 4 && frames.dim(1) == 1 && frames.dim(2) == g && frames.dim(3) == g) return frames;
  throw ShapeError("model expects frames [N, " + std::to_string(g) + ", " + std::to_string(g) + "], got " +
                   numkit::shape_string(frames.shape()));
}

template <typename S>
BasicArray<S> BasicModel<S>::embed(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& frames, Mode mode,
                                   numkit::RngStream& rng, ModelTrace<S>* trace) const {
  BasicArray<S> x = trunk_.forward(params, as_images(frames), mode, rng, trace ? &trace->trunk : nullptr);
  if (shape_.spatial) {
    x = efe::spatial_attention_forward(x, params, trace ? &trace->attention : nullptr).reweighted;
  }
  return tail_.forward(params, std::move(x), mode, rng, trace ? &trace->tail : nullptr);
}

template <typename S>
BasicArray<S> BasicModel<S>::classify(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& embeddings,
                                      Mode mode, numkit::RngStream& rng, learnkit::ForwardTrace<S>* trace) const {
  return head_.forward(params, embeddings, mode, rng, trace);
}

template <typename S>
BasicArray<S> BasicModel<S>::frame_logits(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& frames,
                                          Mode mode, numkit::RngStream& rng) const {
  return classify(params, embed(params, frames, mode, rng), mode, rng);
}

template <typename S>
BasicArray<S> BasicModel<S>::sequence_logits(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& frames,
                                             std::size_t frames_per_sequence, Mode mode, numkit::RngStream& rng,
                                             ModelTrace<S>* trace) const {
  const std::size_t n = frames.dim(0);
  if (frames_per_sequence == 0 || n % frames_per_sequence != 0) {
    throw ShapeError(std::to_string(n) + " frames do not split into sequences of " +
                     std::to_string(frames_per_sequence));
  }
  const std::size_t seqs = n / frames_per_sequence;
  const std::size_t d = shape_.embedding;
  const BasicArray<S> emb = embed(params, frames, mode, rng, trace);
  BasicArray<S> pooled({seqs, d});
  const S inv = S(1) / static_cast<S>(frames_per_sequence);
  for (std::size_t s = 0; s < seqs; ++s) {
    for (std::size_t f = 0; f < frames_per_sequence; ++f) {
      const S* row = emb.data() + (s * frames_per_sequence + f) * d;
      for (std::size_t c = 0; c < d; ++c) pooled.data()[s * d + c] += row[c] * inv;
    }
  }
  if (trace) {
    trace->sequences = seqs;
    trace->frames_per_sequence = frames_per_sequence;
  }
  return classify(params, pooled, mode, rng, trace ? &trace->head : nullptr);
}

template <typename S>
void BasicModel<S>::backward(const learnkit::BasicParamSet<S>& params, const ModelTrace<S>& trace,
                             const BasicArray<S>& grad_logits, learnkit::BasicParamSet<S>& grads) const {
  const BasicArray<S> dpooled = head_.backward(params, trace.head, grad_logits, grads);
  const std::size_t per = trace.frames_per_sequence;
  const std::size_t d = shape_.embedding;
  BasicArray<S> demb({trace.sequences * per, d});
  const S inv = S(1) / static_cast<S>(per);
  for (std::size_t s = 0; s < trace.sequences; ++s) {
    for (std::size_t f = 0; f < per; ++f) {
      S* row = demb.data() + (s * per + f) * d;
      for (std::size_t c = 0; c < d; ++c) row[c] = dpooled.data()[s * d + c] * inv;
    }
  }
  BasicArray<S> dx = tail_.backward(params, trace.tail, std::move(demb), grads);
  if (shape_.spatial) dx = efe::spatial_attention_backward(params, trace.attention, dx, grads);
  trunk_.backward(params, trace.trunk, std::move(dx), grads);
}

template <typename S>
efe::AttentionOutput<S> BasicModel<S>::encode(const learnkit::BasicParamSet<S>& params,
                                              const BasicArray<S>& frames) const {
  numkit::RngStream unused(0, 0);
  BasicArray<S> features = trunk_.forward(params, as_images(frames), Mode::infer, unused);
  if (shape_.spatial) return efe::spatial_attention_forward(features, params);
  efe::AttentionOutput<S> out;
  out.mask = BasicArray<S>({features.dim(0), 1, features.dim(2), features.dim(3)}, S(1));
  out.reweighted = std::move(features);
  return out;
}

template <typename S>
BasicArray<S> BasicModel<S>::embed_features(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& features,
                                            Mode mode, numkit::RngStream& rng) const {
  return tail_.forward(params, features, mode, rng);
}

template class BasicModel<float>;
template class BasicModel<double>;

}  // namespace uaai::pipeline
