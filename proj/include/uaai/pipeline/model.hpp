// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "uaai/efe/spatial.hpp"
#include "uaai/learnkit/network.hpp"

namespace uaai::pipeline {

using learnkit::Mode;
using numkit::BasicArray;

struct ModelShape {
  std::size_t classes = 8;
  std::size_t grid = 16;
  std::size_t channels = 8;
  std::size_t embedding = 32;
  double dropout = 0.3;
  bool spatial = true;

  bool operator==(const ModelShape&) const = default;
};

void to_json(nlohmann::json& j, const ModelShape& s);
void from_json(const nlohmann::json& j, ModelShape& s);

template <typename S>
struct ModelTrace {
  learnkit::ForwardTrace<S> trunk;
  efe::AttentionTrace<S> attention;
  learnkit::ForwardTrace<S> tail;
  learnkit::ForwardTrace<S> head;
  std::size_t sequences = 0;
  std::size_t frames_per_sequence = 0;
};

/// Frame encoder (two 3x3 convs, optional spatial attention, dense embedding)
/// followed by one classifier shared between single frames and mean-pooled
/// sequences. Frames enter as [N, G, G] or [N, 1, G, G].
template <typename S>
class BasicModel {
 public:
  explicit BasicModel(ModelShape shape);

  const ModelShape& shape() const { return shape_; }
  /// Layer chains keyed "encoder", "attention", "embedding", "classifier".
  std::map<std::string, std::vector<learnkit::LayerSpec>> networks() const;
  learnkit::BasicParamSet<S> init(numkit::RngStream& rng) const;
  void check(const learnkit::BasicParamSet<S>& params) const;

  /// Per-frame embeddings [N, embedding].
  BasicArray<S> embed(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& frames, Mode mode,
                      numkit::RngStream& rng, ModelTrace<S>* trace = nullptr) const;
  /// Classifier logits for any [M, embedding] batch.
  BasicArray<S> classify(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& embeddings, Mode mode,
                         numkit::RngStream& rng, learnkit::ForwardTrace<S>* trace = nullptr) const;
  /// Per-frame logits [N, K].
  BasicArray<S> frame_logits(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& frames, Mode mode,
                             numkit::RngStream& rng) const;
  /// `frames` holds frames_per_sequence consecutive frames per sequence;
  /// returns [frames / frames_per_sequence, K] logits of the pooled embeddings.
  BasicArray<S> sequence_logits(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& frames,
                                std::size_t frames_per_sequence, Mode mode, numkit::RngStream& rng,
                                ModelTrace<S>* trace = nullptr) const;
  /// Backward of sequence_logits; parameter gradients accumulate into `grads`.
  void backward(const learnkit::BasicParamSet<S>& params, const ModelTrace<S>& trace,
                const BasicArray<S>& grad_logits, learnkit::BasicParamSet<S>& grads) const;

  /// Infer-mode encoder features after attention [N, C, G, G] and the mask
  /// applied to them (all ones when attention is disabled).
  efe::AttentionOutput<S> encode(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& frames) const;
  /// Embedding of already encoded features.
  BasicArray<S> embed_features(const learnkit::BasicParamSet<S>& params, const BasicArray<S>& features, Mode mode,
                               numkit::RngStream& rng) const;

 private:
  BasicArray<S> as_images(const BasicArray<S>& frames) const;

  ModelShape shape_;
  learnkit::Sequential<S> trunk_;
  learnkit::Sequential<S> tail_;
  learnkit::Sequential<S> head_;
};

using Model = BasicModel<float>;

}  // namespace uaai::pipeline
