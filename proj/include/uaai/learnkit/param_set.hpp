// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "uaai/learnkit/layer.hpp"
#include "uaai/numkit/array.hpp"
#include "uaai/numkit/rng.hpp"

namespace uaai::learnkit {

using numkit::BasicArray;

/// Named parameter tensors. Every mutable access bumps `version()`, which is
/// how forward traces detect that the parameters moved underneath them.
template <typename Scalar>
class BasicParamSet {
 public:
  using Tensors = std::map<std::string, BasicArray<Scalar>>;

  void add(const std::string& key, BasicArray<Scalar> tensor) {
    tensors_[key] = std::move(tensor);
    ++version_;
  }
  bool contains(const std::string& key) const { return tensors_.count(key) != 0; }

  const BasicArray<Scalar>& at(const std::string& key) const {
    auto it = tensors_.find(key);
    if (it == tensors_.end()) throw InvalidInput("missing parameter '" + key + "'");
    return it->second;
  }
  BasicArray<Scalar>& mutable_at(const std::string& key) {
    auto it = tensors_.find(key);
    if (it == tensors_.end()) throw InvalidInput("missing parameter '" + key + "'");
    ++version_;
    return it->second;
  }

  const Tensors& tensors() const { return tensors_; }
  Tensors& mutable_tensors() {
    ++version_;
    return tensors_;
  }
  std::uint64_t version() const { return version_; }
  std::size_t parameter_count() const {
    std::size_t n = 0;
    for (const auto& [key, t] : tensors_) n += t.size();
    return n;
  }

  BasicParamSet zeros_like() const {
    BasicParamSet out;
    for (const auto& [key, t] : tensors_) out.tensors_.emplace(key, BasicArray<Scalar>(t.shape()));
    return out;
  }

  template <typename Other>
  BasicParamSet<Other> cast() const {
    BasicParamSet<Other> out;
    for (const auto& [key, t] : tensors_) out.add(key, t.template cast<Other>());
    return out;
  }

  /// Compares tensors only; versions are bookkeeping.
  bool operator==(const BasicParamSet& other) const { return tensors_ == other.tensors_; }

 private:
  Tensors tensors_;
  std::uint64_t version_ = 0;
};

using ParamSet = BasicParamSet<float>;

/// Expected weight and bias shapes of a parameterized layer.
numkit::Shape weight_shape(const LayerSpec& spec);
numkit::Shape bias_shape(const LayerSpec& spec);

/// Uniform(+-sqrt(6 / (fan_in + fan_out))) weights and zero biases for every
/// parameterized layer in `net`.
void init_params(const std::vector<LayerSpec>& net, ParamSet& params, numkit::RngStream& rng);

/// Throws ShapeError when a layer's tensors are missing or mis-shaped.
template <typename Scalar>
void check_params(const std::vector<LayerSpec>& net, const BasicParamSet<Scalar>& params) {
  for (const auto& spec : net) {
    if (!spec.has_params()) continue;
    if (!params.contains(spec.weight_key()) || !params.contains(spec.bias_key())) {
      throw ShapeError("layer '" + spec.name + "' has no parameters");
    }
    if (params.at(spec.weight_key()).shape() != weight_shape(spec) ||
        params.at(spec.bias_key()).shape() != bias_shape(spec)) {
      throw ShapeError("layer '" + spec.name + "' parameter shape mismatch");
    }
  }
}

}  // namespace uaai::learnkit
