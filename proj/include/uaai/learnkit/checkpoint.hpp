// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "uaai/learnkit/layer.hpp"
#include "uaai/learnkit/param_set.hpp"

namespace uaai::learnkit {

inline constexpr std::uint16_t kCheckpointVersion = 1;

/// Parameters plus the layer specs they belong to. `extra` carries caller
/// metadata (training config, confusion snapshot, epoch) verbatim.
struct CheckpointFile {
  std::map<std::string, std::vector<LayerSpec>> networks;
  ParamSet params;
  nlohmann::json extra = nlohmann::json::object();
};

/// Manifest JSON lists the networks and the tensor order; the payload holds
/// every tensor as little-endian f32 in that order.
void save_checkpoint(const std::filesystem::path& path, const CheckpointFile& file);
CheckpointFile load_checkpoint(const std::filesystem::path& path);

}  // namespace uaai::learnkit
