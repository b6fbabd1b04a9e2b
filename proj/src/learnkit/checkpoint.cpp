// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/learnkit/checkpoint.hpp"

#include "uaai/numkit/binary_io.hpp"

namespace uaai::learnkit {

void save_checkpoint(const std::filesystem::path& path, const CheckpointFile& file) {
  nlohmann::json manifest;
  manifest["kind"] = "checkpoint";
  manifest["networks"] = nlohmann::json::object();
  for (const auto& [name, layers] : file.networks) manifest["networks"][name] = layers;
  manifest["tensors"] = nlohmann::json::array();
  std::vector<float> payload;
  payload.reserve(file.params.parameter_count());
  for (const auto& [key, tensor] : file.params.tensors()) {
    manifest["tensors"].push_back({{"name", key}, {"shape", tensor.shape()}});
    payload.insert(payload.end(), tensor.storage().begin(), tensor.storage().end());
  }
  manifest["extra"] = file.extra;
  numkit::write_container(path, kCheckpointVersion, manifest.dump(), payload);
}

CheckpointFile load_checkpoint(const std::filesystem::path& path) {
  const auto container = numkit::read_container(path, kCheckpointVersion);
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(container.manifest);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint manifest is not valid JSON: ") + e.what(), 14);
  }
  if (manifest.value("kind", std::string{}) != "checkpoint") throw FormatError("file is not a checkpoint", 14);

  CheckpointFile file;
  try {
    for (const auto& [name, layers] : manifest.at("networks").items()) {
      file.networks[name] = layers.get<std::vector<LayerSpec>>();
    }
    std::size_t cursor = 0;
    for (const auto& entry : manifest.at("tensors")) {
      const auto shape = entry.at("shape").get<numkit::Shape>();
      const std::size_t count = numkit::shape_size(shape);
      if (cursor + count > container.payload.size()) {
        throw FormatError("checkpoint payload truncated", container.payload_offset + 4 * container.payload.size());
      }
      std::vector<float> values(container.payload.begin() + static_cast<std::ptrdiff_t>(cursor),
                                container.payload.begin() + static_cast<std::ptrdiff_t>(cursor + count));
      file.params.add(entry.at("name").get<std::string>(), numkit::FloatArray(shape, std::move(values)));
      cursor += count;
    }
    if (cursor != container.payload.size()) {
      throw FormatError("checkpoint payload has trailing values", container.payload_offset + 4 * cursor);
    }
    file.extra = manifest.value("extra", nlohmann::json::object());
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint manifest malformed: ") + e.what(), 14);
  }
  for (const auto& [name, layers] : file.networks) check_params(layers, file.params);
  return file;
}

}  // namespace uaai::learnkit
