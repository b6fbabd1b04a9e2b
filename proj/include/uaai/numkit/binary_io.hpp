// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace uaai::numkit {

/// On-disk layout shared by checkpoints and datasets:
///   "UAAI" | u16 version | u64 manifest length | manifest JSON | f32 payload
/// All integers and floats little-endian.
struct Container {
  std::uint16_t version = 0;
  std::string manifest;
  std::vector<float> payload;
  std::uint64_t payload_offset = 0;
};

inline constexpr char kMagic[4] = {'U', 'A', 'A', 'I'};

void write_container(const std::filesystem::path& path, std::uint16_t version, const std::string& manifest,
                     std::span<const float> payload);

/// Throws FormatError (with byte offset) on bad magic, unsupported version or
/// truncation. Nothing is returned on failure.
Container read_container(const std::filesystem::path& path, std::uint16_t expected_version);

}  // namespace uaai::numkit
