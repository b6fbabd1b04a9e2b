// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/numkit/binary_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "uaai/error.hpp"

namespace uaai::numkit {
namespace {

static_assert(std::endian::native == std::endian::little || std::endian::native == std::endian::big);

template <typename T>
void put_le(std::string& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  out.append(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T get_le(const std::string& in, std::uint64_t offset) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, in.data() + offset, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(bytes, bytes + sizeof(T));
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void write_container(const std::filesystem::path& path, std::uint16_t version, const std::string& manifest,
                     std::span<const float> payload) {
  std::string out;
  out.reserve(14 + manifest.size() + payload.size() * 4);
  out.append(kMagic, 4);
  put_le<std::uint16_t>(out, version);
  put_le<std::uint64_t>(out, manifest.size());
  out += manifest;
  for (float v : payload) put_le<float>(out, v);

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw InvalidInput("cannot open " + path.string() + " for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw InvalidInput("write failed: " + path.string());
}

Container read_container(const std::filesystem::path& path, std::uint16_t expected_version) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw InvalidInput("cannot open " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());

  if (bytes.size() < 4 || std::memcmp(bytes.data(), kMagic, 4) != 0) throw FormatError("bad magic bytes", 0);
  if (bytes.size() < 6) throw FormatError("truncated header", bytes.size());
  Container c;
  c.version = get_le<std::uint16_t>(bytes, 4);
  if (c.version != expected_version) {
    throw FormatError("unsupported format version " + std::to_string(c.version), 4);
  }
  if (bytes.size() < 14) throw FormatError("truncated manifest length", bytes.size());
  const auto manifest_len = get_le<std::uint64_t>(bytes, 6);
  if (manifest_len > bytes.size() - 14) throw FormatError("truncated manifest", bytes.size());
  c.manifest = bytes.substr(14, manifest_len);
  c.payload_offset = 14 + manifest_len;
  const std::uint64_t payload_bytes = bytes.size() - c.payload_offset;
  if (payload_bytes % 4 != 0) throw FormatError("payload is not a whole number of floats", bytes.size());
  c.payload.resize(payload_bytes / 4);
  for (std::uint64_t i = 0; i < c.payload.size(); ++i) {
    c.payload[i] = get_le<float>(bytes, c.payload_offset + 4 * i);
  }
  return c;
}

}  // namespace uaai::numkit
