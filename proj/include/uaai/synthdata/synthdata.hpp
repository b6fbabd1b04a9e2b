// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "uaai/numkit/array.hpp"

namespace uaai::synthdata {

inline constexpr std::uint16_t kDatasetVersion = 1;

struct GeneratorConfig {
  std::size_t num_classes = 8;
  std::size_t train_per_class = 100;
  std::size_t val_per_class = 50;
  std::size_t test_per_class = 50;
  std::size_t frames = 32;
  std::size_t grid = 16;
  std::size_t signal_frames = 4;
  std::size_t patch_size = 4;
  double snr = 3.0;
  double label_noise = 0.1;
  std::size_t num_subjects = 10;
  double subject_gain_min = 0.8;
  double subject_gain_max = 1.2;
  double subject_offset_min = -0.5;
  double subject_offset_max = 0.5;
  std::uint64_t seed = 2024;

  /// Throws InvalidConfig.
  void validate() const;
};

void to_json(nlohmann::json& j, const GeneratorConfig& cfg);
/// Missing keys keep their defaults; unknown keys are rejected.
void from_json(const nlohmann::json& j, GeneratorConfig& cfg);

struct SequenceSample {
  std::size_t id = 0;
  /// [frames, grid, grid]
  numkit::FloatArray frames;
  std::size_t label = 0;
  /// Label before noise injection.
  std::size_t clean_label = 0;
  std::size_t subject = 0;
  std::vector<std::size_t> planted_frames;
  std::pair<std::size_t, std::size_t> planted_patch{0, 0};
  bool noisy_label = false;

  bool operator==(const SequenceSample&) const = default;
};

struct Split {
  std::string name;
  std::vector<SequenceSample> samples;

  bool operator==(const Split&) const = default;
};

struct Dataset {
  GeneratorConfig config;
  std::vector<Split> splits;

  /// Throws InvalidInput for unknown split names.
  const Split& split(const std::string& name) const;
  bool has_split(const std::string& name) const;
};

/// Per-class patch pattern (entries +-1) and its top-left location, fixed by the seed.
struct ClassSignal {
  std::vector<float> pattern;
  std::size_t row = 0;
  std::size_t col = 0;
};
std::vector<ClassSignal> class_signals(const GeneratorConfig& cfg);

/// train/val/test splits with disjoint subjects; label noise on train only.
Dataset generate_dataset(const GeneratorConfig& cfg);

void write_dataset(const Dataset& dataset, const std::filesystem::path& path);
/// Throws FormatError on bad magic, version, manifest or payload size.
Dataset read_dataset(const std::filesystem::path& path);

/// Standard dataset file name inside a data directory.
std::filesystem::path dataset_file(const std::filesystem::path& dir);

}  // namespace uaai::synthdata
