// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/synthdata/synthdata.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "uaai/error.hpp"
#include "uaai/numkit/binary_io.hpp"
#include "uaai/numkit/rng.hpp"

namespace uaai::synthdata {
namespace {

constexpr std::uint64_t kSignalStream = 1;
constexpr std::uint64_t kSubjectStream = 2;
constexpr std::uint64_t kSampleStream = 3;

struct SubjectTransform {
  double gain;
  double offset;
};

}  // namespace

void GeneratorConfig::validate() const {
  if (num_classes < 2) throw InvalidConfig("num_classes must be at least 2");
  if (frames < 1) throw InvalidConfig("frames must be positive");
  if (signal_frames < 1 || signal_frames > frames) throw InvalidConfig("signal_frames must lie in [1, frames]");
  if (grid < 1 || patch_size < 1 || patch_size > grid) throw InvalidConfig("patch must fit in the grid");
  if (!(label_noise >= 0.0 && label_noise <= 1.0)) throw InvalidConfig("label_noise must lie in [0,1]");
  if (!(snr >= 0.0)) throw InvalidConfig("snr must be nonnegative");
  if (num_subjects < 3) throw InvalidConfig("num_subjects must be at least 3 (one per split)");
  if (train_per_class < 1 || val_per_class < 1 || test_per_class < 1) {
    throw InvalidConfig("every split needs at least one sequence per class");
  }
  if (!(subject_gain_min > 0.0 && subject_gain_min <= subject_gain_max)) throw InvalidConfig("bad subject gain range");
  if (!(subject_offset_min <= subject_offset_max)) throw InvalidConfig("bad subject offset range");
}

void to_json(nlohmann::json& j, const GeneratorConfig& c) {
  j = nlohmann::json{{"num_classes", c.num_classes},
                     {"train_per_class", c.train_per_class},
                     {"val_per_class", c.val_per_class},
                     {"test_per_class", c.test_per_class},
                     {"frames", c.frames},
                     {"grid", c.grid},
                     {"signal_frames", c.signal_frames},
                     {"patch_size", c.patch_size},
                     {"snr", c.snr},
                     {"label_noise", c.label_noise},
                     {"num_subjects", c.num_subjects},
                     {"subject_gain_min", c.subject_gain_min},
                     {"subject_gain_max", c.subject_gain_max},
                     {"subject_offset_min", c.subject_offset_min},
                     {"subject_offset_max", c.subject_offset_max},
                     {"seed", c.seed}};
}

void from_json(const nlohmann::json& j, GeneratorConfig& c) {
  nlohmann::json defaults = c;
  for (const auto& [key, value] : j.items()) {
    if (!defaults.contains(key)) throw InvalidConfig("unknown generator config key '" + key + "'");
    defaults[key] = value;
  }
  try {
    c.num_classes = defaults.at("num_classes").get<std::size_t>();
    c.train_per_class = defaults.at("train_per_class").get<std::size_t>();
    c.val_per_class = defaults.at("val_per_class").get<std::size_t>();
    c.test_per_class = defaults.at("test_per_class").get<std::size_t>();
    c.frames = defaults.at("frames").get<std::size_t>();
    c.grid = defaults.at("grid").get<std::size_t>();
    c.signal_frames = defaults.at("signal_frames").get<std::size_t>();
    c.patch_size = defaults.at("patch_size").get<std::size_t>();
    c.snr = defaults.at("snr").get<double>();
    c.label_noise = defaults.at("label_noise").get<double>();
    c.num_subjects = defaults.at("num_subjects").get<std::size_t>();
    c.subject_gain_min = defaults.at("subject_gain_min").get<double>();
    c.subject_gain_max = defaults.at("subject_gain_max").get<double>();
    c.subject_offset_min = defaults.at("subject_offset_min").get<double>();
    c.subject_offset_max = defaults.at("subject_offset_max").get<double>();
    c.seed = defaults.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig(std::string("generator config: ") + e.what());
  }
}

const Split& Dataset::split(const std::string& name) const {
  for (const auto& s : splits) {
    if (s.name == name) return s;
  }
  throw InvalidInput("dataset has no split '" + name + "'");
}

bool Dataset::has_split(const std::string& name) const {
  return std::any_of(splits.begin(), splits.end(), [&](const Split& s) { return s.name == name; });
}

std::vector<ClassSignal> class_signals(const GeneratorConfig& cfg) {
  numkit::RngStream rng(cfg.seed, kSignalStream);
  std::vector<ClassSignal> signals(cfg.num_classes);
  const std::size_t span = cfg.grid - cfg.patch_size + 1;
  for (auto& s : signals) {
    s.pattern.resize(cfg.patch_size * cfg.patch_size);
    for (float& v : s.pattern) v = rng.uniform() < 0.5 ? -1.0f : 1.0f;
    s.row = rng.index(span);
    s.col = rng.index(span);
  }
  return signals;
}

Dataset generate_dataset(const GeneratorConfig& cfg) {
  cfg.validate();
  const auto signals = class_signals(cfg);

  numkit::RngStream subject_rng(cfg.seed, kSubjectStream);
  std::vector<SubjectTransform> subjects(cfg.num_subjects);
  for (auto& s : subjects) {
    s.gain = subject_rng.uniform(cfg.subject_gain_min, cfg.subject_gain_max);
    s.offset = subject_rng.uniform(cfg.subject_offset_min, cfg.subject_offset_max);
  }
  // Disjoint subject pools: one fifth each for val and test, the rest for train.
  const std::size_t held_out = std::max<std::size_t>(1, cfg.num_subjects / 5);
  const std::size_t train_subjects = cfg.num_subjects - 2 * held_out;
  const std::vector<std::pair<std::string, std::size_t>> layout = {
      {"train", cfg.train_per_class}, {"val", cfg.val_per_class}, {"test", cfg.test_per_class}};
  const std::size_t pool_begin[3] = {0, train_subjects, train_subjects + held_out};
  const std::size_t pool_size[3] = {train_subjects, held_out, held_out};

  const std::size_t g = cfg.grid, p = cfg.patch_size, area = g * g;
  Dataset ds;
  ds.config = cfg;
  for (std::size_t si = 0; si < layout.size(); ++si) {
    Split split{layout[si].first, {}};
    const std::size_t count = layout[si].second * cfg.num_classes;
    split.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
      numkit::RngStream rng = numkit::RngStream(cfg.seed, kSampleStream).child(si, i);
      SequenceSample s;
      s.id = i;
      s.label = s.clean_label = i % cfg.num_classes;
      s.subject = pool_begin[si] + (i / cfg.num_classes) % pool_size[si];
      s.frames = numkit::FloatArray({cfg.frames, g, g});
      for (float& v : s.frames.values()) v = static_cast<float>(rng.normal());

      std::vector<std::size_t> order(cfg.frames);
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t k = 0; k < cfg.signal_frames; ++k) {
        std::swap(order[k], order[k + rng.index(cfg.frames - k)]);
      }
      s.planted_frames.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(cfg.signal_frames));
      std::sort(s.planted_frames.begin(), s.planted_frames.end());

      const auto& sig = signals[s.label];
      s.planted_patch = {sig.row, sig.col};
      for (std::size_t t : s.planted_frames) {
        float* frame = s.frames.data() + t * area;
        for (std::size_t r = 0; r < p; ++r) {
          for (std::size_t c = 0; c < p; ++c) {
            frame[(sig.row + r) * g + sig.col + c] += static_cast<float>(cfg.snr) * sig.pattern[r * p + c];
          }
        }
      }
      const auto& subj = subjects[s.subject];
      for (float& v : s.frames.values()) v = static_cast<float>(subj.gain * v + subj.offset);

      if (si == 0 && cfg.label_noise > 0.0 && rng.uniform() < cfg.label_noise) {
        const std::size_t shift = 1 + rng.index(cfg.num_classes - 1);
        s.label = (s.clean_label + shift) % cfg.num_classes;
        s.noisy_label = true;
      }
      split.samples.push_back(std::move(s));
    }
    ds.splits.push_back(std::move(split));
  }
  return ds;
}

void write_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  nlohmann::json manifest;
  manifest["version"] = kDatasetVersion;
  manifest["config"] = dataset.config;
  manifest["splits"] = nlohmann::json::array();
  std::vector<float> payload;
  for (const auto& split : dataset.splits) {
    nlohmann::json records = nlohmann::json::array();
    for (const auto& s : split.samples) {
      records.push_back({{"offset", payload.size() * sizeof(float)},
                         {"id", s.id},
                         {"label", s.label},
                         {"clean_label", s.clean_label},
                         {"subject", s.subject},
                         {"noisy", s.noisy_label},
                         {"planted_frames", s.planted_frames},
                         {"planted_patch", {s.planted_patch.first, s.planted_patch.second}},
                         {"shape", s.frames.shape()}});
      payload.insert(payload.end(), s.frames.storage().begin(), s.frames.storage().end());
    }
    manifest["splits"].push_back({{"name", split.name}, {"samples", std::move(records)}});
  }
  numkit::write_container(path, kDatasetVersion, manifest.dump(), payload);
}

Dataset read_dataset(const std::filesystem::path& path) {
  const auto container = numkit::read_container(path, kDatasetVersion);
  const std::uint64_t manifest_at = 14;
  Dataset ds;
  try {
    const auto manifest = nlohmann::json::parse(container.manifest);
    if (manifest.at("version").get<std::uint16_t>() != kDatasetVersion) {
      throw FormatError("manifest version mismatch", manifest_at);
    }
    try {
      ds.config = manifest.at("config").get<GeneratorConfig>();
    } catch (const InvalidConfig& e) {
      throw FormatError(std::string("manifest config invalid: ") + e.what(), manifest_at);
    }
    std::uint64_t expected_offset = 0;
    for (const auto& sj : manifest.at("splits")) {
      Split split{sj.at("name").get<std::string>(), {}};
      for (const auto& r : sj.at("samples")) {
        const auto offset = r.at("offset").get<std::uint64_t>();
        if (offset != expected_offset) {
          throw FormatError("sample offset " + std::to_string(offset) + " breaks payload order",
                            container.payload_offset + offset);
        }
        SequenceSample s;
        s.id = r.at("id").get<std::size_t>();
        s.label = r.at("label").get<std::size_t>();
        s.clean_label = r.at("clean_label").get<std::size_t>();
        s.subject = r.at("subject").get<std::size_t>();
        s.noisy_label = r.at("noisy").get<bool>();
        s.planted_frames = r.at("planted_frames").get<std::vector<std::size_t>>();
        const auto patch = r.at("planted_patch").get<std::vector<std::size_t>>();
        if (patch.size() != 2) throw FormatError("planted_patch must have two entries", manifest_at);
        s.planted_patch = {patch[0], patch[1]};
        const auto shape = r.at("shape").get<numkit::Shape>();
        const std::size_t count = numkit::shape_size(shape);
        const std::uint64_t first = offset / sizeof(float);
        if (first + count > container.payload.size()) {
          throw FormatError("payload shorter than manifest", container.payload_offset + 4 * container.payload.size());
        }
        s.frames = numkit::FloatArray(shape, std::vector<float>(container.payload.begin() + static_cast<std::ptrdiff_t>(first),
                                                                container.payload.begin() + static_cast<std::ptrdiff_t>(first + count)));
        expected_offset += count * sizeof(float);
        split.samples.push_back(std::move(s));
      }
      ds.splits.push_back(std::move(split));
    }
    if (expected_offset != container.payload.size() * sizeof(float)) {
      throw FormatError("manifest sample count does not match payload", container.payload_offset + expected_offset);
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("dataset manifest malformed: ") + e.what(), manifest_at);
  }
  return ds;
}

std::filesystem::path dataset_file(const std::filesystem::path& dir) { return dir / "dataset.uaai"; }

}  // namespace uaai::synthdata
