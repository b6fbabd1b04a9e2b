// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>

#include "doctest.h"
#include "uaai/error.hpp"
#include "uaai/synthdata/synthdata.hpp"

using namespace uaai;
using namespace uaai::synthdata;
namespace fs = std::filesystem;

namespace {

GeneratorConfig small_config() {
  GeneratorConfig c;
  c.train_per_class = 20;
  c.val_per_class = 5;
  c.test_per_class = 5;
  return c;
}

fs::path temp_dir() {
  const fs::path d = fs::temp_directory_path() / "uaai_test_synthdata";
  fs::create_directories(d);
  return d;
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const fs::path& p, const std::vector<char>& bytes) {
  std::ofstream(p, std::ios::binary).write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace

TEST_CASE("config validation and JSON") {
  GeneratorConfig c;
  c.signal_frames = 40;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = {};
  c.patch_size = 17;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  c = {};
  c.label_noise = 1.5;
  CHECK_THROWS_AS(c.validate(), InvalidConfig);
  CHECK_THROWS_AS(nlohmann::json({{"snr_db", 3}}).get<GeneratorConfig>(), InvalidConfig);
  const auto parsed = nlohmann::json({{"num_classes", 17}, {"snr", 2.5}}).get<GeneratorConfig>();
  CHECK(parsed.num_classes == 17);
  CHECK(parsed.snr == 2.5);
  CHECK(parsed.frames == 32);
}

TEST_CASE("splits are balanced, subject-disjoint and shaped as configured") {
  const Dataset ds = generate_dataset(small_config());
  REQUIRE(ds.splits.size() == 3);
  std::set<std::size_t> subjects[3];
  for (std::size_t s = 0; s < 3; ++s) {
    const auto& split = ds.splits[s];
    std::vector<std::size_t> per_class(8, 0);
    for (const auto& x : split.samples) {
      ++per_class[x.clean_label];
      subjects[s].insert(x.subject);
      CHECK(x.frames.shape() == numkit::Shape{32, 16, 16});
      CHECK(x.planted_frames.size() == 4);
      CHECK(std::is_sorted(x.planted_frames.begin(), x.planted_frames.end()));
      CHECK(std::adjacent_find(x.planted_frames.begin(), x.planted_frames.end()) == x.planted_frames.end());
    }
    for (std::size_t n : per_class) CHECK(n == per_class[0]);
  }
  for (std::size_t a = 0; a < 3; ++a)
    for (std::size_t b = a + 1; b < 3; ++b)
      for (std::size_t id : subjects[a]) CHECK(subjects[b].count(id) == 0);
  CHECK_THROWS_AS(ds.split("holdout"), InvalidInput);
}

TEST_CASE("label noise touches only the training split at roughly the configured rate") {
  GeneratorConfig c = small_config();
  c.train_per_class = 100;
  c.label_noise = 0.2;
  const Dataset ds = generate_dataset(c);
  std::size_t noisy = 0;
  for (const auto& x : ds.split("train").samples) {
    CHECK(x.noisy_label == (x.label != x.clean_label));
    noisy += x.noisy_label;
  }
  CHECK(std::abs(static_cast<double>(noisy) / 800.0 - 0.2) < 0.05);
  for (const char* name : {"val", "test"})
    for (const auto& x : ds.split(name).samples) CHECK_FALSE(x.noisy_label);
}

TEST_CASE("generation is a pure function of the seed") {
  const Dataset a = generate_dataset(small_config());
  const Dataset b = generate_dataset(small_config());
  CHECK(a.splits == b.splits);
  GeneratorConfig other = small_config();
  other.seed = 7;
  CHECK_FALSE(generate_dataset(other).splits == a.splits);
}

TEST_CASE("planted patches sit at the class location with the class pattern") {
  GeneratorConfig c = small_config();
  c.num_subjects = 3;
  c.subject_gain_min = c.subject_gain_max = 1.0;
  c.subject_offset_min = c.subject_offset_max = 0.0;
  c.snr = 50.0;
  const auto signals = class_signals(c);
  const Dataset ds = generate_dataset(c);
  const auto& x = ds.split("test").samples[3];
  const auto& sig = signals[x.clean_label];
  CHECK(x.planted_patch == std::make_pair(sig.row, sig.col));
  const std::size_t t = x.planted_frames[0];
  const float v = x.frames.data()[t * 256 + sig.row * 16 + sig.col];
  CHECK(v * sig.pattern[0] > 40.0f);
}

TEST_CASE("a frame-energy detector separates planted frames (AUC > 0.9)") {
  GeneratorConfig c = small_config();
  const Dataset ds = generate_dataset(c);
  std::vector<double> pos, neg;
  for (const auto& x : ds.split("train").samples) {
    // Energies are divided by the sequence average so subject gain cancels.
    std::vector<double> energy(c.frames, 0.0);
    double total = 0.0;
    for (std::size_t t = 0; t < c.frames; ++t) {
      const float* f = x.frames.data() + t * 256;
      double mean = 0.0;
      for (int i = 0; i < 256; ++i) mean += f[i];
      mean /= 256.0;
      for (int i = 0; i < 256; ++i) energy[t] += (f[i] - mean) * (f[i] - mean);
      total += energy[t];
    }
    for (std::size_t t = 0; t < c.frames; ++t) {
      const bool planted = std::binary_search(x.planted_frames.begin(), x.planted_frames.end(), t);
      (planted ? pos : neg).push_back(energy[t] * static_cast<double>(c.frames) / total);
    }
  }
  // Mann-Whitney estimate of P(energy(planted) > energy(background)).
  std::sort(neg.begin(), neg.end());
  double wins = 0.0;
  for (double p : pos) wins += static_cast<double>(std::lower_bound(neg.begin(), neg.end(), p) - neg.begin());
  const double auc = wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
  CHECK(auc > 0.9);
}

TEST_CASE("dataset files round-trip bit-exactly") {
  const Dataset ds = generate_dataset(small_config());
  const fs::path p = temp_dir() / "ds.uaai";
  write_dataset(ds, p);
  const Dataset back = read_dataset(p);
  CHECK(back.splits == ds.splits);
  CHECK(nlohmann::json(back.config) == nlohmann::json(ds.config));
  write_dataset(back, temp_dir() / "ds2.uaai");
  CHECK(slurp(p) == slurp(temp_dir() / "ds2.uaai"));
  CHECK(dataset_file("/tmp/x") == fs::path("/tmp/x/dataset.uaai"));
}

TEST_CASE("damaged dataset files are rejected with FormatError") {
  const Dataset ds = generate_dataset(small_config());
  const fs::path p = temp_dir() / "bad.uaai";
  write_dataset(ds, p);
  const auto good = slurp(p);

  auto bad = good;
  bad[2] = '?';
  spit(p, bad);
  CHECK_THROWS_AS(read_dataset(p), FormatError);

  bad = good;
  bad[4] = 9;
  spit(p, bad);
  CHECK_THROWS_AS(read_dataset(p), FormatError);

  spit(p, std::vector<char>(good.begin(), good.end() - 64));
  CHECK_THROWS_AS(read_dataset(p), FormatError);

  bad = good;
  bad[20] = '#';  // inside the manifest JSON
  spit(p, bad);
  CHECK_THROWS_AS(read_dataset(p), FormatError);
}

TEST_CASE("the K = 17 configuration generates") {
  GeneratorConfig c = small_config();
  c.num_classes = 17;
  c.train_per_class = 2;
  c.val_per_class = c.test_per_class = 1;
  const Dataset ds = generate_dataset(c);
  CHECK(ds.split("train").samples.size() == 34);
  CHECK(ds.split("val").samples.size() == 17);
}
