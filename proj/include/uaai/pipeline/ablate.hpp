// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uaai/pipeline/config.hpp"
#include "uaai/synthdata/synthdata.hpp"

namespace uaai::pipeline {

struct AblationVariant {
  std::string name;
  bool umix = false;
  bool temporal = false;
  bool spatial = false;
};

/// baseline, +uncertainty, +temporal, +spatial, full; in that order.
std::vector<AblationVariant> ablation_variants();

TrainConfig apply_variant(TrainConfig cfg, const AblationVariant& variant, std::uint64_t seed);

struct AblationRun {
  std::string variant;
  std::uint64_t seed = 0;
  double test_accuracy = 0.0;
  double val_accuracy = 0.0;
  std::size_t best_epoch = 0;
  double planted_recovery = 0.0;
  double train_seconds = 0.0;
};

struct AblationTable {
  std::vector<AblationVariant> variants;
  std::vector<std::uint64_t> seeds;
  std::vector<AblationRun> runs;

  /// Mean test accuracy of one variant over the seeds.
  double mean(const std::string& variant) const;
};

/// Trains every variant for every seed on `data`, evaluating the best-val
/// checkpoint on the test split. With `out_dir`, each run is written to
/// out_dir/<variant>/seed_<s> and the tables to ablation.csv and runs.csv.
AblationTable ablate(const TrainConfig& base, const synthdata::Dataset& data, std::span<const std::uint64_t> seeds,
                     const std::optional<std::filesystem::path>& out_dir = std::nullopt);

/// One row per variant: flags, test accuracy per seed, mean.
void write_ablation_csv(const std::filesystem::path& path, const AblationTable& table);
void write_runs_csv(const std::filesystem::path& path, const AblationTable& table);

struct ReportSummary {
  std::size_t runs = 0;
  bool has_ablation = false;
  std::size_t mc_cost_rows = 0;
  std::size_t uncertainty_files = 0;
};

/// Scans `run_dir` for metrics.csv files (recursively) and writes
/// loss_curves.csv, accuracy_curves.csv, mc_cost.csv and report.md into it.
/// Throws InvalidInput when no metrics file exists.
ReportSummary report(const std::filesystem::path& run_dir);

}  // namespace uaai::pipeline
