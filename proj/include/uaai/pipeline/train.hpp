// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "uaai/efe/efe.hpp"
#include "uaai/genmodel/genmodel.hpp"
#include "uaai/pipeline/config.hpp"
#include "uaai/pipeline/model.hpp"
#include "uaai/synthdata/synthdata.hpp"

namespace uaai::pipeline {

struct MetricsRow {
  std::size_t epoch = 0;
  std::string split;
  double loss = 0.0;
  double accuracy = 0.0;
  /// NaN when no uncertainty was computed for the row.
  double mean_u = 0.0;
  double mean_w = 0.0;
  double seconds = 0.0;
  std::string selector_mode;
};

inline constexpr const char* kMetricsHeader = "epoch,split,loss,accuracy,mean_u,mean_w,seconds,selector_mode";

void write_metrics_csv(const std::filesystem::path& path, std::span<const MetricsRow> rows);
/// Throws InvalidInput when the file is missing or malformed.
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);

/// The per-sample uncertainty and weight computed during one epoch.
struct WeightRecord {
  std::size_t epoch = 0;
  std::size_t sample_id = 0;
  double u = 0.0;
  double w = 1.0;
  bool noisy_label = false;
};

struct Checkpoint {
  ModelShape shape;
  learnkit::ParamSet params;
  genmodel::ConfusionModel confusion{2};
  TrainConfig config;
  std::size_t epoch = 0;
  double val_accuracy = 0.0;
};

void save_checkpoint(const std::filesystem::path& path, const Checkpoint& ckpt);
Checkpoint load_checkpoint(const std::filesystem::path& path);

struct TrainResult {
  /// Highest validation accuracy (earliest epoch on ties).
  Checkpoint best;
  Checkpoint last;
  std::vector<MetricsRow> metrics;
  std::vector<WeightRecord> weights;
  /// Time spent in training batches, excluding validation.
  double train_seconds = 0.0;
};

/// Deterministic given (cfg, data); wall-clock columns aside.
TrainResult train(const TrainConfig& cfg, const synthdata::Dataset& data);

/// config.json, metrics.csv, best.ckpt, last.ckpt, confusion.csv and (with
/// umix) weights.csv.
void write_run(const std::filesystem::path& dir, const TrainResult& result);

/// How frames were chosen for one sequence.
struct FramePlan {
  std::vector<std::size_t> frames;
  /// Per-frame classifier output for each chosen frame, when requested.
  std::vector<numkit::Categorical> frame_softmax;
  std::optional<efe::SelectionResult> selection;
};

struct SelectorSettings {
  bool efe = true;
  efe::EFEVariant variant = efe::EFEVariant::info_gain;
  std::size_t budget = 4;
  bool need_softmax = false;
  bool keep_details = false;
};

/// EFE selection (targets each sample's own label in label_target mode) or
/// uniform stride.
std::vector<FramePlan> plan_frames(const Model& model, const learnkit::ParamSet& params,
                                   const genmodel::ConfusionModel& confusion,
                                   std::span<const synthdata::SequenceSample* const> samples,
                                   const SelectorSettings& settings);

/// Chosen frames of every sample stacked as [n * budget, G, G].
numkit::FloatArray gather_frames(std::span<const synthdata::SequenceSample* const> samples,
                                 std::span<const FramePlan> plans);

struct EvalOptions {
  /// Overrides the checkpoint's temporal flag.
  std::optional<bool> temporal;
  std::size_t batch_size = 64;
};

struct EvalResult {
  std::string split;
  std::size_t count = 0;
  double accuracy = 0.0;
  std::vector<double> per_class_accuracy;
  double mean_loss = 0.0;
  double mean_frames_observed = 0.0;
  /// Fraction of planted frames among the chosen ones, averaged per sequence.
  double planted_recovery = 0.0;
  std::string selector_mode;
};

/// Infer-mode evaluation. Throws InvalidInput for unknown splits.
EvalResult evaluate(const Checkpoint& ckpt, const synthdata::Dataset& data, const std::string& split,
                    const EvalOptions& options = {});

/// One JSON object per sequence: chosen frames, per-round candidate totals, final
/// belief, planted frames and the prediction.
std::vector<std::string> selection_dump(const Checkpoint& ckpt, const synthdata::Dataset& data,
                                        const std::string& split);

/// MC-dropout u and w for every sample of `split` under the checkpoint.
std::vector<WeightRecord> uncertainty_dump(const Checkpoint& ckpt, const synthdata::Dataset& data,
                                           const std::string& split);
void write_uncertainty_csv(const std::filesystem::path& path, std::span<const WeightRecord> rows);

/// Per-location EFE field of one frame: G_i is the drop in the frame's
/// information gain when encoder location i is zeroed, negated.
struct SpatialDiagnostic {
  numkit::NumArray mask;
  numkit::NumArray per_location_g;
  double info_gain = 0.0;
  double weighted_efe = 0.0;
};

SpatialDiagnostic spatial_diagnostic(const Checkpoint& ckpt, const numkit::FloatArray& frame);

}  // namespace uaai::pipeline
