// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/pipeline/train.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>

#include "uaai/error.hpp"
#include "uaai/learnkit/adam.hpp"
#include "uaai/learnkit/checkpoint.hpp"
#include "uaai/umix/umix.hpp"
#include "uaai/uncertainty/uncertainty.hpp"

namespace uaai::pipeline {

namespace fs = std::filesystem;
using numkit::Categorical;
using numkit::FloatArray;
using numkit::RngStream;
using synthdata::SequenceSample;

namespace {

// Stream ids under the training seed.
constexpr std::uint64_t kInitStream = 1;
constexpr std::uint64_t kShuffleStream = 2;
constexpr std::uint64_t kDropoutStream = 3;
constexpr std::uint64_t kMcStream = 4;
constexpr std::uint64_t kMixStream = 5;
constexpr std::uint64_t kDumpStream = 6;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string fmt(double v, int precision = 6) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::vector<double> row_of(const FloatArray& logits, std::size_t r) {
  const std::size_t k = logits.dim(1);
  return std::vector<double>(logits.data() + r * k, logits.data() + (r + 1) * k);
}

ModelShape shape_for(const TrainConfig& cfg, const synthdata::GeneratorConfig& data) {
  ModelShape s;
  s.classes = data.num_classes;
  s.grid = data.grid;
  s.channels = cfg.conv_channels;
  s.embedding = cfg.embedding_dim;
  s.dropout = cfg.mc.dropout_rate;
  s.spatial = cfg.spatial_selection;
  return s;
}

std::string selector_label(bool efe, efe::EFEVariant variant) {
  if (!efe) return "uniform_stride";
  return variant == efe::EFEVariant::info_gain ? "efe_info_gain" : "efe_label_target";
}

std::vector<const SequenceSample*> pointers(const synthdata::Split& split, std::size_t begin, std::size_t end) {
  std::vector<const SequenceSample*> out;
  for (std::size_t i = begin; i < end; ++i) out.push_back(&split.samples[i]);
  return out;
}

// Infer-mode evaluation of a parameter snapshot; shared by training (val rows)
// and the public evaluate().
EvalResult run_eval(const Model& model, const learnkit::ParamSet& params, const genmodel::ConfusionModel& confusion,
                    const synthdata::Split& split, const SelectorSettings& selector, double beta_kl,
                    std::size_t batch_size) {
  const std::size_t k = model.shape().classes;
  const genmodel::VFEConfig vfe(k, beta_kl);
  EvalResult r;
  r.split = split.name;
  r.count = split.samples.size();
  r.selector_mode = selector_label(selector.efe, selector.variant);
  std::vector<std::size_t> correct(k, 0), total(k, 0);
  std::vector<double> grad(k);
  double loss = 0.0, frames = 0.0, recovery = 0.0;
  RngStream unused(0, 0);
  for (std::size_t begin = 0; begin < split.samples.size(); begin += batch_size) {
    const auto batch = pointers(split, begin, std::min(split.samples.size(), begin + batch_size));
    const auto plans = plan_frames(model, params, confusion, batch, selector);
    const FloatArray logits =
        model.sequence_logits(params, gather_frames(batch, plans), selector.budget, Mode::infer, unused);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto row = row_of(logits, i);
      const std::size_t label = batch[i]->label;
      loss += genmodel::vfe_loss_from_logits(row, label, vfe, grad);
      ++total[label];
      if (numkit::softmax(row).argmax() == label) ++correct[label];
      frames += static_cast<double>(plans[i].frames.size());
      const auto& planted = batch[i]->planted_frames;
      if (!planted.empty()) {
        std::size_t hits = 0;
        for (std::size_t f : plans[i].frames) hits += std::binary_search(planted.begin(), planted.end(), f) ? 1 : 0;
        recovery += static_cast<double>(hits) / static_cast<double>(planted.size());
      }
    }
  }
  const double n = static_cast<double>(std::max<std::size_t>(1, r.count));
  std::size_t all_correct = 0;
  for (std::size_t c = 0; c < k; ++c) {
    all_correct += correct[c];
    r.per_class_accuracy.push_back(total[c] ? static_cast<double>(correct[c]) / static_cast<double>(total[c]) : kNaN);
  }
  r.accuracy = static_cast<double>(all_correct) / n;
  r.mean_loss = loss / n;
  r.mean_frames_observed = frames / n;
  r.planted_recovery = recovery / n;
  return r;
}

// u of each sample from cfg.mc.passes dropout-active passes over its chosen
// frames; pass t of the batch draws from rng.child(t).
std::vector<uncertainty::UncertaintyScore> batch_uncertainty(const Model& model, const learnkit::ParamSet& params,
                                                             const FloatArray& frames, std::size_t budget,
                                                             std::size_t count, const uncertainty::MCConfig& mc,
                                                             const RngStream& rng, int epoch = -1, int batch = -1) {
  std::vector<std::vector<Categorical>> passes(count);
  for (std::size_t t = 0; t < mc.passes; ++t) {
    RngStream pass_rng = rng.child(t);
    const FloatArray logits = model.sequence_logits(params, frames, budget, Mode::train, pass_rng);
    if (!logits.all_finite()) {
      throw DivergenceError("non-finite logits in MC pass " + std::to_string(t) + " at epoch " +
                                std::to_string(epoch) + ", batch " + std::to_string(batch),
                            epoch, batch);
    }
    for (std::size_t i = 0; i < count; ++i) passes[i].push_back(numkit::softmax(row_of(logits, i)));
  }
  std::vector<uncertainty::UncertaintyScore> out;
  out.reserve(count);
  for (const auto& p : passes) out.push_back(uncertainty::score_from_passes(p));
  return out;
}

nlohmann::json confusion_json(const genmodel::ConfusionModel& c) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < c.counts().rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (Eigen::Index j = 0; j < c.counts().cols(); ++j) row.push_back(c.counts()(i, j));
    rows.push_back(row);
  }
  return {{"smoothing", c.smoothing()}, {"counts", rows}};
}

genmodel::ConfusionModel confusion_from_json(const nlohmann::json& j) {
  const auto rows = j.at("counts");
  const auto k = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd counts(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    if (rows[static_cast<std::size_t>(i)].size() != rows.size()) throw InvalidInput("confusion counts must be square");
    for (Eigen::Index c = 0; c < k; ++c) {
      counts(i, c) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(c)].get<double>();
    }
  }
  return genmodel::ConfusionModel(std::move(counts), j.at("smoothing").get<double>());
}

SelectorSettings eval_selector(const Checkpoint& ckpt, const synthdata::Dataset& data, const EvalOptions& options) {
  SelectorSettings s;
  s.efe = options.temporal.value_or(ckpt.config.temporal_selection && ckpt.epoch > ckpt.config.warmup_epochs);
  s.variant = efe_variant_from_string(ckpt.config.efe.eval_mode);
  s.budget = ckpt.config.frame_budget(data.config.frames);
  return s;
}

void check_compatible(const Checkpoint& ckpt, const synthdata::Dataset& data) {
  if (ckpt.shape.classes != data.config.num_classes || ckpt.shape.grid != data.config.grid) {
    throw InvalidInput("checkpoint was trained for a different class count or frame size");
  }
}

}  // namespace

void write_metrics_csv(const fs::path& path, std::span<const MetricsRow> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << kMetricsHeader << '\n';
  for (const auto& r : rows) {
    out << r.epoch << ',' << r.split << ',' << fmt(r.loss) << ',' << fmt(r.accuracy) << ',' << fmt(r.mean_u) << ','
        << fmt(r.mean_w) << ',' << fmt(r.seconds, 3) << ',' << r.selector_mode << '\n';
  }
}

std::vector<MetricsRow> read_metrics_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read metrics file " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) throw InvalidInput(path.string() + " has no metrics header");
  std::vector<MetricsRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 8) throw InvalidInput("malformed metrics row in " + path.string() + ": " + line);
    try {
      MetricsRow r;
      r.epoch = std::stoul(cells[0]);
      r.split = cells[1];
      r.loss = std::stod(cells[2]);
      r.accuracy = std::stod(cells[3]);
      r.mean_u = std::stod(cells[4]);
      r.mean_w = std::stod(cells[5]);
      r.seconds = std::stod(cells[6]);
      r.selector_mode = cells[7];
      rows.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw InvalidInput("malformed metrics row in " + path.string() + ": " + line);
    }
  }
  return rows;
}

void save_checkpoint(const fs::path& path, const Checkpoint& ckpt) {
  const Model model(ckpt.shape);
  learnkit::CheckpointFile file;
  file.networks = model.networks();
  file.params = ckpt.params;
  file.extra = {{"shape", ckpt.shape},
                {"config", ckpt.config},
                {"confusion", confusion_json(ckpt.confusion)},
                {"epoch", ckpt.epoch},
                {"val_accuracy", ckpt.val_accuracy}};
  learnkit::save_checkpoint(path, file);
}

Checkpoint load_checkpoint(const fs::path& path) {
  learnkit::CheckpointFile file = learnkit::load_checkpoint(path);
  Checkpoint ckpt;
  try {
    ckpt.shape = file.extra.at("shape").get<ModelShape>();
    ckpt.config = file.extra.at("config").get<TrainConfig>();
    ckpt.confusion = confusion_from_json(file.extra.at("confusion"));
    ckpt.epoch = file.extra.at("epoch").get<std::size_t>();
    ckpt.val_accuracy = file.extra.at("val_accuracy").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("checkpoint metadata: ") + e.what(), 0);
  }
  ckpt.params = std::move(file.params);
  Model(ckpt.shape).check(ckpt.params);
  return ckpt;
}

std::vector<FramePlan> plan_frames(const Model& model, const learnkit::ParamSet& params,
                                   const genmodel::ConfusionModel& confusion,
                                   std::span<const SequenceSample* const> samples, const SelectorSettings& settings) {
  std::vector<FramePlan> plans(samples.size());
  if (samples.empty()) return plans;
  const std::size_t t_frames = samples.front()->frames.dim(0);
  const std::size_t g = model.shape().grid;
  RngStream unused(0, 0);

  if (!settings.efe) {
    const auto stride = efe::uniform_stride(t_frames, settings.budget);
    for (auto& p : plans) p.frames = stride;
    if (settings.need_softmax) {
      const FloatArray logits = model.frame_logits(params, gather_frames(samples, plans), Mode::infer, unused);
      for (std::size_t i = 0; i < samples.size(); ++i) {
        for (std::size_t f = 0; f < stride.size(); ++f) {
          plans[i].frame_softmax.push_back(numkit::softmax(row_of(logits, i * stride.size() + f)));
        }
      }
    }
    return plans;
  }

  FloatArray all({samples.size() * t_frames, g, g});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (samples[i]->frames.dim(0) != t_frames) throw ShapeError("sequences in one batch differ in length");
    std::copy(samples[i]->frames.data(), samples[i]->frames.data() + t_frames * g * g,
              all.data() + i * t_frames * g * g);
  }
  const FloatArray logits = model.frame_logits(params, all, Mode::infer, unused);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    std::vector<Categorical> soft;
    soft.reserve(t_frames);
    for (std::size_t f = 0; f < t_frames; ++f) soft.push_back(numkit::softmax(row_of(logits, i * t_frames + f)));
    const efe::EFEMode mode = settings.variant == efe::EFEVariant::info_gain
                                  ? efe::EFEMode::info_gain()
                                  : efe::EFEMode::label_target(samples[i]->label);
    efe::SelectionResult sel = efe::select_frames(soft, confusion, settings.budget, mode);
    plans[i].frames = sel.selected;
    if (settings.need_softmax) {
      for (std::size_t f : sel.selected) plans[i].frame_softmax.push_back(soft[f]);
    }
    if (settings.keep_details) plans[i].selection = std::move(sel);
  }
  return plans;
}

FloatArray gather_frames(std::span<const SequenceSample* const> samples, std::span<const FramePlan> plans) {
  if (samples.size() != plans.size()) throw ShapeError("one frame plan is needed per sample");
  if (samples.empty()) return FloatArray({0, 0, 0});
  const std::size_t g = samples.front()->frames.dim(1);
  const std::size_t per = plans.front().frames.size();
  FloatArray out({samples.size() * per, g, g});
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (plans[i].frames.size() != per) throw ShapeError("frame plans differ in budget");
    for (std::size_t f = 0; f < per; ++f) {
      const std::size_t src = plans[i].frames[f];
      if (src >= samples[i]->frames.dim(0)) throw InvalidInput("planned frame index out of range");
      std::copy_n(samples[i]->frames.data() + src * g * g, g * g, out.data() + (i * per + f) * g * g);
    }
  }
  return out;
}

TrainResult train(const TrainConfig& cfg, const synthdata::Dataset& data) {
  cfg.validate();
  const synthdata::Split& train_split = data.split("train");
  const synthdata::Split& val_split = data.split("val");
  if (train_split.samples.empty()) throw InvalidInput("training split is empty");

  const std::size_t k = data.config.num_classes;
  const std::size_t budget = cfg.frame_budget(data.config.frames);
  const Model model(shape_for(cfg, data.config));
  RngStream init_rng(cfg.seed, kInitStream);
  learnkit::ParamSet params = model.init(init_rng);
  learnkit::AdamState adam(learnkit::AdamConfig{cfg.learning_rate});
  genmodel::ConfusionModel confusion(k, cfg.confusion_smoothing);
  const genmodel::VFEConfig vfe(k, cfg.beta_kl);
  const efe::EFEVariant train_variant = efe_variant_from_string(cfg.efe.train_mode);
  const efe::EFEVariant eval_variant = efe_variant_from_string(cfg.efe.eval_mode);

  TrainResult result;
  double best_val = -1.0;
  std::vector<std::size_t> order(train_split.samples.size());
  std::vector<double> grad(k);

  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    const bool warmup = epoch <= cfg.warmup_epochs;
    const bool use_efe = cfg.temporal_selection && !warmup;
    const auto start = std::chrono::steady_clock::now();

    std::iota(order.begin(), order.end(), std::size_t{0});
    RngStream shuffle_rng = RngStream(cfg.seed, kShuffleStream).child(epoch);
    shuffle_rng.shuffle(std::span<std::size_t>(order));

    SelectorSettings selector;
    selector.efe = use_efe;
    selector.variant = train_variant;
    selector.budget = budget;
    selector.need_softmax = !warmup;

    double loss_sum = 0.0, u_sum = 0.0, w_sum = 0.0;
    std::size_t correct = 0;
    const std::size_t batches = (order.size() + cfg.batch_size - 1) / cfg.batch_size;
    for (std::size_t b = 0; b < batches; ++b) {
      std::vector<const SequenceSample*> batch;
      for (std::size_t i = b * cfg.batch_size; i < std::min(order.size(), (b + 1) * cfg.batch_size); ++i) {
        batch.push_back(&train_split.samples[order[i]]);
      }
      const std::size_t n = batch.size();
      const auto plans = plan_frames(model, params, confusion, batch, selector);
      FloatArray frames = gather_frames(batch, plans);

      std::vector<umix::MixedSample> mixed;
      if (cfg.umix.enabled) {
        const auto scores = batch_uncertainty(model, params, frames, budget, n, cfg.mc,
                                              RngStream(cfg.seed, kMcStream).child(epoch, b),
                                              static_cast<int>(epoch), static_cast<int>(b));
        std::vector<uncertainty::SampleWeight> weights;
        for (std::size_t i = 0; i < n; ++i) {
          weights.push_back(uncertainty::weight_from_uncertainty(scores[i].u, cfg.umix.weight_alpha,
                                                                 cfg.umix.weight_beta, cfg.umix.weight_rule));
          u_sum += scores[i].u;
          w_sum += weights[i].w;
          result.weights.push_back({epoch, batch[i]->id, scores[i].u, weights[i].w, batch[i]->noisy_label});
        }
        RngStream mix_rng = RngStream(cfg.seed, kMixStream).child(epoch, b);
        const std::size_t g = data.config.grid;
        const numkit::Shape block{budget, g, g};
        const std::size_t block_size = budget * g * g;
        auto block_of = [&](std::size_t i) {
          return FloatArray(block, std::vector<float>(frames.data() + i * block_size,
                                                      frames.data() + (i + 1) * block_size));
        };
        FloatArray mixed_frames(frames.shape());
        for (std::size_t i = 0; i < n; ++i) {
          const std::size_t j = n - 1 - i;
          const double lambda = numkit::sample_beta(cfg.umix.alpha_mix, mix_rng);
          mixed.push_back(umix::mix_samples(block_of(i), batch[i]->label, block_of(j), batch[j]->label, lambda,
                                            weights[i].w, weights[j].w));
          std::copy_n(mixed.back().x_mixed.data(), block_size, mixed_frames.data() + i * block_size);
        }
        frames = std::move(mixed_frames);
      }

      RngStream dropout_rng = RngStream(cfg.seed, kDropoutStream).child(epoch, b);
      ModelTrace<float> trace;
      const FloatArray logits = model.sequence_logits(params, frames, budget, Mode::train, dropout_rng, &trace);
      if (!logits.all_finite()) {
        throw DivergenceError("non-finite logits at epoch " + std::to_string(epoch) + ", batch " + std::to_string(b),
                              static_cast<int>(epoch), static_cast<int>(b));
      }
      FloatArray grad_logits(logits.shape());
      double batch_loss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const auto row = row_of(logits, i);
        std::size_t target = batch[i]->label;
        if (cfg.umix.enabled) {
          batch_loss += umix::umix_loss(row, mixed[i], grad);
          target = mixed[i].lambda >= 0.5 ? mixed[i].y_i : mixed[i].y_j;
        } else {
          batch_loss += genmodel::vfe_loss_from_logits(row, target, vfe, grad);
        }
        if (numkit::softmax(row).argmax() == target) ++correct;
        for (std::size_t c = 0; c < k; ++c) grad_logits.data()[i * k + c] = static_cast<float>(grad[c] / double(n));
      }
      if (!std::isfinite(batch_loss)) {
        throw DivergenceError("non-finite training loss at epoch " + std::to_string(epoch) + ", batch " +
                                  std::to_string(b),
                              static_cast<int>(epoch), static_cast<int>(b));
      }
      loss_sum += batch_loss;

      learnkit::ParamSet grads = params.zeros_like();
      model.backward(params, trace, grad_logits, grads);
      learnkit::adam_step(params, grads, adam);

      if (!warmup) {
        for (std::size_t i = 0; i < n; ++i) {
          for (const auto& soft : plans[i].frame_softmax) confusion.update(soft.argmax(), batch[i]->label);
        }
      }
    }
    const double epoch_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.train_seconds += epoch_seconds;
    const double seconds = cfg.record_wall_clock ? result.train_seconds : 0.0;

    const double count = static_cast<double>(order.size());
    MetricsRow tr;
    tr.epoch = epoch;
    tr.split = "train";
    tr.loss = loss_sum / count;
    tr.accuracy = static_cast<double>(correct) / count;
    tr.mean_u = cfg.umix.enabled ? u_sum / count : kNaN;
    tr.mean_w = cfg.umix.enabled ? w_sum / count : kNaN;
    tr.seconds = seconds;
    tr.selector_mode = selector_label(use_efe, train_variant);
    result.metrics.push_back(tr);

    SelectorSettings val_selector;
    val_selector.efe = use_efe;
    val_selector.variant = eval_variant;
    val_selector.budget = budget;
    const EvalResult val = run_eval(model, params, confusion, val_split, val_selector, cfg.beta_kl, 64);
    MetricsRow vr;
    vr.epoch = epoch;
    vr.split = "val";
    vr.loss = val.mean_loss;
    vr.accuracy = val.accuracy;
    vr.mean_u = kNaN;
    vr.mean_w = kNaN;
    vr.seconds = seconds;
    vr.selector_mode = val.selector_mode;
    result.metrics.push_back(vr);

    Checkpoint snapshot{model.shape(), params, confusion, cfg, epoch, val.accuracy};
    if (val.accuracy > best_val) {
      best_val = val.accuracy;
      result.best = snapshot;
    }
    if (epoch == cfg.epochs) result.last = std::move(snapshot);
  }
  return result;
}

void write_run(const fs::path& dir, const TrainResult& result) {
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "config.json", std::ios::binary);
    out << nlohmann::json(result.last.config).dump(2) << '\n';
  }
  write_metrics_csv(dir / "metrics.csv", result.metrics);
  save_checkpoint(dir / "best.ckpt", result.best);
  save_checkpoint(dir / "last.ckpt", result.last);
  result.best.confusion.write_csv(dir / "confusion.csv");
  if (!result.weights.empty()) {
    std::ofstream out(dir / "weights.csv", std::ios::binary);
    out << "epoch,sample_id,u,w,noisy_label_flag\n";
    for (const auto& r : result.weights) {
      out << r.epoch << ',' << r.sample_id << ',' << fmt(r.u, 8) << ',' << fmt(r.w, 8) << ','
          << (r.noisy_label ? 1 : 0) << '\n';
    }
  }
}

EvalResult evaluate(const Checkpoint& ckpt, const synthdata::Dataset& data, const std::string& split,
                    const EvalOptions& options) {
  const synthdata::Split& s = data.split(split);
  check_compatible(ckpt, data);
  const Model model(ckpt.shape);
  return run_eval(model, ckpt.params, ckpt.confusion, s, eval_selector(ckpt, data, options), ckpt.config.beta_kl,
                  std::max<std::size_t>(1, options.batch_size));
}

std::vector<std::string> selection_dump(const Checkpoint& ckpt, const synthdata::Dataset& data,
                                        const std::string& split) {
  const synthdata::Split& s = data.split(split);
  check_compatible(ckpt, data);
  const Model model(ckpt.shape);
  SelectorSettings selector = eval_selector(ckpt, data, {});
  selector.keep_details = true;
  RngStream unused(0, 0);
  std::vector<std::string> lines;
  for (std::size_t begin = 0; begin < s.samples.size(); begin += 64) {
    const auto batch = pointers(s, begin, std::min(s.samples.size(), begin + 64));
    const auto plans = plan_frames(model, ckpt.params, ckpt.confusion, batch, selector);
    const FloatArray logits =
        model.sequence_logits(ckpt.params, gather_frames(batch, plans), selector.budget, Mode::infer, unused);
    for (std::size_t i = 0; i < batch.size(); ++i) {
      nlohmann::json j{{"sequence_id", batch[i]->id},
                       {"label", batch[i]->label},
                       {"predicted", numkit::softmax(row_of(logits, i)).argmax()},
                       {"selector_mode", selector_label(selector.efe, selector.variant)},
                       {"selected", plans[i].frames},
                       {"planted_frames", batch[i]->planted_frames}};
      if (plans[i].selection) {
        nlohmann::json totals = nlohmann::json::array(), candidates = nlohmann::json::array();
        for (const auto& round : plans[i].selection->scores) {
          std::vector<double> t;
          std::vector<std::size_t> c;
          for (const auto& sc : round) {
            t.push_back(sc.total);
            c.push_back(sc.action);
          }
          totals.push_back(t);
          candidates.push_back(c);
        }
        j["totals"] = totals;
        j["candidates"] = candidates;
        const auto& beliefs = plans[i].selection->beliefs;
        if (!beliefs.empty()) {
          const auto probs = beliefs.back().dist().probs();
          j["final_belief"] = std::vector<double>(probs.begin(), probs.end());
        }
      }
      lines.push_back(j.dump());
    }
  }
  return lines;
}

std::vector<WeightRecord> uncertainty_dump(const Checkpoint& ckpt, const synthdata::Dataset& data,
                                           const std::string& split) {
  const synthdata::Split& s = data.split(split);
  check_compatible(ckpt, data);
  const Model model(ckpt.shape);
  const SelectorSettings selector = eval_selector(ckpt, data, {});
  const auto& c = ckpt.config;
  std::vector<WeightRecord> rows;
  for (std::size_t begin = 0, b = 0; begin < s.samples.size(); begin += c.batch_size, ++b) {
    const auto batch = pointers(s, begin, std::min(s.samples.size(), begin + c.batch_size));
    const auto plans = plan_frames(model, ckpt.params, ckpt.confusion, batch, selector);
    const auto scores = batch_uncertainty(model, ckpt.params, gather_frames(batch, plans), selector.budget,
                                          batch.size(), c.mc, RngStream(c.seed, kDumpStream).child(b));
    for (std::size_t i = 0; i < batch.size(); ++i) {
      const auto w = uncertainty::weight_from_uncertainty(scores[i].u, c.umix.weight_alpha, c.umix.weight_beta,
                                                          c.umix.weight_rule);
      rows.push_back({ckpt.epoch, batch[i]->id, scores[i].u, w.w, batch[i]->noisy_label});
    }
  }
  return rows;
}

void write_uncertainty_csv(const fs::path& path, std::span<const WeightRecord> rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << "sample_id,u,w,noisy_label_flag\n";
  for (const auto& r : rows) {
    out << r.sample_id << ',' << fmt(r.u, 8) << ',' << fmt(r.w, 8) << ',' << (r.noisy_label ? 1 : 0) << '\n';
  }
}

SpatialDiagnostic spatial_diagnostic(const Checkpoint& ckpt, const FloatArray& frame) {
  const Model model(ckpt.shape);
  const std::size_t g = ckpt.shape.grid;
  FloatArray one = frame;
  if (one.rank() == 2) one.reshape({1, g, g});
  if (one.size() != g * g) throw ShapeError("spatial diagnostic expects one " + std::to_string(g) + "x" +
                                            std::to_string(g) + " frame");
  one.reshape({1, g, g});
  RngStream unused(0, 0);
  const auto encoded = model.encode(ckpt.params, one);
  const genmodel::Belief prior(ckpt.shape.classes);
  auto info_gain_of = [&](const FloatArray& features) {
    const FloatArray emb = model.embed_features(ckpt.params, features, Mode::infer, unused);
    const FloatArray logits = model.classify(ckpt.params, emb, Mode::infer, unused);
    return efe::expected_info_gain(prior, genmodel::frame_likelihood(ckpt.confusion, numkit::softmax(row_of(logits, 0))));
  };
  SpatialDiagnostic d;
  d.info_gain = info_gain_of(encoded.reweighted);
  d.mask = numkit::NumArray({g, g});
  d.per_location_g = numkit::NumArray({g, g});
  const std::size_t channels = encoded.reweighted.dim(1);
  for (std::size_t loc = 0; loc < g * g; ++loc) {
    d.mask.data()[loc] = encoded.mask.data()[loc];
    FloatArray ablated = encoded.reweighted;
    for (std::size_t c = 0; c < channels; ++c) ablated.data()[c * g * g + loc] = 0.0f;
    d.per_location_g.data()[loc] = -(d.info_gain - info_gain_of(ablated));
  }
  d.weighted_efe = efe::spatial_efe(d.per_location_g, d.mask);
  return d;
}

}  // namespace uaai::pipeline
