// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: dataset generation, training, evaluation,
// ablation, selection and uncertainty dumps, and reports.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uaai/error.hpp"
#include "uaai/pipeline/ablate.hpp"
#include "uaai/pipeline/train.hpp"
#include "uaai/synthdata/synthdata.hpp"

namespace fs = std::filesystem;
using namespace uaai;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitDivergence = 4;

synthdata::GeneratorConfig load_generator_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidConfig("cannot read config file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidConfig("config " + path + " is not valid JSON: " + e.what());
  }
  // A combined file may carry the generator settings under "data".
  if (j.contains("data")) j = j.at("data");
  auto cfg = j.get<synthdata::GeneratorConfig>();
  cfg.validate();
  return cfg;
}

pipeline::TrainConfig train_config(const std::string& path, const std::string& data_dir) {
  pipeline::TrainConfig cfg;
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw InvalidConfig("cannot read config file " + path);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidConfig("config " + path + " is not valid JSON: " + e.what());
    }
    if (j.contains("train")) j = j.at("train");
    cfg = j.get<pipeline::TrainConfig>();
  }
  cfg.dataset_path = data_dir;
  cfg.validate();
  return cfg;
}

synthdata::Dataset load_data(const std::string& dir) {
  const fs::path p(dir);
  return synthdata::read_dataset(fs::is_directory(p) ? synthdata::dataset_file(p) : p);
}

std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      seeds.push_back(std::stoull(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      throw InvalidConfig("bad seed '" + item + "'");
    }
  }
  if (seeds.empty()) throw InvalidConfig("--seeds needs at least one seed");
  return seeds;
}

void print_eval(const pipeline::EvalResult& r) {
  std::cout << "split: " << r.split << "\nsamples: " << r.count << "\naccuracy: " << r.accuracy
            << "\nmean_loss: " << r.mean_loss << "\nmean_frames_observed: " << r.mean_frames_observed
            << "\nplanted_recovery: " << r.planted_recovery << "\nselector_mode: " << r.selector_mode
            << "\nper_class_accuracy:";
  for (double a : r.per_class_accuracy) std::cout << ' ' << a;
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Uncertainty-aware active inference for sequence classification"};
  app.require_subcommand(1);

  std::string config, data, out, checkpoint, split = "test", seeds = "1,2,3", run, masks;
  bool no_temporal = false;

  auto* gen = app.add_subcommand("generate", "Generate a synthetic micro-gesture dataset");
  gen->add_option("--config", config, "Generator config JSON (defaults when omitted)");
  gen->add_option("--out", out, "Output directory")->required();

  auto* tr = app.add_subcommand("train", "Train a model and write a run directory");
  tr->add_option("--config", config, "Training config JSON");
  tr->add_option("--data", data, "Dataset directory or file")->required();
  tr->add_option("--out", out, "Run directory")->required();

  auto* ev = app.add_subcommand("eval", "Evaluate a checkpoint on one split");
  ev->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  ev->add_option("--data", data, "Dataset directory or file")->required();
  ev->add_option("--split", split, "train, val or test");
  ev->add_flag("--uniform-stride", no_temporal, "Use uniform-stride frames instead of EFE selection");

  auto* ab = app.add_subcommand("ablate", "Run the five-row module ablation");
  ab->add_option("--config", config, "Base training config JSON");
  ab->add_option("--data", data, "Dataset directory or file")->required();
  ab->add_option("--seeds", seeds, "Comma-separated training seeds");
  ab->add_option("--out", out, "Output directory")->required();

  auto* sel = app.add_subcommand("select", "Dump frame selections as JSON lines");
  sel->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  sel->add_option("--data", data, "Dataset directory or file")->required();
  sel->add_option("--split", split, "train, val or test");
  sel->add_option("--out", out, "Output .jsonl file")->required();
  sel->add_option("--masks", masks, "Also write attention masks and per-location EFE of chosen frames (CSV)");

  auto* unc = app.add_subcommand("uncertainty", "Dump MC-dropout uncertainty and weights");
  unc->add_option("--checkpoint", checkpoint, "Checkpoint file")->required();
  unc->add_option("--data", data, "Dataset directory or file")->required();
  unc->add_option("--split", split, "Split to score (default train)")->default_val("train");
  unc->add_option("--out", out, "Output CSV")->required();

  auto* rep = app.add_subcommand("report", "Summarize a run or ablation directory");
  rep->add_option("--run", run, "Run directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*gen) {
      const auto cfg = config.empty() ? synthdata::GeneratorConfig{} : load_generator_config(config);
      fs::create_directories(out);
      const auto dataset = synthdata::generate_dataset(cfg);
      synthdata::write_dataset(dataset, synthdata::dataset_file(out));
      std::cout << "wrote " << synthdata::dataset_file(out).string() << '\n';
    } else if (*tr) {
      const auto cfg = train_config(config, data);
      const auto dataset = load_data(data);
      const auto result = pipeline::train(cfg, dataset);
      pipeline::write_run(out, result);
      const auto test = pipeline::evaluate(result.best, dataset, "test");
      nlohmann::json summary{{"best_epoch", result.best.epoch},
                             {"val_accuracy", result.best.val_accuracy},
                             {"test_accuracy", test.accuracy},
                             {"test_planted_recovery", test.planted_recovery},
                             {"mean_frames_observed", test.mean_frames_observed},
                             {"train_seconds", cfg.record_wall_clock ? result.train_seconds : 0.0}};
      std::ofstream(fs::path(out) / "summary.json", std::ios::binary) << summary.dump(2) << '\n';
      std::cout << summary.dump(2) << '\n';
    } else if (*ev) {
      const auto ckpt = pipeline::load_checkpoint(checkpoint);
      pipeline::EvalOptions options;
      if (no_temporal) options.temporal = false;
      print_eval(pipeline::evaluate(ckpt, load_data(data), split, options));
    } else if (*ab) {
      const auto cfg = train_config(config, data);
      const auto seed_list = parse_seeds(seeds);
      const auto table = pipeline::ablate(cfg, load_data(data), seed_list, fs::path(out));
      std::ifstream in(fs::path(out) / "ablation.csv");
      std::cout << in.rdbuf();
    } else if (*sel) {
      const auto ckpt = pipeline::load_checkpoint(checkpoint);
      const auto dataset = load_data(data);
      const auto lines = pipeline::selection_dump(ckpt, dataset, split);
      std::ofstream f(out, std::ios::binary);
      if (!f) throw InvalidInput("cannot write " + out);
      for (const auto& line : lines) f << line << '\n';
      if (!masks.empty()) {
        std::ofstream m(masks, std::ios::binary);
        if (!m) throw InvalidInput("cannot write " + masks);
        m << "sample_id,frame,row,col,mask,g,weighted_efe\n";
        const auto& samples = dataset.split(split).samples;
        const std::size_t g = dataset.config.grid;
        for (std::size_t i = 0; i < lines.size(); ++i) {
          const auto selected = nlohmann::json::parse(lines[i]).at("selected").get<std::vector<std::size_t>>();
          for (std::size_t f : selected) {
            numkit::FloatArray frame({g, g}, std::vector<float>(samples[i].frames.data() + f * g * g,
                                                                 samples[i].frames.data() + (f + 1) * g * g));
            const auto d = pipeline::spatial_diagnostic(ckpt, frame);
            for (std::size_t loc = 0; loc < g * g; ++loc) {
              m << samples[i].id << ',' << f << ',' << loc / g << ',' << loc % g << ',' << d.mask.data()[loc] << ','
                << d.per_location_g.data()[loc] << ',' << d.weighted_efe << '\n';
            }
          }
        }
      }
      std::cout << "wrote " << lines.size() << " selections to " << out << '\n';
    } else if (*unc) {
      const auto ckpt = pipeline::load_checkpoint(checkpoint);
      const auto rows = pipeline::uncertainty_dump(ckpt, load_data(data), split);
      pipeline::write_uncertainty_csv(out, rows);
      std::cout << "wrote " << rows.size() << " rows to " << out << '\n';
    } else if (*rep) {
      const auto s = pipeline::report(run);
      std::cout << "report over " << s.runs << " run(s) written to " << (fs::path(run) / "report.md").string()
                << '\n';
    }
  } catch (const InvalidConfig& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "training diverged: " << e.what() << '\n';
    return kExitDivergence;
  } catch (const Error& e) {
    std::cerr << "data error: " << e.what() << '\n';
    return kExitData;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return 0;
}
