// Copyright (c) 2026, UAAI contributors
// SPDX-License-Identifier: Apache-2.0

#include "uaai/pipeline/ablate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "uaai/error.hpp"
#include "uaai/pipeline/train.hpp"

namespace uaai::pipeline {

namespace fs = std::filesystem;

namespace {

std::string fixed(double v, int precision = 4) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read " + path.string());
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

std::string markdown_row(const std::vector<std::string>& cells) {
  std::string out = "|";
  for (const auto& c : cells) out += " " + c + " |";
  return out + "\n";
}

std::string markdown_rule(std::size_t columns) {
  std::string out = "|";
  for (std::size_t i = 0; i < columns; ++i) out += " --- |";
  return out + "\n";
}

std::string run_label(const fs::path& root, const fs::path& metrics) {
  const std::string rel = fs::relative(metrics.parent_path(), root).generic_string();
  return rel.empty() ? "." : rel;
}

}  // namespace

std::vector<AblationVariant> ablation_variants() {
  return {{"baseline", false, false, false},
          {"uncertainty", true, false, false},
          {"temporal", false, true, false},
          {"spatial", false, false, true},
          {"full", true, true, true}};
}

TrainConfig apply_variant(TrainConfig cfg, const AblationVariant& variant, std::uint64_t seed) {
  cfg.umix.enabled = variant.umix;
  cfg.temporal_selection = variant.temporal;
  cfg.spatial_selection = variant.spatial;
  cfg.seed = seed;
  return cfg;
}

double AblationTable::mean(const std::string& variant) const {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& r : runs) {
    if (r.variant == variant) {
      sum += r.test_accuracy;
      ++n;
    }
  }
  if (n == 0) throw InvalidInput("no runs for variant '" + variant + "'");
  return sum / static_cast<double>(n);
}

AblationTable ablate(const TrainConfig& base, const synthdata::Dataset& data, std::span<const std::uint64_t> seeds,
                     const std::optional<fs::path>& out_dir) {
  if (seeds.empty()) throw InvalidConfig("ablation needs at least one seed");
  AblationTable table;
  table.variants = ablation_variants();
  table.seeds.assign(seeds.begin(), seeds.end());
  for (const auto& variant : table.variants) {
    for (std::uint64_t seed : seeds) {
      const TrainConfig cfg = apply_variant(base, variant, seed);
      const TrainResult result = train(cfg, data);
      const EvalResult test = evaluate(result.best, data, "test");
      table.runs.push_back({variant.name, seed, test.accuracy, result.best.val_accuracy, result.best.epoch,
                            test.planted_recovery, result.train_seconds});
      if (out_dir) write_run(*out_dir / variant.name / ("seed_" + std::to_string(seed)), result);
    }
  }
  if (out_dir) {
    write_ablation_csv(*out_dir / "ablation.csv", table);
    write_runs_csv(*out_dir / "runs.csv", table);
  }
  return table;
}

void write_ablation_csv(const fs::path& path, const AblationTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << "variant,uncertainty_aware,temporal_selection,spatial_selection";
  for (auto seed : table.seeds) out << ",seed_" << seed;
  out << ",mean\n";
  for (const auto& v : table.variants) {
    out << v.name << ',' << int(v.umix) << ',' << int(v.temporal) << ',' << int(v.spatial);
    for (auto seed : table.seeds) {
      auto it = std::find_if(table.runs.begin(), table.runs.end(),
                             [&](const AblationRun& r) { return r.variant == v.name && r.seed == seed; });
      out << ',' << (it == table.runs.end() ? std::string("nan") : fixed(it->test_accuracy));
    }
    out << ',' << fixed(table.mean(v.name)) << '\n';
  }
}

void write_runs_csv(const fs::path& path, const AblationTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidInput("cannot write " + path.string());
  out << "variant,seed,test_accuracy,val_accuracy,best_epoch,planted_recovery,train_seconds\n";
  for (const auto& r : table.runs) {
    out << r.variant << ',' << r.seed << ',' << fixed(r.test_accuracy) << ',' << fixed(r.val_accuracy) << ','
        << r.best_epoch << ',' << fixed(r.planted_recovery) << ',' << fixed(r.train_seconds, 3) << '\n';
  }
}

ReportSummary report(const fs::path& run_dir) {
  if (!fs::is_directory(run_dir)) throw InvalidInput("run directory " + run_dir.string() + " does not exist");
  std::vector<fs::path> metrics_files, uncertainty_files;
  for (const auto& entry : fs::recursive_directory_iterator(run_dir)) {
    if (!entry.is_regular_file()) continue;
    const fs::path& p = entry.path();
    if (p.filename() == "metrics.csv") {
      metrics_files.push_back(p);
    } else if (p.extension() == ".csv") {
      std::ifstream in(p);
      std::string header;
      std::getline(in, header);
      if (header == "sample_id,u,w,noisy_label_flag" || header == "epoch,sample_id,u,w,noisy_label_flag") {
        uncertainty_files.push_back(p);
      }
    }
  }
  if (metrics_files.empty()) throw InvalidInput("no metrics.csv under " + run_dir.string());
  auto by_label = [&](const fs::path& a, const fs::path& b) {
    return fs::relative(a, run_dir).generic_string() < fs::relative(b, run_dir).generic_string();
  };
  std::sort(metrics_files.begin(), metrics_files.end(), by_label);
  std::sort(uncertainty_files.begin(), uncertainty_files.end(), by_label);

  ReportSummary summary;
  summary.runs = metrics_files.size();
  std::ostringstream md;
  md << "# UAAI run report\n\n";

  std::ofstream loss_csv(run_dir / "loss_curves.csv", std::ios::binary);
  std::ofstream acc_csv(run_dir / "accuracy_curves.csv", std::ios::binary);
  loss_csv << "run,epoch,split,loss\n";
  acc_csv << "run,epoch,split,accuracy\n";

  // mc passes -> (seconds per run, epochs per run)
  std::map<std::size_t, std::vector<std::pair<double, std::size_t>>> mc_cost;
  md << "## Runs\n\n";
  md << markdown_row({"run", "epochs", "final train loss", "final val accuracy", "best val accuracy", "best epoch",
                      "train seconds"});
  md << markdown_rule(7);
  for (const auto& path : metrics_files) {
    const std::string label = run_label(run_dir, path);
    const auto rows = read_metrics_csv(path);
    double best_val = -1.0, final_val = std::nan(""), final_loss = std::nan(""), seconds = 0.0;
    std::size_t best_epoch = 0, epochs = 0;
    for (const auto& r : rows) {
      loss_csv << label << ',' << r.epoch << ',' << r.split << ',' << fixed(r.loss, 6) << '\n';
      acc_csv << label << ',' << r.epoch << ',' << r.split << ',' << fixed(r.accuracy, 6) << '\n';
      if (r.split == "train") {
        final_loss = r.loss;
        seconds = r.seconds;
        epochs = std::max(epochs, r.epoch);
      } else if (r.split == "val") {
        final_val = r.accuracy;
        if (r.accuracy > best_val) {
          best_val = r.accuracy;
          best_epoch = r.epoch;
        }
      }
    }
    md << markdown_row({label, std::to_string(epochs), fixed(final_loss), fixed(final_val), fixed(best_val),
                        std::to_string(best_epoch), fixed(seconds, 3)});
    const fs::path config_path = path.parent_path() / "config.json";
    if (fs::exists(config_path)) {
      std::ifstream in(config_path);
      try {
        const auto cfg = nlohmann::json::parse(in).get<TrainConfig>();
        if (cfg.umix.enabled) mc_cost[cfg.mc.passes].push_back({seconds, epochs});
      } catch (const Error&) {
      } catch (const nlohmann::json::exception&) {
      }
    }
  }
  md << "\nPer-epoch curves: `loss_curves.csv`, `accuracy_curves.csv`.\n\n";

  const fs::path ablation_path = run_dir / "ablation.csv";
  if (fs::exists(ablation_path)) {
    summary.has_ablation = true;
    const auto lines = read_lines(ablation_path);
    md << "## Ablation (test accuracy)\n\n";
    if (!lines.empty()) {
      const auto header = split_csv(lines.front());
      md << markdown_row(header) << markdown_rule(header.size());
      for (std::size_t i = 1; i < lines.size(); ++i) md << markdown_row(split_csv(lines[i]));
    }
    md << '\n';
  }

  std::ofstream mc_csv(run_dir / "mc_cost.csv", std::ios::binary);
  mc_csv << "mc_passes,runs,mean_train_seconds,mean_seconds_per_epoch\n";
  md << "## MC-dropout cost\n\n";
  md << markdown_row({"MC passes", "runs", "mean train seconds", "mean seconds per epoch"}) << markdown_rule(4);
  for (const auto& [passes, runs] : mc_cost) {
    double total = 0.0, per_epoch = 0.0;
    for (const auto& [s, e] : runs) {
      total += s;
      per_epoch += e ? s / static_cast<double>(e) : 0.0;
    }
    const double n = static_cast<double>(runs.size());
    mc_csv << passes << ',' << runs.size() << ',' << fixed(total / n, 3) << ',' << fixed(per_epoch / n, 3) << '\n';
    md << markdown_row({std::to_string(passes), std::to_string(runs.size()), fixed(total / n, 3),
                        fixed(per_epoch / n, 3)});
    ++summary.mc_cost_rows;
  }
  if (mc_cost.empty()) md << "\nNo uncertainty-aware runs found.\n";
  md << '\n';

  md << "## Uncertainty dumps\n\n";
  if (uncertainty_files.empty()) {
    md << "No uncertainty dumps found.\n";
  } else {
    md << markdown_row({"file", "epoch", "samples", "mean u", "mean w", "mean w (noisy)", "mean w (clean)"})
       << markdown_rule(7);
    for (const auto& path : uncertainty_files) {
      const auto lines = read_lines(path);
      const auto header = split_csv(lines.front());
      const bool per_epoch = header.front() == "epoch";
      std::string last_epoch;
      if (per_epoch && lines.size() > 1) last_epoch = split_csv(lines.back()).front();
      double u = 0, w = 0, wn = 0, wc = 0;
      std::size_t n = 0, nn = 0, nc = 0;
      for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto cells = split_csv(lines[i]);
        if (cells.size() != header.size()) throw InvalidInput("malformed row in " + path.string());
        if (per_epoch && cells.front() != last_epoch) continue;
        const std::size_t o = per_epoch ? 1 : 0;
        const double cu = std::stod(cells[o + 1]), cw = std::stod(cells[o + 2]);
        u += cu;
        w += cw;
        ++n;
        if (cells[o + 3] == "1") {
          wn += cw;
          ++nn;
        } else {
          wc += cw;
          ++nc;
        }
      }
      auto mean = [](double s, std::size_t c) { return c ? s / static_cast<double>(c) : std::nan(""); };
      md << markdown_row({fs::relative(path, run_dir).generic_string(), per_epoch ? last_epoch : "-",
                          std::to_string(n), fixed(mean(u, n)), fixed(mean(w, n)), fixed(mean(wn, nn)),
                          fixed(mean(wc, nc))});
      ++summary.uncertainty_files;
    }
  }

  std::ofstream out(run_dir / "report.md", std::ios::binary);
  out << md.str();
  return summary;
}

}  // namespace uaai::pipeline
