// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

// Command-line driver: run one NMS variant over a directory of KITTI-format
// frames, compare the variants against labels, or dump fuzzy-system
// diagnostics as plot-ready CSV.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <numeric>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "fnms/config.hpp"
#include "fnms/eval.hpp"
#include "fnms/geometry.hpp"
#include "fnms/kitti_io.hpp"
#include "fnms/nms.hpp"
#include "fnms/results_io.hpp"
#include "fnms/simd/kernels.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMissingInput = 2;
constexpr int kExitBadConfig = 3;

struct CommonOptions {
  std::string input;
  std::string labels;
  std::string config_path;
  std::string output;
  std::string iou_mode;
  int jobs = 0;
};

struct RunOptions {
  CommonOptions common;
  std::string variant = "fuzzy";
  std::string format = "kitti";
  double iou = 0.5;
  double sigma = 0.5;
  double soft_score = 0.1;
  bool per_label = false;
  bool bench = false;
};

class CliError : public std::runtime_error {
 public:
  CliError(int code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  int code() const { return code_; }

 private:
  int code_;
};

fnms::config::ToolkitConfig load_toolkit_config(const CommonOptions& opts) {
  std::string path = opts.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("FUZZY_NMS_CONFIG")) path = env;
  }
  fnms::config::ToolkitConfig cfg;
  if (!path.empty()) {
    try {
      cfg = fnms::config::load_config(path);
    } catch (const fnms::config::ConfigError& e) {
      throw CliError(kExitBadConfig,
                     std::string("config validation failed: ") + e.what());
    }
  }
  if (!opts.iou_mode.empty()) {
    const auto mode = fnms::iou_mode_from_string(opts.iou_mode);
    if (!mode.has_value()) {
      throw CliError(kExitBadConfig, "invalid --iou-mode (expected bev or 3d)");
    }
    cfg.nms.iou_mode = *mode;
    cfg.eval.iou_mode = *mode;
  }
  return cfg;
}

fnms::eval::VariantConfig variant_from_options(const RunOptions& opts) {
  fnms::eval::VariantConfig v;
  v.name = opts.variant;
  if (opts.variant == "traditional") {
    v.kind = fnms::eval::VariantConfig::Kind::kTraditional;
  } else if (opts.variant == "soft") {
    v.kind = fnms::eval::VariantConfig::Kind::kSoft;
  } else if (opts.variant == "diou") {
    v.kind = fnms::eval::VariantConfig::Kind::kDiou;
  } else if (opts.variant == "fuzzy") {
    v.kind = fnms::eval::VariantConfig::Kind::kFuzzy;
  } else {
    throw CliError(kExitBadConfig, "unknown variant '" + opts.variant +
                                       "'; valid: traditional, soft, diou, "
                                       "fuzzy");
  }
  v.iou_threshold = opts.iou;
  v.sigma = opts.sigma;
  v.score_threshold = opts.soft_score;
  return v;
}

std::vector<fs::path> list_frame_files(const std::string& dir) {
  if (dir.empty() || !fs::is_directory(dir)) {
    throw CliError(kExitMissingInput,
                   "input directory missing or not a directory: " + dir);
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".txt") {
      files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  return files;
}

std::vector<fnms::kitti::ParsedFrame> load_frames(
    const CommonOptions& opts, const fnms::config::ToolkitConfig& cfg,
    bool require_labels) {
  const auto files = list_frame_files(opts.input);
  if (require_labels && opts.labels.empty()) {
    throw CliError(kExitMissingInput, "this command requires --labels");
  }
  std::vector<fnms::kitti::ParsedFrame> frames;
  frames.reserve(files.size());
  for (const fs::path& file : files) {
    const std::string frame_id = file.stem().string();
    std::optional<std::string> label_text;
    if (!opts.labels.empty()) {
      const fs::path label_path = fs::path(opts.labels) / file.filename();
      if (fs::exists(label_path)) {
        label_text = fnms::kitti::read_text_file(label_path);
      } else if (require_labels) {
        throw CliError(kExitMissingInput,
                       "label file missing: " + label_path.string());
      }
    }
    try {
      frames.push_back(fnms::kitti::parse_frame(
          frame_id,
          label_text.has_value()
              ? std::optional<std::string_view>(*label_text)
              : std::nullopt,
          fnms::kitti::read_text_file(file), cfg.categories,
          cfg.unknown_category));
    } catch (const fnms::kitti::ParseError& e) {
      throw CliError(kExitBadConfig,
                     "parse error in " + file.string() + ": " + e.what());
    }
  }
  return frames;
}

void ensure_output_dir(const std::string& dir) {
  if (dir.empty()) {
    throw CliError(kExitBadConfig, "--output is required");
  }
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw CliError(kExitBadConfig, "cannot create output directory: " + dir);
  }
}

int effective_jobs(int requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

// Frame-level worker pool; results land in preallocated slots so the output
// order is independent of the job count.
template <typename Fn>
void parallel_for(std::size_t count, int jobs, Fn&& fn) {
  if (count == 0) return;
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(std::max(jobs, 1)), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      for (std::size_t i = next.fetch_add(1); i < count;
           i = next.fetch_add(1)) {
        fn(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

json timing_stats(std::vector<double> latencies) {
  json out;
  if (latencies.empty()) {
    out["timed_frames"] = 0;
    return out;
  }
  std::sort(latencies.begin(), latencies.end());
  const double sum = std::accumulate(latencies.begin(), latencies.end(), 0.0);
  const std::size_t p95_idx = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(latencies.size())));
  out["timed_frames"] = latencies.size();
  out["mean_ms"] = sum / static_cast<double>(latencies.size());
  out["p95_ms"] =
      latencies[std::min(latencies.size() - 1, p95_idx == 0 ? 0 : p95_idx - 1)];
  return out;
}

int command_run(const RunOptions& opts) {
  const auto cfg = load_toolkit_config(opts.common);
  const auto variant = variant_from_options(opts);
  const auto format = fnms::kitti::output_format_from_string(opts.format);
  if (!format.has_value()) {
    throw CliError(kExitBadConfig,
                   "invalid --format (expected kitti, json or csv)");
  }
  if (variant.kind == fnms::eval::VariantConfig::Kind::kSoft &&
      opts.sigma <= 0.0) {
    throw CliError(kExitBadConfig, "--sigma must be positive");
  }
  if (opts.iou < 0.0 || opts.iou > 1.0) {
    throw CliError(kExitBadConfig, "--iou must be in [0, 1]");
  }
  auto nms_config = cfg.nms;
  nms_config.per_label = nms_config.per_label || opts.per_label;

  const auto frames = load_frames(opts.common, cfg, /*require_labels=*/false);
  ensure_output_dir(opts.common.output);
  const fnms::fuzzy::FuzzySystem system(cfg.fuzzy);

  if (opts.bench) {
    // Warm-up before any timing.
    const std::size_t warmup = std::min<std::size_t>(10, frames.size());
    for (std::size_t i = 0; i < warmup; ++i) {
      (void)fnms::eval::run_variant(frames[i].frame.boxes, variant, cfg.dbscan,
                                    system, nms_config);
    }
  }

  std::vector<fnms::nms::PipelineResult> results(frames.size());
  const int jobs = effective_jobs(opts.common.jobs);
  parallel_for(frames.size(), jobs, [&](std::size_t i) {
    results[i] = fnms::eval::run_variant(frames[i].frame.boxes, variant,
                                         cfg.dbscan, system, nms_config);
  });

  const fs::path out_dir(opts.common.output);
  std::vector<double> latencies;
  json frame_summaries = json::array();
  for (std::size_t i = 0; i < frames.size(); ++i) {
    fnms::kitti::write_frame_results(out_dir, frames[i], results[i], *format,
                                     cfg.categories);
    latencies.push_back(results[i].elapsed_ms);
    frame_summaries.push_back(
        {{"id", frames[i].frame.frame_id},
         {"input_boxes", frames[i].frame.boxes.size()},
         {"kept", results[i].result.kept.size()},
         {"suppressed", results[i].result.suppressed.size()},
         {"score_filtered", results[i].result.score_filtered.size()},
         {"skipped_unknown", frames[i].skipped_unknown}});
  }

  json manifest;
  manifest["tool"] = "fuzzy-nms";
  manifest["command"] = "run";
  manifest["variant"] = variant.name;
  manifest["iou_mode"] = fnms::to_string(nms_config.iou_mode);
  manifest["format"] = fnms::kitti::to_string(*format);
  manifest["kernel_backend"] = fnms::simd::active_backend_name();
  manifest["config_hash"] = fnms::config::config_hash(cfg);
  manifest["jobs"] = jobs;
  manifest["bench"] = opts.bench;
  manifest["frames"] = frame_summaries;
  manifest["timing"] = timing_stats(latencies);
  fnms::kitti::write_text_file(out_dir / "manifest.json", manifest.dump(2));
  return kExitOk;
}

int command_compare(const RunOptions& opts) {
  const auto cfg = load_toolkit_config(opts.common);
  const auto frames = load_frames(opts.common, cfg, /*require_labels=*/true);
  ensure_output_dir(opts.common.output);
  const fnms::fuzzy::FuzzySystem system(cfg.fuzzy);

  std::vector<fnms::eval::EvalFrame> eval_frames;
  eval_frames.reserve(frames.size());
  for (const auto& parsed : frames) {
    fnms::eval::EvalFrame ef;
    ef.frame = parsed.frame;
    if (parsed.frame.ground_truth.has_value()) {
      for (std::size_t g = 0; g < parsed.frame.ground_truth->size(); ++g) {
        const auto& record = parsed.gt_records[g];
        fnms::eval::GroundTruth gt;
        gt.box = (*parsed.frame.ground_truth)[g];
        gt.bbox_height = record.bbox[3] - record.bbox[1];
        gt.occlusion = record.occluded;
        gt.truncation = record.truncated;
        ef.gts.push_back(gt);
      }
    }
    eval_frames.push_back(std::move(ef));
  }

  std::vector<fnms::eval::VariantConfig> variants;
  for (const char* name : {"traditional", "soft", "diou", "fuzzy"}) {
    RunOptions vopts = opts;
    vopts.variant = name;
    variants.push_back(variant_from_options(vopts));
  }

  const auto report = fnms::eval::compare_runs(
      eval_frames, variants, cfg.categories.names, cfg.eval, cfg.dbscan,
      system, cfg.nms);

  const fs::path out_dir(opts.common.output);
  fnms::kitti::write_text_file(out_dir / "compare.csv", report.to_csv());
  fnms::kitti::write_text_file(out_dir / "compare.json", report.to_json());

  json manifest;
  manifest["tool"] = "fuzzy-nms";
  manifest["command"] = "compare";
  manifest["iou_mode"] = fnms::to_string(cfg.nms.iou_mode);
  manifest["kernel_backend"] = fnms::simd::active_backend_name();
  manifest["config_hash"] = fnms::config::config_hash(cfg);
  manifest["frames"] = frames.size();
  fnms::kitti::write_text_file(out_dir / "manifest.json", manifest.dump(2));
  return kExitOk;
}

void write_mf_curves(const fs::path& path,
                     const fnms::config::ToolkitConfig& cfg) {
  std::string out = "variable,set,x,mu\n";
  const auto dump_var = [&](const fnms::fuzzy::FuzzyVariable& var) {
    for (const auto& set : var.sets) {
      for (int k = 0; k <= 200; ++k) {
        const double x = var.lo + (var.hi - var.lo) * k / 200.0;
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s,%s,%.8f,%.8f\n", var.name.c_str(),
                      set.name.c_str(), x, fnms::fuzzy::mf_eval(set.mf, x));
        out += buf;
      }
    }
  };
  dump_var(cfg.fuzzy.density);
  dump_var(cfg.fuzzy.volume);
  dump_var(cfg.fuzzy.output);
  fnms::kitti::write_text_file(path, out);
}

void write_histogram(const fs::path& path, const char* name,
                     const std::vector<double>& values, double lo, double hi,
                     int bins) {
  std::vector<int> counts(static_cast<std::size_t>(bins), 0);
  for (double v : values) {
    if (std::isnan(v)) continue;
    int bin = static_cast<int>((v - lo) / (hi - lo) * bins);
    bin = std::clamp(bin, 0, bins - 1);
    ++counts[static_cast<std::size_t>(bin)];
  }
  std::string out = std::string(name) + "_lo," + name + "_hi,count\n";
  for (int b = 0; b < bins; ++b) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%d\n",
                  lo + (hi - lo) * b / bins, lo + (hi - lo) * (b + 1) / bins,
                  counts[static_cast<std::size_t>(b)]);
    out += buf;
  }
  fnms::kitti::write_text_file(path, out);
}

int command_inspect(const RunOptions& opts) {
  const auto cfg = load_toolkit_config(opts.common);
  ensure_output_dir(opts.common.output);
  const fs::path out_dir(opts.common.output);
  write_mf_curves(out_dir / "mf_curves.csv", cfg);

  json manifest;
  manifest["tool"] = "fuzzy-nms";
  manifest["command"] = "inspect";
  manifest["config_hash"] = fnms::config::config_hash(cfg);
  manifest["kernel_backend"] = fnms::simd::active_backend_name();

  if (!opts.common.input.empty()) {
    const auto frames = load_frames(opts.common, cfg, /*require_labels=*/false);
    const fnms::fuzzy::FuzzySystem system(cfg.fuzzy);

    std::string boxes_csv = std::string(fnms::kitti::kResultsCsvHeader) + "\n";
    std::string firing_csv =
        "frame,box_index,rule,density_set,volume_set,class_set,strength\n";
    std::vector<double> densities;
    std::vector<double> volumes;
    for (const auto& parsed : frames) {
      const auto run = fnms::nms::fuzzy_nms_pipeline(parsed.frame.boxes,
                                                     cfg.dbscan, system,
                                                     cfg.nms);
      boxes_csv += fnms::kitti::frame_to_csv(parsed, run, cfg.categories);
      for (std::size_t i = 0; i < parsed.frame.boxes.size(); ++i) {
        if (i < run.diagnostics.density.size() &&
            !std::isnan(run.diagnostics.density[i])) {
          densities.push_back(run.diagnostics.density[i]);
          volumes.push_back(run.diagnostics.volume[i]);
          for (const auto& firing : system.rule_firings(
                   run.diagnostics.density[i], run.diagnostics.volume[i])) {
            const auto& rule = system.config().rules[firing.rule];
            char buf[160];
            std::snprintf(
                buf, sizeof(buf), "%s,%zu,%d,%s,%s,%s,%.8f\n",
                parsed.frame.frame_id.c_str(), i, firing.rule,
                cfg.fuzzy.density.sets[rule.density_set].name.c_str(),
                cfg.fuzzy.volume.sets[rule.volume_set].name.c_str(),
                cfg.fuzzy.output.sets[rule.output_set].name.c_str(),
                firing.strength);
            firing_csv += buf;
          }
        }
      }
    }
    fnms::kitti::write_text_file(out_dir / "boxes.csv", boxes_csv);
    fnms::kitti::write_text_file(out_dir / "rule_firings.csv", firing_csv);
    write_histogram(out_dir / "density_hist.csv", "density", densities,
                    cfg.fuzzy.density.lo, cfg.fuzzy.density.hi, 20);
    write_histogram(out_dir / "volume_hist.csv", "volume", volumes,
                    cfg.fuzzy.volume.lo, cfg.fuzzy.volume.hi, 20);
    manifest["frames"] = frames.size();
  }
  fnms::kitti::write_text_file(out_dir / "manifest.json", manifest.dump(2));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fuzzy-NMS post-processing toolkit for 3D detection dumps"};
  app.require_subcommand(1);

  RunOptions run_opts;
  RunOptions compare_opts;
  RunOptions inspect_opts;

  const auto add_common = [](CLI::App* cmd, CommonOptions& common,
                             bool input_required) {
    auto* input = cmd->add_option("--input", common.input,
                                  "Directory of per-frame detection files");
    if (input_required) input->required();
    cmd->add_option("--labels", common.labels,
                    "Directory of KITTI label files");
    cmd->add_option("--config", common.config_path,
                    "Toolkit config (JSON); falls back to FUZZY_NMS_CONFIG");
    cmd->add_option("--output", common.output, "Output directory")->required();
    cmd->add_option("--iou-mode", common.iou_mode,
                    "Suppression IoU mode: bev or 3d");
    cmd->add_option("--jobs", common.jobs,
                    "Worker threads (default: available cores)");
  };

  auto* run_cmd = app.add_subcommand("run", "Run one NMS variant");
  add_common(run_cmd, run_opts.common, true);
  run_cmd->add_option("--variant", run_opts.variant,
                      "traditional | soft | diou | fuzzy");
  run_cmd->add_option("--format", run_opts.format, "kitti | json | csv");
  run_cmd->add_option("--iou", run_opts.iou,
                      "IoU threshold for traditional/diou");
  run_cmd->add_option("--sigma", run_opts.sigma, "Soft-NMS Gaussian sigma");
  run_cmd->add_option("--score", run_opts.soft_score,
                      "Soft-NMS final score threshold");
  run_cmd->add_flag("--per-label", run_opts.per_label,
                    "Partition baseline NMS by detector label");
  run_cmd->add_flag("--bench", run_opts.bench,
                    "Benchmark mode: 10 warm-up frames before timing");

  auto* compare_cmd =
      app.add_subcommand("compare", "Compare all variants against labels");
  add_common(compare_cmd, compare_opts.common, true);
  compare_cmd->add_option("--iou", compare_opts.iou,
                          "IoU threshold for traditional/diou");
  compare_cmd->add_option("--sigma", compare_opts.sigma,
                          "Soft-NMS Gaussian sigma");
  compare_cmd->add_option("--score", compare_opts.soft_score,
                          "Soft-NMS final score threshold");

  auto* inspect_cmd =
      app.add_subcommand("inspect", "Dump fuzzy-system diagnostics as CSV");
  add_common(inspect_cmd, inspect_opts.common, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitBadConfig;
  }

  try {
    if (run_cmd->parsed()) return command_run(run_opts);
    if (compare_cmd->parsed()) return command_compare(compare_opts);
    if (inspect_cmd->parsed()) return command_inspect(inspect_opts);
  } catch (const CliError& e) {
    std::cerr << "fuzzy-nms: " << e.what() << "\n";
    return e.code();
  } catch (const std::exception& e) {
    std::cerr << "fuzzy-nms: " << e.what() << "\n";
    return kExitBadConfig;
  }
  return kExitOk;
}
