// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#include "fnms/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>

#include <json.hpp>

#include "fnms/geometry.hpp"

namespace fnms::eval {
namespace {

using json = nlohmann::ordered_json;

double percent(double ratio) { return 100.0 * ratio; }

std::string format_ms(double ms) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", ms);
  return buf;
}

// Fraction of the detection footprint covered by the region.
double coverage(const Box3D& det, const Box3D& region) {
  const double inter = geom::convex_quad_intersection_area(
      geom::bev_corners(det), geom::bev_corners(region));
  const double area = det.dx * det.dy;
  return area > 0.0 ? inter / area : 0.0;
}

}  // namespace

double EvalSpec::threshold_for(const std::string& class_name) const {
  const auto it = iou_thresholds.find(class_name);
  return it == iou_thresholds.end() ? default_iou_threshold : it->second;
}

const char* to_string(Difficulty d) {
  switch (d) {
    case Difficulty::kEasy:
      return "easy";
    case Difficulty::kModerate:
      return "moderate";
    case Difficulty::kHard:
      return "hard";
  }
  return "?";
}

bool meets_difficulty(const GroundTruth& gt, Difficulty d,
                      const EvalSpec& spec) {
  const int level = static_cast<int>(d);
  if (gt.bbox_height > 0.0 && gt.bbox_height < spec.min_height[level]) {
    return false;
  }
  if (gt.occlusion > spec.max_occlusion[level]) return false;
  if (gt.truncation > spec.max_truncation[level]) return false;
  return true;
}

MatchResult match_detections(std::span<const Box3D> dets,
                             std::span<const GroundTruth> gts,
                             std::span<const Box3D> dont_care,
                             double iou_threshold, IouMode mode) {
  MatchResult out;
  out.flags.assign(dets.size(), MatchFlag::kFp);
  out.matched_gt.assign(dets.size(), -1);

  std::vector<int> order(dets.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (dets[a].score != dets[b].score) return dets[a].score > dets[b].score;
    return a < b;
  });

  std::vector<bool> taken(gts.size(), false);
  for (int det_idx : order) {
    int best_gt = -1;
    double best_iou = 0.0;
    for (int g = 0; g < static_cast<int>(gts.size()); ++g) {
      if (taken[g]) continue;
      const double overlap = geom::iou(dets[det_idx], gts[g].box, mode);
      if (overlap > best_iou) {
        best_iou = overlap;
        best_gt = g;
      }
    }
    if (best_gt >= 0 && best_iou >= iou_threshold) {
      taken[best_gt] = true;
      out.matched_gt[det_idx] = best_gt;
      out.flags[det_idx] =
          gts[best_gt].ignored ? MatchFlag::kIgnored : MatchFlag::kTp;
      continue;
    }
    bool masked = false;
    for (const Box3D& region : dont_care) {
      if (coverage(dets[det_idx], region) >= 0.5) {
        masked = true;
        break;
      }
    }
    out.flags[det_idx] = masked ? MatchFlag::kIgnored : MatchFlag::kFp;
  }
  return out;
}

double average_precision(std::vector<ScoredFlag> flags, int num_gt,
                         int recall_points) {
  std::erase_if(flags,
                [](const ScoredFlag& f) { return f.flag == MatchFlag::kIgnored; });
  if (num_gt <= 0) {
    return flags.empty() ? 1.0 : 0.0;
  }
  std::stable_sort(flags.begin(), flags.end(),
                   [](const ScoredFlag& a, const ScoredFlag& b) {
                     if (a.score != b.score) return a.score > b.score;
                     return a.flag == MatchFlag::kTp && b.flag == MatchFlag::kFp;
                   });
  std::vector<double> precision;
  std::vector<double> recall;
  precision.reserve(flags.size());
  recall.reserve(flags.size());
  int tp = 0;
  int fp = 0;
  for (const ScoredFlag& f : flags) {
    if (f.flag == MatchFlag::kTp) {
      ++tp;
    } else {
      ++fp;
    }
    precision.push_back(static_cast<double>(tp) / (tp + fp));
    recall.push_back(static_cast<double>(tp) / num_gt);
  }
  double sum = 0.0;
  for (int i = 1; i <= recall_points; ++i) {
    const double r = static_cast<double>(i) / recall_points;
    double best = 0.0;
    for (std::size_t k = 0; k < flags.size(); ++k) {
      if (recall[k] >= r - 1e-12) best = std::max(best, precision[k]);
    }
    sum += best;
  }
  return sum / recall_points;
}

nms::PipelineResult run_variant(std::span<const Box3D> boxes,
                                const VariantConfig& variant,
                                const cluster::DbscanParams& dbscan,
                                const fuzzy::FuzzySystem& system,
                                const nms::NmsConfig& config) {
  using Clock = std::chrono::steady_clock;
  if (variant.kind == VariantConfig::Kind::kFuzzy) {
    return nms::fuzzy_nms_pipeline(boxes, dbscan, system, config);
  }
  nms::PipelineResult out;
  const auto start = Clock::now();
  switch (variant.kind) {
    case VariantConfig::Kind::kTraditional:
      out.result = nms::traditional_nms(boxes, variant.iou_threshold,
                                        config.iou_mode, config.per_label);
      break;
    case VariantConfig::Kind::kSoft:
      out.result = nms::soft_nms(boxes, variant.sigma, variant.score_threshold,
                                 config.iou_mode, config.per_label);
      break;
    case VariantConfig::Kind::kDiou:
      out.result = nms::diou_nms(boxes, variant.iou_threshold, config.iou_mode,
                                 config.per_label);
      break;
    case VariantConfig::Kind::kFuzzy:
      break;
  }
  out.elapsed_ms =
      std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return out;
}

CompareReport compare_runs(std::span<const EvalFrame> frames,
                           std::span<const VariantConfig> variants,
                           std::span<const std::string> class_names,
                           const EvalSpec& spec,
                           const cluster::DbscanParams& dbscan,
                           const fuzzy::FuzzySystem& system,
                           const nms::NmsConfig& nms_config) {
  CompareReport report;
  report.class_names.assign(class_names.begin(), class_names.end());
  if (frames.empty()) return report;  // header-only tables

  for (const VariantConfig& variant : variants) {
    std::vector<double> latencies;
    latencies.reserve(frames.size());
    VariantStats stats;
    stats.method = variant.name;

    // flags[class][difficulty]
    std::vector<std::array<std::vector<ScoredFlag>, 3>> flags(
        class_names.size());
    std::vector<std::array<int, 3>> gt_counts(class_names.size(),
                                              std::array<int, 3>{});

    for (const EvalFrame& ef : frames) {
      const auto run = run_variant(ef.frame.boxes, variant, dbscan, system,
                                   nms_config);
      latencies.push_back(run.elapsed_ms);
      stats.kept += static_cast<long>(run.result.kept.size());
      stats.suppressed += static_cast<long>(run.result.suppressed.size());
      stats.score_filtered +=
          static_cast<long>(run.result.score_filtered.size());

      for (int c = 0; c < static_cast<int>(class_names.size()); ++c) {
        std::vector<Box3D> dets;
        std::vector<double> det_scores;
        for (const auto& kept : run.result.kept) {
          const Box3D& box = ef.frame.boxes[kept.index];
          if (box.label == c) {
            Box3D scored = box;
            scored.score = kept.score;  // post-processing score
            dets.push_back(scored);
          }
        }
        for (int d = 0; d < 3; ++d) {
          std::vector<GroundTruth> gts;
          for (const GroundTruth& gt : ef.gts) {
            if (gt.box.label != c) continue;
            GroundTruth g = gt;
            g.ignored = !meets_difficulty(gt, static_cast<Difficulty>(d), spec);
            if (!g.ignored) ++gt_counts[c][d];
            gts.push_back(g);
          }
          const auto match = match_detections(
              dets, gts, ef.frame.dont_care,
              spec.threshold_for(report.class_names[c]), spec.iou_mode);
          for (std::size_t k = 0; k < dets.size(); ++k) {
            flags[c][d].push_back({dets[k].score, match.flags[k]});
          }
        }
      }
    }

    for (int c = 0; c < static_cast<int>(class_names.size()); ++c) {
      for (int d = 0; d < 3; ++d) {
        CompareRow row;
        row.method = variant.name;
        row.class_name = report.class_names[c];
        row.difficulty = static_cast<Difficulty>(d);
        row.num_gt = gt_counts[c][d];
        row.ap = average_precision(flags[c][d], gt_counts[c][d],
                                   spec.recall_points);
        report.rows.push_back(row);
      }
    }

    if (!latencies.empty()) {
      std::vector<double> sorted = latencies;
      std::sort(sorted.begin(), sorted.end());
      stats.mean_ms =
          std::accumulate(sorted.begin(), sorted.end(), 0.0) / sorted.size();
      const std::size_t p95_idx = static_cast<std::size_t>(
          std::ceil(0.95 * static_cast<double>(sorted.size())));
      stats.p95_ms = sorted[std::min(sorted.size() - 1,
                                     p95_idx == 0 ? 0 : p95_idx - 1)];
    }
    report.stats.push_back(stats);
  }
  return report;
}

std::string CompareReport::to_csv() const {
  std::string out = "method";
  for (const std::string& cls : class_names) {
    for (int d = 0; d < 3; ++d) {
      out += "," + cls + "_" + to_string(static_cast<Difficulty>(d));
    }
  }
  out += ",time_ms_mean,time_ms_p95\n";
  for (const VariantStats& vs : stats) {
    out += vs.method;
    for (const std::string& cls : class_names) {
      for (int d = 0; d < 3; ++d) {
        double ap = 0.0;
        for (const CompareRow& row : rows) {
          if (row.method == vs.method && row.class_name == cls &&
              static_cast<int>(row.difficulty) == d) {
            ap = row.ap;
          }
        }
        char buf[32];
        std::snprintf(buf, sizeof(buf), ",%.2f", percent(ap));
        out += buf;
      }
    }
    out += "," + format_ms(vs.mean_ms) + "," + format_ms(vs.p95_ms) + "\n";
  }
  return out;
}

std::string CompareReport::to_json() const {
  json j;
  j["classes"] = class_names;
  j["rows"] = json::array();
  for (const CompareRow& row : rows) {
    j["rows"].push_back({{"method", row.method},
                         {"class", row.class_name},
                         {"difficulty", to_string(row.difficulty)},
                         {"ap", row.ap},
                         {"num_gt", row.num_gt}});
  }
  j["timing"] = json::array();
  for (const VariantStats& vs : stats) {
    j["timing"].push_back({{"method", vs.method},
                           {"mean_ms", vs.mean_ms},
                           {"p95_ms", vs.p95_ms},
                           {"kept", vs.kept},
                           {"suppressed", vs.suppressed},
                           {"score_filtered", vs.score_filtered}});
  }
  return j.dump(2);
}

}  // namespace fnms::eval
