// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "fnms/box.hpp"
#include "fnms/clustering.hpp"
#include "fnms/nms.hpp"

namespace fnms::eval {

// KITTI-style evaluation protocol constants. Difficulty gating follows the
// devkit convention: minimum 2D bbox height, maximum occlusion level and
// maximum truncation per level (easy, moderate, hard).
struct EvalSpec {
  std::map<std::string, double> iou_thresholds = {
      {"Car", 0.7}, {"Pedestrian", 0.5}, {"Cyclist", 0.5}};
  double default_iou_threshold = 0.5;
  std::array<double, 3> min_height = {40.0, 25.0, 25.0};
  std::array<int, 3> max_occlusion = {0, 1, 2};
  std::array<double, 3> max_truncation = {0.15, 0.3, 0.5};
  int recall_points = 40;  // 40 (modern protocol) or 11
  IouMode iou_mode = IouMode::kBev;

  double threshold_for(const std::string& class_name) const;
};

enum class Difficulty { kEasy = 0, kModerate = 1, kHard = 2 };

const char* to_string(Difficulty d);

// Ground truth with the label-file attributes difficulty gating needs.
// bbox_height <= 0 means "unknown" and passes the height gate. `ignored`
// marks a ground truth outside the current difficulty: it can absorb a
// matching detection (which is then neither TP nor FP) but does not count
// toward num_gt.
struct GroundTruth {
  Box3D box;
  double bbox_height = 0.0;
  int occlusion = 0;
  double truncation = 0.0;
  bool ignored = false;
};

// True when the ground truth is within the difficulty level.
bool meets_difficulty(const GroundTruth& gt, Difficulty d,
                      const EvalSpec& spec);

enum class MatchFlag { kTp, kFp, kIgnored };

struct MatchResult {
  std::vector<MatchFlag> flags;   // aligned with dets
  std::vector<int> matched_gt;    // -1 when unmatched
};

// Greedy matching for one frame and one class: detections in descending
// score order take their best still-unmatched ground truth; a detection is
// TP iff that IoU reaches the threshold. Unmatched detections overlapping a
// DontCare region (BEV intersection over detection area >= 0.5) are
// ignored.
MatchResult match_detections(std::span<const Box3D> dets,
                             std::span<const GroundTruth> gts,
                             std::span<const Box3D> dont_care,
                             double iou_threshold, IouMode mode);

struct ScoredFlag {
  double score = 0.0;
  MatchFlag flag = MatchFlag::kFp;
};

// Interpolated average precision over `recall_points` positions: the mean
// over r in {1/N, ..., N/N} of the maximum precision at recall >= r.
// num_gt == 0: 1.0 when no detection survives, else 0.0.
double average_precision(std::vector<ScoredFlag> flags, int num_gt,
                         int recall_points);

struct EvalFrame {
  Frame frame;
  std::vector<GroundTruth> gts;
};

struct VariantConfig {
  enum class Kind { kTraditional, kSoft, kDiou, kFuzzy };
  Kind kind = Kind::kTraditional;
  std::string name = "traditional";
  double iou_threshold = 0.5;    // traditional / diou
  double sigma = 0.5;            // soft
  double score_threshold = 0.1;  // soft final cutoff
};

// Runs one variant over one frame (NmsConfig supplies the fuzzy-variant
// parameters and the IoU mode for every variant).
nms::PipelineResult run_variant(std::span<const Box3D> boxes,
                                const VariantConfig& variant,
                                const cluster::DbscanParams& dbscan,
                                const fuzzy::FuzzySystem& system,
                                const nms::NmsConfig& config);

struct CompareRow {
  std::string method;
  std::string class_name;
  Difficulty difficulty = Difficulty::kEasy;
  double ap = 0.0;
  int num_gt = 0;
};

struct VariantStats {
  std::string method;
  double mean_ms = 0.0;
  double p95_ms = 0.0;
  long kept = 0;
  long suppressed = 0;
  long score_filtered = 0;
};

struct CompareReport {
  std::vector<std::string> class_names;
  std::vector<CompareRow> rows;
  std::vector<VariantStats> stats;

  // method, <class>_<difficulty> AP columns (percent, 2 decimals),
  // time_ms_mean, time_ms_p95.
  std::string to_csv() const;
  std::string to_json() const;
};

// AP table per variant/class/difficulty plus per-frame latency stats.
// Deterministic apart from the timing columns.
CompareReport compare_runs(std::span<const EvalFrame> frames,
                           std::span<const VariantConfig> variants,
                           std::span<const std::string> class_names,
                           const EvalSpec& spec,
                           const cluster::DbscanParams& dbscan,
                           const fuzzy::FuzzySystem& system,
                           const nms::NmsConfig& nms_config);

}  // namespace fnms::eval
