// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "fnms/box.hpp"
#include "fnms/clustering.hpp"
#include "fnms/fuzzy.hpp"

namespace fnms::nms {

// Per-category suppression thresholds, indexed by fuzzy::BoxClass.
// A non-positive IoU threshold disables IoU-criterion suppression for that
// category (the shipped SVHD default of 0.0 relies on this: small dense
// objects are filtered by their score threshold instead, so adjacent
// pedestrians survive).
struct NmsConfig {
  std::array<double, 3> iou_threshold = {0.01, 0.0, 0.6};   // LD, SVHD, LVHD
  std::array<double, 3> score_threshold = {0.1, 0.3, 0.1};  // LD, SVHD, LVHD
  IouMode iou_mode = IouMode::kBev;
  std::optional<double> pre_filter_score;  // global cutoff before clustering
  bool per_label = false;  // baseline ablation: partition by detector label
};

struct NmsResult {
  struct Kept {
    int index = 0;      // original frame index
    double score = 0.0;  // post-processing score (decayed for soft-NMS)
  };
  struct Suppressed {
    int index = 0;
    int suppressor = 0;  // index of the box that removed it
  };
  std::vector<Kept> kept;  // non-increasing score, ties by original index
  std::vector<Suppressed> suppressed;
  std::vector<int> score_filtered;  // removed by a score threshold
  std::array<int, 3> kept_per_category{};
  std::array<int, 3> suppressed_per_category{};
  bool scores_decayed = false;
};

// Greedy max-score selection; boxes with IoU >= threshold against a kept
// box are suppressed. Deterministic: score ties broken by lower index.
NmsResult traditional_nms(std::span<const Box3D> boxes, double iou_threshold,
                          IouMode mode, bool per_label = false);

// Score decay instead of removal: every remaining box is decayed by
// exp(-IoU^2 / sigma) against the selected box and dropped once its score
// falls below score_threshold. Throws std::invalid_argument for sigma <= 0.
NmsResult soft_nms(std::span<const Box3D> boxes, double sigma,
                   double score_threshold, IouMode mode,
                   bool per_label = false);

// Greedy loop with DIoU = IoU - center_distance^2 / enclosing_diagonal^2 as
// the suppression criterion.
NmsResult diou_nms(std::span<const Box3D> boxes, double diou_threshold,
                   IouMode mode, bool per_label = false);

// Per-category suppression: boxes are partitioned by their fuzzy category,
// each partition runs the greedy loop with its own IoU threshold, and kept
// boxes are then filtered by the category score threshold. Partitions never
// suppress across categories. Throws std::invalid_argument when categories
// is not aligned with boxes.
NmsResult fuzzy_nms(std::span<const Box3D> boxes,
                    std::span<const fuzzy::BoxCategory> categories,
                    const NmsConfig& config);

// Per-box diagnostics captured by the full pipeline.
struct FuzzyDiagnostics {
  std::vector<int> cluster_id;
  std::vector<double> density;
  std::vector<double> volume;
  std::vector<fuzzy::BoxCategory> category;
};

struct PipelineResult {
  NmsResult result;
  FuzzyDiagnostics diagnostics;
  double elapsed_ms = 0.0;  // density + volume + inference + suppression
};

// Full Fuzzy-NMS pass over one frame: optional global score pre-filter,
// DBSCAN density, volume, fuzzy classification, per-category suppression.
PipelineResult fuzzy_nms_pipeline(std::span<const Box3D> boxes,
                                  const cluster::DbscanParams& dbscan,
                                  const fuzzy::FuzzySystem& system,
                                  const NmsConfig& config);

}  // namespace fnms::nms
