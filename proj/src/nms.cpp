// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#include "fnms/nms.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "fnms/geometry.hpp"
#include "fnms/simd/kernels.hpp"

namespace fnms::nms {
namespace {

enum class Criterion { kIou, kDiou };

// Candidate order: score descending, original index ascending.
std::vector<int> score_order(std::span<const Box3D> boxes,
                             std::span<const int> members) {
  std::vector<int> order(members.begin(), members.end());
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (boxes[a].score != boxes[b].score) {
      return boxes[a].score > boxes[b].score;
    }
    return a < b;
  });
  return order;
}

struct GroupSoa {
  std::vector<double> min_x, max_x, min_y, max_y;
  std::vector<std::uint8_t> mask;

  explicit GroupSoa(std::span<const Box3D> boxes, std::span<const int> members) {
    const std::size_t n = members.size();
    min_x.resize(n);
    max_x.resize(n);
    min_y.resize(n);
    max_y.resize(n);
    mask.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const auto corners = geom::bev_corners(boxes[members[i]]);
      double lo_x = corners[0].x, hi_x = corners[0].x;
      double lo_y = corners[0].y, hi_y = corners[0].y;
      for (int k = 1; k < 4; ++k) {
        lo_x = std::min(lo_x, corners[k].x);
        hi_x = std::max(hi_x, corners[k].x);
        lo_y = std::min(lo_y, corners[k].y);
        hi_y = std::max(hi_y, corners[k].y);
      }
      min_x[i] = lo_x;
      max_x[i] = hi_x;
      min_y[i] = lo_y;
      max_y[i] = hi_y;
    }
  }
};

// Greedy hard suppression within one candidate group. A non-positive
// threshold keeps every candidate.
void greedy_suppress(std::span<const Box3D> boxes, std::span<const int> members,
                     double threshold, IouMode mode, Criterion criterion,
                     NmsResult& out) {
  const std::vector<int> order = score_order(boxes, members);
  if (threshold <= 0.0) {
    for (int idx : order) out.kept.push_back({idx, boxes[idx].score});
    return;
  }
  GroupSoa soa(boxes, order);
  std::vector<std::uint8_t> state(order.size(), 0);  // 0 alive, 1 suppressed
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (state[i]) continue;
    const int keeper = order[i];
    out.kept.push_back({keeper, boxes[keeper].score});
    if (i + 1 == order.size()) break;
    const std::size_t rest = order.size() - (i + 1);
    simd::aabb_overlap_mask(soa.min_x.data() + i + 1, soa.max_x.data() + i + 1,
                            soa.min_y.data() + i + 1, soa.max_y.data() + i + 1,
                            rest, soa.min_x[i], soa.max_x[i], soa.min_y[i],
                            soa.max_y[i], soa.mask.data());
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (state[j] || !soa.mask[j - i - 1]) continue;
      const int cand = order[j];
      const double value = criterion == Criterion::kIou
                               ? geom::iou(boxes[keeper], boxes[cand], mode)
                               : geom::diou(boxes[keeper], boxes[cand], mode);
      if (value >= threshold) {
        state[j] = 1;
        out.suppressed.push_back({cand, keeper});
      }
    }
  }
}

void soft_suppress(std::span<const Box3D> boxes, std::span<const int> members,
                   double sigma, double score_threshold, IouMode mode,
                   NmsResult& out) {
  struct Entry {
    int index;
    double score;
  };
  std::vector<Entry> pool;
  pool.reserve(members.size());
  for (int idx : members) pool.push_back({idx, boxes[idx].score});

  while (!pool.empty()) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < pool.size(); ++i) {
      if (pool[i].score > pool[best].score ||
          (pool[i].score == pool[best].score &&
           pool[i].index < pool[best].index)) {
        best = i;
      }
    }
    const Entry selected = pool[best];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(best));
    out.kept.push_back({selected.index, selected.score});

    for (std::size_t i = 0; i < pool.size();) {
      const double overlap =
          geom::iou(boxes[selected.index], boxes[pool[i].index], mode);
      if (overlap > 0.0) {
        pool[i].score *= std::exp(-(overlap * overlap) / sigma);
      }
      if (pool[i].score < score_threshold) {
        out.suppressed.push_back({pool[i].index, selected.index});
        pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
      } else {
        ++i;
      }
    }
  }
}

void sort_result(NmsResult& out) {
  std::sort(out.kept.begin(), out.kept.end(),
            [](const NmsResult::Kept& a, const NmsResult::Kept& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.index < b.index;
            });
  std::sort(out.suppressed.begin(), out.suppressed.end(),
            [](const NmsResult::Suppressed& a, const NmsResult::Suppressed& b) {
              return a.index < b.index;
            });
  std::sort(out.score_filtered.begin(), out.score_filtered.end());
}

std::vector<std::vector<int>> label_groups(std::span<const Box3D> boxes) {
  std::map<int, std::vector<int>> by_label;
  for (int i = 0; i < static_cast<int>(boxes.size()); ++i) {
    by_label[boxes[i].label].push_back(i);
  }
  std::vector<std::vector<int>> groups;
  groups.reserve(by_label.size());
  for (auto& [label, members] : by_label) groups.push_back(std::move(members));
  return groups;
}

std::vector<std::vector<int>> as_groups(std::span<const Box3D> boxes,
                                        bool per_label) {
  if (per_label) return label_groups(boxes);
  std::vector<int> all(boxes.size());
  std::iota(all.begin(), all.end(), 0);
  return {std::move(all)};
}

}  // namespace

NmsResult traditional_nms(std::span<const Box3D> boxes, double iou_threshold,
                          IouMode mode, bool per_label) {
  NmsResult out;
  for (const auto& group : as_groups(boxes, per_label)) {
    greedy_suppress(boxes, group, iou_threshold, mode, Criterion::kIou, out);
  }
  sort_result(out);
  return out;
}

NmsResult diou_nms(std::span<const Box3D> boxes, double diou_threshold,
                   IouMode mode, bool per_label) {
  NmsResult out;
  for (const auto& group : as_groups(boxes, per_label)) {
    greedy_suppress(boxes, group, diou_threshold, mode, Criterion::kDiou, out);
  }
  sort_result(out);
  return out;
}

NmsResult soft_nms(std::span<const Box3D> boxes, double sigma,
                   double score_threshold, IouMode mode, bool per_label) {
  if (sigma <= 0.0) {
    throw std::invalid_argument("soft_nms: sigma must be positive");
  }
  NmsResult out;
  out.scores_decayed = true;
  for (const auto& group : as_groups(boxes, per_label)) {
    soft_suppress(boxes, group, sigma, score_threshold, mode, out);
  }
  sort_result(out);
  return out;
}

NmsResult fuzzy_nms(std::span<const Box3D> boxes,
                    std::span<const fuzzy::BoxCategory> categories,
                    const NmsConfig& config) {
  if (categories.size() != boxes.size()) {
    throw std::invalid_argument(
        "fuzzy_nms: category list not aligned with boxes");
  }
  NmsResult out;
  for (int cat = 0; cat < 3; ++cat) {
    std::vector<int> members;
    for (int i = 0; i < static_cast<int>(boxes.size()); ++i) {
      if (static_cast<int>(categories[i].cls) == cat) members.push_back(i);
    }
    if (members.empty()) continue;

    NmsResult partial;
    greedy_suppress(boxes, members, config.iou_threshold[cat], config.iou_mode,
                    Criterion::kIou, partial);

    // Score filter runs after suppression, per category.
    const double min_score = config.score_threshold[cat];
    for (const auto& kept : partial.kept) {
      if (kept.score < min_score) {
        out.score_filtered.push_back(kept.index);
      } else {
        out.kept.push_back(kept);
        ++out.kept_per_category[cat];
      }
    }
    for (const auto& sup : partial.suppressed) {
      out.suppressed.push_back(sup);
      ++out.suppressed_per_category[cat];
    }
  }
  sort_result(out);
  return out;
}

PipelineResult fuzzy_nms_pipeline(std::span<const Box3D> boxes,
                                  const cluster::DbscanParams& dbscan,
                                  const fuzzy::FuzzySystem& system,
                                  const NmsConfig& config) {
  using Clock = std::chrono::steady_clock;
  const auto start = Clock::now();

  PipelineResult out;

  // Optional global confidence filter ahead of density estimation.
  std::vector<int> active;
  active.reserve(boxes.size());
  if (config.pre_filter_score.has_value()) {
    const double cutoff = *config.pre_filter_score;
    for (int i = 0; i < static_cast<int>(boxes.size()); ++i) {
      if (boxes[i].score >= cutoff) {
        active.push_back(i);
      } else {
        out.result.score_filtered.push_back(i);
      }
    }
  } else {
    active.resize(boxes.size());
    std::iota(active.begin(), active.end(), 0);
  }

  std::vector<Box3D> kept_boxes;
  kept_boxes.reserve(active.size());
  for (int idx : active) kept_boxes.push_back(boxes[idx]);

  const cluster::ClusterAssignment assignment =
      cluster::estimate(std::span<const Box3D>(kept_boxes), dbscan);
  const std::vector<fuzzy::BoxCategory> categories =
      system.classify_boxes(std::span<const Box3D>(kept_boxes), assignment);

  NmsResult filtered = fuzzy_nms(kept_boxes, categories, config);

  // Map back to original frame indices.
  for (auto& kept : filtered.kept) kept.index = active[kept.index];
  for (auto& sup : filtered.suppressed) {
    sup.index = active[sup.index];
    sup.suppressor = active[sup.suppressor];
  }
  for (int idx : filtered.score_filtered) {
    out.result.score_filtered.push_back(active[idx]);
  }
  out.result.kept = std::move(filtered.kept);
  out.result.suppressed = std::move(filtered.suppressed);
  out.result.kept_per_category = filtered.kept_per_category;
  out.result.suppressed_per_category = filtered.suppressed_per_category;
  std::sort(out.result.score_filtered.begin(), out.result.score_filtered.end());

  out.elapsed_ms = std::chrono::duration<double, std::milli>(Clock::now() -
                                                             start)
                       .count();

  out.diagnostics.cluster_id.assign(boxes.size(), -1);
  out.diagnostics.density.assign(boxes.size(),
                                 std::numeric_limits<double>::quiet_NaN());
  out.diagnostics.volume.assign(boxes.size(),
                                std::numeric_limits<double>::quiet_NaN());
  out.diagnostics.category.assign(boxes.size(), fuzzy::BoxCategory{});
  for (std::size_t k = 0; k < active.size(); ++k) {
    const int idx = active[k];
    out.diagnostics.cluster_id[idx] = assignment.cluster_id[k];
    out.diagnostics.density[idx] = assignment.density[k];
    out.diagnostics.volume[idx] = geom::volume(boxes[idx]);
    out.diagnostics.category[idx] = categories[k];
  }
  return out;
}

}  // namespace fnms::nms
