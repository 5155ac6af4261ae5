// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#include "fnms/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <unordered_map>

#include "fnms/simd/kernels.hpp"

namespace fnms::cluster {
namespace {

// Grid hash with cell size eps: all neighbors of a point live in the
// 27 cells around it.
struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellKeyHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = 1469598103934665603ull;
    for (std::uint64_t v : {static_cast<std::uint64_t>(k.x),
                            static_cast<std::uint64_t>(k.y),
                            static_cast<std::uint64_t>(k.z)}) {
      h ^= v;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

struct CellRange {
  std::size_t begin = 0;
  std::size_t end = 0;
};

class NeighborIndex {
 public:
  NeighborIndex(std::span<const Point3> points, double eps)
      : eps_(eps), n_(points.size()) {
    xs_.resize(n_);
    ys_.resize(n_);
    zs_.resize(n_);
    order_.resize(n_);
    std::unordered_map<CellKey, std::vector<std::size_t>, CellKeyHash> cells;
    cells.reserve(n_ * 2 + 1);
    for (std::size_t i = 0; i < n_; ++i) {
      cells[cell_of(points[i])].push_back(i);
    }
    // Points laid out SoA per cell so the radius kernel scans contiguous
    // ranges.
    std::size_t pos = 0;
    ranges_.reserve(cells.size());
    for (auto& [key, members] : cells) {
      CellRange range{pos, pos + members.size()};
      for (std::size_t idx : members) {
        xs_[pos] = points[idx].x;
        ys_[pos] = points[idx].y;
        zs_[pos] = points[idx].z;
        order_[pos] = idx;
        ++pos;
      }
      ranges_.emplace(key, range);
    }
    mask_.resize(n_);
  }

  // Indices (original order values) within eps of `q`, self included.
  void query(const Point3& q, std::vector<std::size_t>& out) const {
    out.clear();
    const CellKey center = cell_of(q);
    const double r2 = eps_ * eps_;
    for (std::int64_t dx = -1; dx <= 1; ++dx) {
      for (std::int64_t dy = -1; dy <= 1; ++dy) {
        for (std::int64_t dz = -1; dz <= 1; ++dz) {
          const auto it = ranges_.find(
              CellKey{center.x + dx, center.y + dy, center.z + dz});
          if (it == ranges_.end()) continue;
          const CellRange r = it->second;
          const std::size_t len = r.end - r.begin;
          simd::radius_mask(xs_.data() + r.begin, ys_.data() + r.begin,
                            zs_.data() + r.begin, len, q.x, q.y, q.z, r2,
                            mask_.data());
          for (std::size_t k = 0; k < len; ++k) {
            if (mask_[k]) out.push_back(order_[r.begin + k]);
          }
        }
      }
    }
  }

 private:
  CellKey cell_of(const Point3& p) const {
    return CellKey{static_cast<std::int64_t>(std::floor(p.x / eps_)),
                   static_cast<std::int64_t>(std::floor(p.y / eps_)),
                   static_cast<std::int64_t>(std::floor(p.z / eps_))};
  }

  double eps_;
  std::size_t n_;
  std::vector<double> xs_, ys_, zs_;
  std::vector<std::size_t> order_;
  std::unordered_map<CellKey, CellRange, CellKeyHash> ranges_;
  mutable std::vector<std::uint8_t> mask_;
};

}  // namespace

std::vector<int> dbscan(std::span<const Point3> points,
                        const DbscanParams& params) {
  const std::size_t n = points.size();
  std::vector<int> labels(n, 0);
  if (n == 0) return labels;

  NeighborIndex index(points, params.eps);
  std::vector<std::size_t> neighbors;
  std::vector<bool> is_core(n, false);
  std::vector<std::vector<std::size_t>> core_neighbors(n);
  for (std::size_t i = 0; i < n; ++i) {
    index.query(points[i], neighbors);
    if (neighbors.size() >= static_cast<std::size_t>(params.min_pts)) {
      is_core[i] = true;
      core_neighbors[i] = neighbors;
    }
  }

  std::vector<bool> assigned(n, false);
  int next_cluster = 0;
  std::deque<std::size_t> queue;
  for (std::size_t seed = 0; seed < n; ++seed) {
    if (!is_core[seed] || assigned[seed]) continue;
    const int cluster = ++next_cluster;
    labels[seed] = cluster;
    assigned[seed] = true;
    queue.assign(1, seed);
    while (!queue.empty()) {
      const std::size_t p = queue.front();
      queue.pop_front();
      for (std::size_t q : core_neighbors[p]) {
        if (assigned[q]) continue;
        labels[q] = cluster;
        assigned[q] = true;
        if (is_core[q]) queue.push_back(q);
      }
    }
  }
  return labels;
}

std::vector<double> cluster_density(std::span<const int> cluster_ids) {
  std::vector<double> density(cluster_ids.size(), 0.0);
  if (cluster_ids.empty()) return density;
  int max_id = 0;
  for (int id : cluster_ids) max_id = std::max(max_id, id);
  std::vector<int> counts(static_cast<std::size_t>(max_id) + 1, 0);
  for (int id : cluster_ids) ++counts[static_cast<std::size_t>(id)];
  const int denom = *std::max_element(counts.begin(), counts.end());
  for (std::size_t i = 0; i < cluster_ids.size(); ++i) {
    density[i] =
        static_cast<double>(counts[static_cast<std::size_t>(cluster_ids[i])]) /
        static_cast<double>(denom);
  }
  return density;
}

ClusterAssignment estimate(std::span<const Box3D> boxes,
                           const DbscanParams& params) {
  std::vector<Point3> centers;
  centers.reserve(boxes.size());
  for (const Box3D& b : boxes) centers.push_back({b.cx, b.cy, b.cz});

  ClusterAssignment out;
  out.cluster_id = dbscan(centers, params);
  out.density = cluster_density(out.cluster_id);
  int max_id = 0;
  for (int id : out.cluster_id) max_id = std::max(max_id, id);
  out.num_clusters = max_id;
  out.cluster_sizes.assign(static_cast<std::size_t>(max_id) + 1, 0);
  for (int id : out.cluster_id) ++out.cluster_sizes[static_cast<std::size_t>(id)];
  if (boxes.empty()) out.cluster_sizes.clear();
  return out;
}

ClusterAssignment estimate(const Frame& frame, const DbscanParams& params) {
  return estimate(std::span<const Box3D>(frame.boxes), params);
}

}  // namespace fnms::cluster
