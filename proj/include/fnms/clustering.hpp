// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <span>
#include <vector>

#include "fnms/box.hpp"

namespace fnms::cluster {

struct Point3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

struct DbscanParams {
  double eps = 0.3;  // neighborhood radius, meters
  int min_pts = 4;   // core threshold, self inclusive
};

// Per-box cluster id (0 = noise, 1..K in discovery order) and normalized
// density N_k / max(N_0, ..., N_K). All members of a cluster share one
// density value; the largest group (noise included) has density 1.
struct ClusterAssignment {
  std::vector<int> cluster_id;
  std::vector<double> density;
  std::vector<int> cluster_sizes;  // index 0 = noise count
  int num_clusters = 0;
};

// Standard DBSCAN over 3D points with Euclidean distance (closed eps ball).
// Deterministic given input order: clusters are numbered by the input rank
// of their first core point, and a border point reachable from several
// clusters joins the one discovered first. Empty input -> empty output.
std::vector<int> dbscan(std::span<const Point3> points,
                        const DbscanParams& params);

// Densities from cluster ids produced by dbscan.
std::vector<double> cluster_density(std::span<const int> cluster_ids);

// dbscan over box centers followed by cluster_density.
ClusterAssignment estimate(const Frame& frame, const DbscanParams& params);
ClusterAssignment estimate(std::span<const Box3D> boxes,
                           const DbscanParams& params);

}  // namespace fnms::cluster
