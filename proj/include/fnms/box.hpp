// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace fnms {

// Oriented 3D bounding box: center, extents, rotation about the vertical
// axis of the (cx, cy) footprint plane. dz spans the cz axis.
struct Box3D {
  double cx = 0.0;
  double cy = 0.0;
  double cz = 0.0;
  double dx = 1.0;  // length
  double dy = 1.0;  // width
  double dz = 1.0;  // height
  double yaw = 0.0;  // radians, normalized to [-pi, pi]
  int label = 0;     // detector category id, >= 0
  double score = 0.0;  // confidence in [0, 1]
};

// Wraps an angle into [-pi, pi].
double normalize_angle(double yaw);

// Checks the Box3D invariants: finite fields, strictly positive extents,
// yaw in [-pi, pi], label >= 0, score in [0, 1]. Returns a description of
// the first violation, or nullopt when valid.
std::optional<std::string> validate_box(const Box3D& box);

// One point-cloud frame's candidate boxes, in stable input order.
struct Frame {
  std::string frame_id;
  std::vector<Box3D> boxes;
  std::optional<std::vector<Box3D>> ground_truth;  // score field ignored
  std::vector<Box3D> dont_care;  // evaluation masking regions
};

enum class IouMode { kBev, k3d };

const char* to_string(IouMode mode);
std::optional<IouMode> iou_mode_from_string(const std::string& name);

}  // namespace fnms
