// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#include "fnms/box.hpp"

#include <cmath>

namespace fnms {

double normalize_angle(double yaw) {
  if (!std::isfinite(yaw)) return yaw;
  const double two_pi = 2.0 * M_PI;
  double a = std::fmod(yaw, two_pi);
  if (a > M_PI) a -= two_pi;
  if (a < -M_PI) a += two_pi;
  return a;
}

std::optional<std::string> validate_box(const Box3D& box) {
  const double fields[] = {box.cx, box.cy, box.cz, box.dx,
                           box.dy, box.dz, box.yaw, box.score};
  for (double f : fields) {
    if (!std::isfinite(f)) return "non-finite field";
  }
  if (box.dx <= 0.0 || box.dy <= 0.0 || box.dz <= 0.0) {
    return "non-positive extent";
  }
  if (box.yaw < -M_PI || box.yaw > M_PI) return "yaw outside [-pi, pi]";
  if (box.label < 0) return "negative label";
  if (box.score < 0.0 || box.score > 1.0) return "score outside [0, 1]";
  return std::nullopt;
}

const char* to_string(IouMode mode) {
  return mode == IouMode::kBev ? "bev" : "3d";
}

std::optional<IouMode> iou_mode_from_string(const std::string& name) {
  if (name == "bev") return IouMode::kBev;
  if (name == "3d") return IouMode::k3d;
  return std::nullopt;
}

}  // namespace fnms
