// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>

#include "fnms/box.hpp"

namespace fnms::geom {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

// dx * dy * dz.
double volume(const Box3D& box);

// Corners of the yaw-rotated footprint in the (cx, cy) plane,
// counter-clockwise, starting at the (+dx/2, +dy/2) local corner.
std::array<Vec2, 4> bev_corners(const Box3D& box);

// Intersection area of two convex quadrilaterals (Sutherland-Hodgman
// clipping + shoelace). Both quads must be counter-clockwise.
// Areas below 1e-12 m^2 count as zero, so shared-edge contact is 0.
double convex_quad_intersection_area(const std::array<Vec2, 4>& subject,
                                     const std::array<Vec2, 4>& clip);

// IoU of the yaw-rotated footprints. Symmetric (operands are evaluated in
// a canonical order), in [0, 1], exactly 1 for identical boxes and 0 for
// disjoint or edge-touching footprints.
double iou_bev(const Box3D& a, const Box3D& b);

// Footprint intersection times vertical overlap over the union volume.
double iou_3d(const Box3D& a, const Box3D& b);

double iou(const Box3D& a, const Box3D& b, IouMode mode);

// DIoU criterion: IoU minus squared center distance over the squared
// diagonal of the smallest axis-aligned region enclosing both boxes
// (footprints for BEV, full extents for 3D). Can be negative.
double diou(const Box3D& a, const Box3D& b, IouMode mode);

}  // namespace fnms::geom
