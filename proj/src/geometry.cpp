// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#include "fnms/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace fnms::geom {
namespace {

constexpr double kAreaEps = 1e-12;     // intersections below this are zero
constexpr double kParallelEps = 1e-9;  // clipping predicate tolerance

inline double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
  return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

// Clipped polygons of two convex quads have at most 8 vertices.
struct Poly {
  Vec2 pts[16];
  int n = 0;
  void push(const Vec2& p) { pts[n++] = p; }
};

// Keeps the part of `in` on the left of the directed edge a->b.
void clip_edge(const Poly& in, const Vec2& a, const Vec2& b, Poly& out) {
  out.n = 0;
  for (int i = 0; i < in.n; ++i) {
    const Vec2& cur = in.pts[i];
    const Vec2& nxt = in.pts[(i + 1) % in.n];
    const double side_cur = cross(a, b, cur);
    const double side_nxt = cross(a, b, nxt);
    const bool in_cur = side_cur >= 0.0;
    const bool in_nxt = side_nxt >= 0.0;
    if (in_cur) out.push(cur);
    if (in_cur != in_nxt) {
      const double denom = side_cur - side_nxt;
      if (std::abs(denom) > kParallelEps * kParallelEps) {
        const double t = side_cur / denom;
        out.push({cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)});
      }
    }
  }
}

double shoelace_area(const Poly& poly) {
  if (poly.n < 3) return 0.0;
  double area = 0.0;
  for (int i = 1; i + 1 < poly.n; ++i) {
    area += cross(poly.pts[0], poly.pts[i], poly.pts[i + 1]);
  }
  return std::abs(area) * 0.5;
}

double footprint_intersection(const Box3D& a, const Box3D& b) {
  const auto ca = bev_corners(a);
  const auto cb = bev_corners(b);
  Poly subject;
  for (const auto& p : ca) subject.push(p);
  Poly scratch;
  Poly* cur = &subject;
  Poly* nxt = &scratch;
  for (int e = 0; e < 4; ++e) {
    clip_edge(*cur, cb[e], cb[(e + 1) % 4], *nxt);
    std::swap(cur, nxt);
    if (cur->n == 0) return 0.0;
  }
  const double area = shoelace_area(*cur);
  return area < kAreaEps ? 0.0 : area;
}

// Canonical operand order makes iou(a, b) == iou(b, a) exact.
bool box_less(const Box3D& a, const Box3D& b) {
  if (a.cx != b.cx) return a.cx < b.cx;
  if (a.cy != b.cy) return a.cy < b.cy;
  if (a.cz != b.cz) return a.cz < b.cz;
  if (a.dx != b.dx) return a.dx < b.dx;
  if (a.dy != b.dy) return a.dy < b.dy;
  if (a.dz != b.dz) return a.dz < b.dz;
  return a.yaw < b.yaw;
}

}  // namespace

double volume(const Box3D& box) { return box.dx * box.dy * box.dz; }

std::array<Vec2, 4> bev_corners(const Box3D& box) {
  const double c = std::cos(box.yaw);
  const double s = std::sin(box.yaw);
  const double hx = 0.5 * box.dx;
  const double hy = 0.5 * box.dy;
  const double lx[4] = {hx, -hx, -hx, hx};
  const double ly[4] = {hy, hy, -hy, -hy};
  std::array<Vec2, 4> out;
  for (int i = 0; i < 4; ++i) {
    out[i] = {box.cx + lx[i] * c - ly[i] * s, box.cy + lx[i] * s + ly[i] * c};
  }
  return out;
}

double convex_quad_intersection_area(const std::array<Vec2, 4>& subject,
                                     const std::array<Vec2, 4>& clip) {
  Poly poly;
  for (const auto& p : subject) poly.push(p);
  Poly scratch;
  Poly* cur = &poly;
  Poly* nxt = &scratch;
  for (int e = 0; e < 4; ++e) {
    clip_edge(*cur, clip[e], clip[(e + 1) % 4], *nxt);
    std::swap(cur, nxt);
    if (cur->n == 0) return 0.0;
  }
  const double area = shoelace_area(*cur);
  return area < kAreaEps ? 0.0 : area;
}

double iou_bev(const Box3D& a, const Box3D& b) {
  const Box3D& lo = box_less(a, b) ? a : b;
  const Box3D& hi = box_less(a, b) ? b : a;
  const double inter = footprint_intersection(lo, hi);
  if (inter <= 0.0) return 0.0;
  const double area_lo = lo.dx * lo.dy;
  const double area_hi = hi.dx * hi.dy;
  const double uni = area_lo + area_hi - inter;
  if (uni <= kAreaEps) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou_3d(const Box3D& a, const Box3D& b) {
  const Box3D& lo = box_less(a, b) ? a : b;
  const Box3D& hi = box_less(a, b) ? b : a;
  const double z_lo = std::max(lo.cz - 0.5 * lo.dz, hi.cz - 0.5 * hi.dz);
  const double z_hi = std::min(lo.cz + 0.5 * lo.dz, hi.cz + 0.5 * hi.dz);
  const double dz = z_hi - z_lo;
  if (dz <= 0.0) return 0.0;
  const double inter_area = footprint_intersection(lo, hi);
  if (inter_area <= 0.0) return 0.0;
  const double inter = inter_area * dz;
  const double uni = volume(lo) + volume(hi) - inter;
  if (uni <= kAreaEps) return 0.0;
  return std::clamp(inter / uni, 0.0, 1.0);
}

double iou(const Box3D& a, const Box3D& b, IouMode mode) {
  return mode == IouMode::kBev ? iou_bev(a, b) : iou_3d(a, b);
}

double diou(const Box3D& a, const Box3D& b, IouMode mode) {
  const double base = iou(a, b, mode);
  const auto ca = bev_corners(a);
  const auto cb = bev_corners(b);
  double min_x = ca[0].x, max_x = ca[0].x, min_y = ca[0].y, max_y = ca[0].y;
  for (int i = 0; i < 4; ++i) {
    min_x = std::min({min_x, ca[i].x, cb[i].x});
    max_x = std::max({max_x, ca[i].x, cb[i].x});
    min_y = std::min({min_y, ca[i].y, cb[i].y});
    max_y = std::max({max_y, ca[i].y, cb[i].y});
  }
  const double ex = max_x - min_x;
  const double ey = max_y - min_y;
  const double dx = a.cx - b.cx;
  const double dy = a.cy - b.cy;
  double diag2 = ex * ex + ey * ey;
  double dist2 = dx * dx + dy * dy;
  if (mode == IouMode::k3d) {
    const double z_min = std::min(a.cz - 0.5 * a.dz, b.cz - 0.5 * b.dz);
    const double z_max = std::max(a.cz + 0.5 * a.dz, b.cz + 0.5 * b.dz);
    const double ez = z_max - z_min;
    const double dzc = a.cz - b.cz;
    diag2 += ez * ez;
    dist2 += dzc * dzc;
  }
  if (diag2 <= kAreaEps) return base;
  return base - dist2 / diag2;
}

}  // namespace fnms::geom
