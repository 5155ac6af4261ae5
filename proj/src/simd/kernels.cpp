// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#include "fnms/simd/kernels.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <cstring>

#include "kernels_detail.hpp"

namespace fnms::simd {
namespace detail {

void clip_accumulate_scalar(double* acc, const double* curve, double h,
                            std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    acc[i] += std::min(h, curve[i]);
  }
}

// Four interleaved partial sums; the AVX2 variant performs the identical
// sequence of additions lane by lane, so results match bit for bit.
void weighted_moments_scalar(const double* acc, const double* grid,
                             std::size_t n, double& m0, double& m1) {
  double s0[4] = {0.0, 0.0, 0.0, 0.0};
  double s1[4] = {0.0, 0.0, 0.0, 0.0};
  const std::size_t main = n & ~std::size_t{3};
  for (std::size_t i = 0; i < main; i += 4) {
    for (int j = 0; j < 4; ++j) {
      s0[j] += acc[i + j];
      s1[j] += grid[i + j] * acc[i + j];
    }
  }
  for (std::size_t i = main; i < n; ++i) {
    s0[i - main] += acc[i];
    s1[i - main] += grid[i] * acc[i];
  }
  m0 = (s0[0] + s0[1]) + (s0[2] + s0[3]);
  m1 = (s1[0] + s1[1]) + (s1[2] + s1[3]);
}

void radius_mask_scalar(const double* x, const double* y, const double* z,
                        std::size_t n, double qx, double qy, double qz,
                        double r2, std::uint8_t* mask) {
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = x[i] - qx;
    const double dy = y[i] - qy;
    const double dz = z[i] - qz;
    mask[i] = (dx * dx + dy * dy + dz * dz <= r2) ? 1 : 0;
  }
}

void aabb_overlap_mask_scalar(const double* min_x, const double* max_x,
                              const double* min_y, const double* max_y,
                              std::size_t n, double q_min_x, double q_max_x,
                              double q_min_y, double q_max_y,
                              std::uint8_t* mask) {
  for (std::size_t i = 0; i < n; ++i) {
    const bool hit = min_x[i] <= q_max_x && q_min_x <= max_x[i] &&
                     min_y[i] <= q_max_y && q_min_y <= max_y[i];
    mask[i] = hit ? 1 : 0;
  }
}

}  // namespace detail

namespace {

Backend detect_backend() {
  if (const char* env = std::getenv("FUZZY_NMS_KERNEL")) {
    if (std::strcmp(env, "scalar") == 0) return Backend::kScalar;
    if (std::strcmp(env, "avx2") == 0 && avx2_supported()) {
      return Backend::kAvx2;
    }
    return Backend::kScalar;
  }
  return avx2_supported() ? Backend::kAvx2 : Backend::kScalar;
}

std::atomic<Backend> g_backend{detect_backend()};

}  // namespace

bool avx2_supported() {
#if defined(FNMS_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") != 0;
#else
  return false;
#endif
}

Backend active_backend() { return g_backend.load(std::memory_order_relaxed); }

void set_backend(Backend backend) {
  if (backend == Backend::kAvx2 && !avx2_supported()) backend = Backend::kScalar;
  g_backend.store(backend, std::memory_order_relaxed);
}

const char* backend_name(Backend backend) {
  return backend == Backend::kAvx2 ? "avx2" : "scalar";
}

const char* active_backend_name() { return backend_name(active_backend()); }

void clip_accumulate(double* acc, const double* curve, double h,
                     std::size_t n) {
#if defined(FNMS_HAVE_AVX2)
  if (active_backend() == Backend::kAvx2) {
    detail::clip_accumulate_avx2(acc, curve, h, n);
    return;
  }
#endif
  detail::clip_accumulate_scalar(acc, curve, h, n);
}

void weighted_moments(const double* acc, const double* grid, std::size_t n,
                      double& m0, double& m1) {
#if defined(FNMS_HAVE_AVX2)
  if (active_backend() == Backend::kAvx2) {
    detail::weighted_moments_avx2(acc, grid, n, m0, m1);
    return;
  }
#endif
  detail::weighted_moments_scalar(acc, grid, n, m0, m1);
}

void radius_mask(const double* x, const double* y, const double* z,
                 std::size_t n, double qx, double qy, double qz, double r2,
                 std::uint8_t* mask) {
#if defined(FNMS_HAVE_AVX2)
  if (active_backend() == Backend::kAvx2) {
    detail::radius_mask_avx2(x, y, z, n, qx, qy, qz, r2, mask);
    return;
  }
#endif
  detail::radius_mask_scalar(x, y, z, n, qx, qy, qz, r2, mask);
}

void aabb_overlap_mask(const double* min_x, const double* max_x,
                       const double* min_y, const double* max_y,
                       std::size_t n, double q_min_x, double q_max_x,
                       double q_min_y, double q_max_y, std::uint8_t* mask) {
#if defined(FNMS_HAVE_AVX2)
  if (active_backend() == Backend::kAvx2) {
    detail::aabb_overlap_mask_avx2(min_x, max_x, min_y, max_y, n, q_min_x,
                                   q_max_x, q_min_y, q_max_y, mask);
    return;
  }
#endif
  detail::aabb_overlap_mask_scalar(min_x, max_x, min_y, max_y, n, q_min_x,
                                   q_max_x, q_min_y, q_max_y, mask);
}

}  // namespace fnms::simd
