// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

// Data-parallel inner loops shared by the fuzzy engine (defuzzification),
// DBSCAN (radius filtering) and the NMS variants (AABB prefilter).
//
// Every kernel has a scalar reference and an AVX2 variant selected at
// runtime. The two variants are bit-identical by construction: reductions
// accumulate in four interleaved lanes in the same order on both paths and
// the kernel translation units are built with fp-contract disabled.
// Set FUZZY_NMS_KERNEL=scalar|avx2 to override the dispatch.

namespace fnms::simd {

enum class Backend { kScalar, kAvx2 };

// Backend chosen at process start (env override, else CPU detection).
Backend active_backend();
const char* backend_name(Backend backend);
const char* active_backend_name();

// True when the AVX2 variants can run on this machine.
bool avx2_supported();

// Force a backend (tests only; not thread-safe against concurrent kernels).
void set_backend(Backend backend);

// acc[i] += min(h, curve[i]) for i < n.
void clip_accumulate(double* acc, const double* curve, double h,
                     std::size_t n);

// m0 = sum(acc[i]), m1 = sum(grid[i] * acc[i]), four-lane order.
void weighted_moments(const double* acc, const double* grid, std::size_t n,
                      double& m0, double& m1);

// mask[i] = (x[i]-qx)^2 + (y[i]-qy)^2 + (z[i]-qz)^2 <= r2 ? 1 : 0.
void radius_mask(const double* x, const double* y, const double* z,
                 std::size_t n, double qx, double qy, double qz, double r2,
                 std::uint8_t* mask);

// mask[i] = 1 when [min_x[i], max_x[i]] x [min_y[i], max_y[i]] overlaps
// the closed query rectangle.
void aabb_overlap_mask(const double* min_x, const double* max_x,
                       const double* min_y, const double* max_y,
                       std::size_t n, double q_min_x, double q_max_x,
                       double q_min_y, double q_max_y, std::uint8_t* mask);

}  // namespace fnms::simd
