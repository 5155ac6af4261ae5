// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>

namespace fnms::simd::detail {

void clip_accumulate_scalar(double* acc, const double* curve, double h,
                            std::size_t n);
void weighted_moments_scalar(const double* acc, const double* grid,
                             std::size_t n, double& m0, double& m1);
void radius_mask_scalar(const double* x, const double* y, const double* z,
                        std::size_t n, double qx, double qy, double qz,
                        double r2, std::uint8_t* mask);
void aabb_overlap_mask_scalar(const double* min_x, const double* max_x,
                              const double* min_y, const double* max_y,
                              std::size_t n, double q_min_x, double q_max_x,
                              double q_min_y, double q_max_y,
                              std::uint8_t* mask);

#if defined(FNMS_HAVE_AVX2)
void clip_accumulate_avx2(double* acc, const double* curve, double h,
                          std::size_t n);
void weighted_moments_avx2(const double* acc, const double* grid,
                           std::size_t n, double& m0, double& m1);
void radius_mask_avx2(const double* x, const double* y, const double* z,
                      std::size_t n, double qx, double qy, double qz,
                      double r2, std::uint8_t* mask);
void aabb_overlap_mask_avx2(const double* min_x, const double* max_x,
                            const double* min_y, const double* max_y,
                            std::size_t n, double q_min_x, double q_max_x,
                            double q_min_y, double q_max_y,
                            std::uint8_t* mask);
#endif

}  // namespace fnms::simd::detail
