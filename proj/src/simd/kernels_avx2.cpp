// Copyright (C) 2026 The fuzzy-nms authors
// SPDX-License-Identifier: Apache-2.0

// Built with -mavx2 and fp-contract off; explicit mul/add intrinsics only,
// so lane arithmetic matches the scalar reference bit for bit.

#include "kernels_detail.hpp"

#if defined(FNMS_HAVE_AVX2)

#include <immintrin.h>

namespace fnms::simd::detail {

void clip_accumulate_avx2(double* acc, const double* curve, double h,
                          std::size_t n) {
  const __m256d vh = _mm256_set1_pd(h);
  const std::size_t main = n & ~std::size_t{3};
  for (std::size_t i = 0; i < main; i += 4) {
    const __m256d c = _mm256_loadu_pd(curve + i);
    const __m256d a = _mm256_loadu_pd(acc + i);
    _mm256_storeu_pd(acc + i, _mm256_add_pd(a, _mm256_min_pd(vh, c)));
  }
  for (std::size_t i = main; i < n; ++i) {
    acc[i] += curve[i] < h ? curve[i] : h;
  }
}

void weighted_moments_avx2(const double* acc, const double* grid,
                           std::size_t n, double& m0, double& m1) {
  __m256d v0 = _mm256_setzero_pd();
  __m256d v1 = _mm256_setzero_pd();
  const std::size_t main = n & ~std::size_t{3};
  for (std::size_t i = 0; i < main; i += 4) {
    const __m256d a = _mm256_loadu_pd(acc + i);
    const __m256d g = _mm256_loadu_pd(grid + i);
    v0 = _mm256_add_pd(v0, a);
    v1 = _mm256_add_pd(v1, _mm256_mul_pd(g, a));
  }
  alignas(32) double s0[4];
  alignas(32) double s1[4];
  _mm256_store_pd(s0, v0);
  _mm256_store_pd(s1, v1);
  for (std::size_t i = main; i < n; ++i) {
    s0[i - main] += acc[i];
    s1[i - main] += grid[i] * acc[i];
  }
  m0 = (s0[0] + s0[1]) + (s0[2] + s0[3]);
  m1 = (s1[0] + s1[1]) + (s1[2] + s1[3]);
}

void radius_mask_avx2(const double* x, const double* y, const double* z,
                      std::size_t n, double qx, double qy, double qz,
                      double r2, std::uint8_t* mask) {
  const __m256d vqx = _mm256_set1_pd(qx);
  const __m256d vqy = _mm256_set1_pd(qy);
  const __m256d vqz = _mm256_set1_pd(qz);
  const __m256d vr2 = _mm256_set1_pd(r2);
  const std::size_t main = n & ~std::size_t{3};
  for (std::size_t i = 0; i < main; i += 4) {
    const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(x + i), vqx);
    const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(y + i), vqy);
    const __m256d dz = _mm256_sub_pd(_mm256_loadu_pd(z + i), vqz);
    const __m256d d2 = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
        _mm256_mul_pd(dz, dz));
    const int bits = _mm256_movemask_pd(_mm256_cmp_pd(d2, vr2, _CMP_LE_OQ));
    mask[i + 0] = (bits >> 0) & 1;
    mask[i + 1] = (bits >> 1) & 1;
    mask[i + 2] = (bits >> 2) & 1;
    mask[i + 3] = (bits >> 3) & 1;
  }
  for (std::size_t i = main; i < n; ++i) {
    const double dx = x[i] - qx;
    const double dy = y[i] - qy;
    const double dz = z[i] - qz;
    mask[i] = (dx * dx + dy * dy + dz * dz <= r2) ? 1 : 0;
  }
}

void aabb_overlap_mask_avx2(const double* min_x, const double* max_x,
                            const double* min_y, const double* max_y,
                            std::size_t n, double q_min_x, double q_max_x,
                            double q_min_y, double q_max_y,
                            std::uint8_t* mask) {
  const __m256d vq_min_x = _mm256_set1_pd(q_min_x);
  const __m256d vq_max_x = _mm256_set1_pd(q_max_x);
  const __m256d vq_min_y = _mm256_set1_pd(q_min_y);
  const __m256d vq_max_y = _mm256_set1_pd(q_max_y);
  const std::size_t main = n & ~std::size_t{3};
  for (std::size_t i = 0; i < main; i += 4) {
    const __m256d c0 =
        _mm256_cmp_pd(_mm256_loadu_pd(min_x + i), vq_max_x, _CMP_LE_OQ);
    const __m256d c1 =
        _mm256_cmp_pd(vq_min_x, _mm256_loadu_pd(max_x + i), _CMP_LE_OQ);
    const __m256d c2 =
        _mm256_cmp_pd(_mm256_loadu_pd(min_y + i), vq_max_y, _CMP_LE_OQ);
    const __m256d c3 =
        _mm256_cmp_pd(vq_min_y, _mm256_loadu_pd(max_y + i), _CMP_LE_OQ);
    const int bits = _mm256_movemask_pd(
        _mm256_and_pd(_mm256_and_pd(c0, c1), _mm256_and_pd(c2, c3)));
    mask[i + 0] = (bits >> 0) & 1;
    mask[i + 1] = (bits >> 1) & 1;
    mask[i + 2] = (bits >> 2) & 1;
    mask[i + 3] = (bits >> 3) & 1;
  }
  for (std::size_t i = main; i < n; ++i) {
    const bool hit = min_x[i] <= q_max_x && q_min_x <= max_x[i] &&
                     min_y[i] <= q_max_y && q_min_y <= max_y[i];
    mask[i] = hit ? 1 : 0;
  }
}

}  // namespace fnms::simd::detail

#endif  // FNMS_HAVE_AVX2
