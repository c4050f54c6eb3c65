// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0
//
// AVX2/FMA variants. This translation unit is compiled with -mavx2 -mfma and
// must only be entered after a runtime CPU check.

#include <immintrin.h>

#include "autohls/simd/kernels.hpp"

namespace autohls::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

inline float hsum(__m256 v) {
  __m128 s = _mm_add_ps(_mm256_castps256_ps128(v), _mm256_extractf128_ps(v, 1));
  s = _mm_add_ps(s, _mm_movehl_ps(s, s));
  s = _mm_add_ss(s, _mm_shuffle_ps(s, s, 0x55));
  return _mm_cvtss_f32(s);
}

inline std::int64_t hsum(__m256i v) {
  alignas(32) std::int64_t lanes[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(lanes), v);
  return lanes[0] + lanes[1] + lanes[2] + lanes[3];
}

double dot_f64(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

float dot_f32(const float* a, const float* b, std::size_t n) {
  __m256 acc = _mm256_setzero_ps();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc = _mm256_fmadd_ps(_mm256_loadu_ps(a + i), _mm256_loadu_ps(b + i), acc);
  }
  float s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    // Sign-extend four 32-bit lanes to 64 bits; _mm256_mul_epi32 uses the low halves.
    const __m256i va = _mm256_cvtepi32_epi64(_mm_loadu_si128(reinterpret_cast<const __m128i*>(a + i)));
    const __m256i vb = _mm256_cvtepi32_epi64(_mm_loadu_si128(reinterpret_cast<const __m128i*>(b + i)));
    acc = _mm256_add_epi64(acc, _mm256_mul_epi32(va, vb));
  }
  std::int64_t s = hsum(acc);
  for (; i < n; ++i) s += static_cast<std::int64_t>(a[i]) * static_cast<std::int64_t>(b[i]);
  return s;
}

std::int64_t shift_accumulate(const std::int64_t* x, const std::int8_t* sign,
                              const std::uint8_t* shift, std::size_t n) {
  __m256i acc = _mm256_setzero_si256();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    std::int32_t s4;
    std::int32_t h4;
    __builtin_memcpy(&s4, sign + i, 4);
    __builtin_memcpy(&h4, shift + i, 4);
    const __m256i vs = _mm256_cvtepi8_epi64(_mm_cvtsi32_si128(s4));
    const __m256i vh = _mm256_cvtepu8_epi64(_mm_cvtsi32_si128(h4));
    const __m256i vx = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(x + i));
    __m256i v = _mm256_sllv_epi64(vx, vh);
    // neg = all ones where sign < 0; (v ^ neg) - neg negates those lanes.
    const __m256i neg = _mm256_cmpgt_epi64(_mm256_setzero_si256(), vs);
    v = _mm256_sub_epi64(_mm256_xor_si256(v, neg), neg);
    const __m256i zero = _mm256_cmpeq_epi64(vs, _mm256_setzero_si256());
    v = _mm256_andnot_si256(zero, v);
    acc = _mm256_add_epi64(acc, v);
  }
  std::int64_t s = hsum(acc);
  for (; i < n; ++i) {
    if (sign[i] == 0) continue;
    const auto shifted =
        static_cast<std::int64_t>(static_cast<std::uint64_t>(x[i]) << shift[i]);
    s = sign[i] > 0 ? s + shifted : s - shifted;
  }
  return s;
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::Avx2, dot_f64, dot_f32, axpy_f64, dot_i32,
                                 shift_accumulate};
  return table;
}

}  // namespace autohls::simd::detail
