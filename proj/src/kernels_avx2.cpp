// Copyright 2026 The Tritter Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "tritter/kernels.hpp"

#if defined(__x86_64__) || defined(_M_X64)
#define TRITTER_HAVE_AVX2_VARIANT 1
#include <immintrin.h>
#else
#define TRITTER_HAVE_AVX2_VARIANT 0
#endif

namespace tritter::kernels::detail {

#if TRITTER_HAVE_AVX2_VARIANT

#define TRITTER_AVX2 __attribute__((target("avx2,fma")))

namespace {

// One __m256d holds two interleaved complex numbers: [r0 i0 r1 i1].

// (ar + i ai) * [b0 b1] with the scalar broadcast as separate re/im lanes.
TRITTER_AVX2 inline __m256d cmul_broadcast(__m256d a_re, __m256d a_im, __m256d b) {
    const __m256d b_swap = _mm256_permute_pd(b, 0x5);
    return _mm256_fmaddsub_pd(a_re, b, _mm256_mul_pd(a_im, b_swap));
}

TRITTER_AVX2 inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

// Returns (lane0 - lane1 + lane2 - lane3).
TRITTER_AVX2 inline double alt_sum(__m256d v) {
    const __m256d sign = _mm256_set_pd(-1.0, 1.0, -1.0, 1.0);
    return hsum(_mm256_mul_pd(v, sign));
}

TRITTER_AVX2 void matmul_avx2(const cplx *a, const cplx *b, cplx *c, std::size_t n, std::size_t k, std::size_t m) {
    const std::size_t pairs = m / 2;
    for (std::size_t i = 0; i < n; ++i) {
        double *crow = reinterpret_cast<double *>(c + i * m);
        for (std::size_t j = 0; j < 2 * m; ++j) {
            crow[j] = 0.0;
        }
        for (std::size_t p = 0; p < k; ++p) {
            const cplx av = a[i * k + p];
            const __m256d a_re = _mm256_set1_pd(av.real());
            const __m256d a_im = _mm256_set1_pd(av.imag());
            const double *brow = reinterpret_cast<const double *>(b + p * m);
            for (std::size_t q = 0; q < pairs; ++q) {
                const __m256d bv = _mm256_loadu_pd(brow + 4 * q);
                const __m256d cv = _mm256_loadu_pd(crow + 4 * q);
                _mm256_storeu_pd(crow + 4 * q, _mm256_add_pd(cv, cmul_broadcast(a_re, a_im, bv)));
            }
            if (m % 2 != 0) {
                const std::size_t j = m - 1;
                const double br = brow[2 * j];
                const double bi = brow[2 * j + 1];
                crow[2 * j] += av.real() * br - av.imag() * bi;
                crow[2 * j + 1] += av.real() * bi + av.imag() * br;
            }
        }
    }
}

// Accumulates x*y lane-wise (re parts) and x*swap(y) (cross terms).
TRITTER_AVX2 void dot_accumulate(const cplx *x, const cplx *y, std::size_t n, __m256d &direct, __m256d &cross,
                                 double tail[4]) {
    const double *xd = reinterpret_cast<const double *>(x);
    const double *yd = reinterpret_cast<const double *>(y);
    direct = _mm256_setzero_pd();
    cross = _mm256_setzero_pd();
    const std::size_t pairs = n / 2;
    for (std::size_t q = 0; q < pairs; ++q) {
        const __m256d xv = _mm256_loadu_pd(xd + 4 * q);
        const __m256d yv = _mm256_loadu_pd(yd + 4 * q);
        direct = _mm256_fmadd_pd(xv, yv, direct);
        cross = _mm256_fmadd_pd(xv, _mm256_permute_pd(yv, 0x5), cross);
    }
    tail[0] = tail[1] = tail[2] = tail[3] = 0.0;
    if (n % 2 != 0) {
        const std::size_t j = n - 1;
        tail[0] = x[j].real() * y[j].real();
        tail[1] = x[j].imag() * y[j].imag();
        tail[2] = x[j].real() * y[j].imag();
        tail[3] = x[j].imag() * y[j].real();
    }
}

TRITTER_AVX2 cplx dotc_avx2(const cplx *x, const cplx *y, std::size_t n) {
    __m256d direct;
    __m256d cross;
    double tail[4];
    dot_accumulate(x, y, n, direct, cross, tail);
    // conj(x) y = (xr yr + xi yi) + i (xr yi - xi yr)
    const double re = hsum(direct) + tail[0] + tail[1];
    const double im = alt_sum(cross) + tail[2] - tail[3];
    return {re, im};
}

TRITTER_AVX2 cplx dotu_avx2(const cplx *x, const cplx *y, std::size_t n) {
    __m256d direct;
    __m256d cross;
    double tail[4];
    dot_accumulate(x, y, n, direct, cross, tail);
    // x y = (xr yr - xi yi) + i (xr yi + xi yr)
    const double re = alt_sum(direct) + tail[0] - tail[1];
    const double im = hsum(cross) + tail[2] + tail[3];
    return {re, im};
}

TRITTER_AVX2 void axpy_avx2(cplx alpha, const cplx *x, cplx *y, std::size_t n) {
    const __m256d a_re = _mm256_set1_pd(alpha.real());
    const __m256d a_im = _mm256_set1_pd(alpha.imag());
    const double *xd = reinterpret_cast<const double *>(x);
    double *yd = reinterpret_cast<double *>(y);
    const std::size_t pairs = n / 2;
    for (std::size_t q = 0; q < pairs; ++q) {
        const __m256d xv = _mm256_loadu_pd(xd + 4 * q);
        const __m256d yv = _mm256_loadu_pd(yd + 4 * q);
        _mm256_storeu_pd(yd + 4 * q, _mm256_add_pd(yv, cmul_broadcast(a_re, a_im, xv)));
    }
    if (n % 2 != 0) {
        const std::size_t j = n - 1;
        yd[2 * j] += alpha.real() * x[j].real() - alpha.imag() * x[j].imag();
        yd[2 * j + 1] += alpha.real() * x[j].imag() + alpha.imag() * x[j].real();
    }
}

const KernelTable kAvx2{Isa::Avx2, matmul_avx2, dotc_avx2, dotu_avx2, axpy_avx2};

}  // namespace

const KernelTable *avx2_table_if_supported() {
    static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    return supported ? &kAvx2 : nullptr;
}

#else

const KernelTable *avx2_table_if_supported() { return nullptr; }

#endif

}  // namespace tritter::kernels::detail
