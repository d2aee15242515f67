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

#pragma once

#include <complex>
#include <cstddef>
#include <string_view>

/// Dense complex arithmetic kernels used by the permanent, density-matrix and
/// tomography code. Every kernel has a scalar reference implementation; an
/// AVX2+FMA variant is selected at runtime when the CPU supports it.
///
/// All pointers refer to interleaved (re, im) std::complex<double> storage,
/// matrices are row-major and dense.
namespace tritter::kernels {

using cplx = std::complex<double>;

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

struct KernelTable {
    Isa isa;
    /// c[n x m] = a[n x k] * b[k x m]
    void (*matmul)(const cplx *a, const cplx *b, cplx *c, std::size_t n, std::size_t k, std::size_t m);
    /// sum_i conj(x_i) * y_i
    cplx (*dotc)(const cplx *x, const cplx *y, std::size_t n);
    /// sum_i x_i * y_i
    cplx (*dotu)(const cplx *x, const cplx *y, std::size_t n);
    /// y += alpha * x
    void (*axpy)(cplx alpha, const cplx *x, cplx *y, std::size_t n);
};

const KernelTable &scalar_table();

/// Returns nullptr when the variant was not compiled in or the CPU lacks it.
const KernelTable *avx2_table();

/// The table used by the free functions below. Chosen once on first use:
/// the best supported ISA, unless TRITTER_ISA=scalar is set in the environment.
const KernelTable &active_table();

/// Overrides the active table (tests and benchmarks). Falls back to scalar
/// when the requested ISA is unavailable; returns the ISA actually selected.
Isa select_isa(Isa isa);

inline void matmul(const cplx *a, const cplx *b, cplx *c, std::size_t n, std::size_t k, std::size_t m) {
    active_table().matmul(a, b, c, n, k, m);
}
inline cplx dotc(const cplx *x, const cplx *y, std::size_t n) { return active_table().dotc(x, y, n); }
inline cplx dotu(const cplx *x, const cplx *y, std::size_t n) { return active_table().dotu(x, y, n); }
inline void axpy(cplx alpha, const cplx *x, cplx *y, std::size_t n) { active_table().axpy(alpha, x, y, n); }

}  // namespace tritter::kernels
