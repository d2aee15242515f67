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

#include <atomic>
#include <cstdlib>
#include <cstring>

namespace tritter::kernels {

namespace detail {
const KernelTable *avx2_table_if_supported();
}

namespace {

// Products are expanded by hand so the reference path does not go through
// the NaN-recovering libgcc complex multiply.
inline void mul_acc(double ar, double ai, double br, double bi, double &cr, double &ci) {
    cr += ar * br - ai * bi;
    ci += ar * bi + ai * br;
}

void matmul_scalar(const cplx *a, const cplx *b, cplx *c, std::size_t n, std::size_t k, std::size_t m) {
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            c[i * m + j] = 0.0;
        }
        for (std::size_t p = 0; p < k; ++p) {
            const double ar = a[i * k + p].real();
            const double ai = a[i * k + p].imag();
            for (std::size_t j = 0; j < m; ++j) {
                double cr = c[i * m + j].real();
                double ci = c[i * m + j].imag();
                mul_acc(ar, ai, b[p * m + j].real(), b[p * m + j].imag(), cr, ci);
                c[i * m + j] = {cr, ci};
            }
        }
    }
}

cplx dotc_scalar(const cplx *x, const cplx *y, std::size_t n) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mul_acc(x[i].real(), -x[i].imag(), y[i].real(), y[i].imag(), re, im);
    }
    return {re, im};
}

cplx dotu_scalar(const cplx *x, const cplx *y, std::size_t n) {
    double re = 0.0;
    double im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mul_acc(x[i].real(), x[i].imag(), y[i].real(), y[i].imag(), re, im);
    }
    return {re, im};
}

void axpy_scalar(cplx alpha, const cplx *x, cplx *y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        double re = y[i].real();
        double im = y[i].imag();
        mul_acc(alpha.real(), alpha.imag(), x[i].real(), x[i].imag(), re, im);
        y[i] = {re, im};
    }
}

const KernelTable kScalar{Isa::Scalar, matmul_scalar, dotc_scalar, dotu_scalar, axpy_scalar};

const KernelTable *initial_table() {
    const char *env = std::getenv("TRITTER_ISA");
    if (env != nullptr && std::strcmp(env, "scalar") == 0) {
        return &kScalar;
    }
    if (const KernelTable *avx2 = avx2_table()) {
        return avx2;
    }
    return &kScalar;
}

std::atomic<const KernelTable *> &active_slot() {
    static std::atomic<const KernelTable *> slot{initial_table()};
    return slot;
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar:
            return "scalar";
        case Isa::Avx2:
            return "avx2";
    }
    return "unknown";
}

const KernelTable &scalar_table() { return kScalar; }

const KernelTable *avx2_table() { return detail::avx2_table_if_supported(); }

const KernelTable &active_table() { return *active_slot().load(std::memory_order_acquire); }

Isa select_isa(Isa isa) {
    const KernelTable *table = &kScalar;
    if (isa == Isa::Avx2) {
        if (const KernelTable *avx2 = avx2_table()) {
            table = avx2;
        }
    }
    active_slot().store(table, std::memory_order_release);
    return table->isa;
}

}  // namespace tritter::kernels
