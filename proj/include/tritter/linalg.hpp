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
#include <initializer_list>
#include <span>
#include <vector>

#include "json.hpp"

namespace tritter {

using cplx = std::complex<double>;
using CVector = std::vector<cplx>;

/// Dense row-major complex matrix. Products go through the dispatched kernels.
class CMatrix {
   public:
    CMatrix() = default;
    CMatrix(std::size_t rows, std::size_t cols);
    CMatrix(std::initializer_list<std::initializer_list<cplx>> rows);

    static CMatrix identity(std::size_t n);
    static CMatrix zeros(std::size_t rows, std::size_t cols) { return CMatrix(rows, cols); }
    /// |a><b|
    static CMatrix outer(std::span<const cplx> a, std::span<const cplx> b);
    static CMatrix projector(std::span<const cplx> psi) { return outer(psi, psi); }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }
    bool empty() const noexcept { return data_.empty(); }

    cplx &operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const cplx &operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    std::span<cplx> data() noexcept { return data_; }
    std::span<const cplx> data() const noexcept { return data_; }
    std::span<const cplx> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    CMatrix adjoint() const;
    CMatrix transpose() const;
    cplx trace() const;

    CMatrix &operator+=(const CMatrix &other);
    CMatrix &operator-=(const CMatrix &other);
    CMatrix &operator*=(cplx s);

    friend CMatrix operator+(CMatrix a, const CMatrix &b) { return a += b; }
    friend CMatrix operator-(CMatrix a, const CMatrix &b) { return a -= b; }
    friend CMatrix operator*(CMatrix a, cplx s) { return a *= s; }
    friend CMatrix operator*(cplx s, CMatrix a) { return a *= s; }
    friend CMatrix operator*(const CMatrix &a, const CMatrix &b);
    friend CVector operator*(const CMatrix &a, std::span<const cplx> v);

    bool all_finite() const;

   private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<cplx> data_;
};

/// Largest element-wise |a - b|; dimensions must match.
double max_abs_diff(const CMatrix &a, const CMatrix &b);

CMatrix kron(const CMatrix &a, const CMatrix &b);

/// Hermitian part (A + A^dagger) / 2.
CMatrix hermitian_part(const CMatrix &a);

/// Ascending eigenvalues of a Hermitian matrix (only the lower triangle is read).
std::vector<double> hermitian_eigenvalues(const CMatrix &h);

struct HermitianEigensystem {
    std::vector<double> values;  // ascending
    CMatrix vectors;             // column i is the eigenvector of values[i]
};
HermitianEigensystem hermitian_eigensystem(const CMatrix &h);

/// (1/2) * sum |eigenvalues(a - b)| for Hermitian a, b.
double trace_distance(const CMatrix &a, const CMatrix &b);

/// Real part of <psi| m |psi>.
double expectation(const CMatrix &m, std::span<const cplx> psi);

double norm(std::span<const cplx> v);

/// Density-matrix checks used across modules.
struct DensityCheck {
    double hermiticity = 0.0;     // max |rho - rho^dagger|
    double trace_error = 0.0;     // |tr rho - 1|
    double min_eigenvalue = 0.0;
    bool ok(double tol) const { return hermiticity < tol && trace_error < tol && min_eigenvalue > -tol; }
};
DensityCheck check_density(const CMatrix &rho);

/// Maximally mixed state on `dim` levels.
CMatrix maximally_mixed(std::size_t dim);

/// Matrices serialise as nested arrays of [re, im] pairs.
nlohmann::ordered_json to_json(const CMatrix &m);
CMatrix matrix_from_json(const nlohmann::ordered_json &j);
nlohmann::ordered_json to_json(std::span<const cplx> v);

}  // namespace tritter
