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

#include "tritter/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "tritter/error.hpp"
#include "tritter/kernels.hpp"

namespace tritter {

namespace {

using EigenCMatrix = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const EigenCMatrix> as_eigen(const CMatrix &m) {
    return {m.data().data(), static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols())};
}

void require_same_shape(const CMatrix &a, const CMatrix &b, const char *what) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw Error(ErrorCode::Shape, std::string(what) + ": dimension mismatch");
    }
}

void require_square(const CMatrix &a, const char *what) {
    if (!a.square()) {
        throw Error(ErrorCode::Shape, std::string(what) + ": matrix is not square");
    }
}

}  // namespace

CMatrix::CMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

CMatrix::CMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
    rows_ = rows.size();
    cols_ = rows_ == 0 ? 0 : rows.begin()->size();
    data_.reserve(rows_ * cols_);
    for (const auto &r : rows) {
        if (r.size() != cols_) {
            throw Error(ErrorCode::Shape, "ragged matrix literal");
        }
        data_.insert(data_.end(), r.begin(), r.end());
    }
}

CMatrix CMatrix::identity(std::size_t n) {
    CMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

CMatrix CMatrix::outer(std::span<const cplx> a, std::span<const cplx> b) {
    CMatrix m(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            m(i, j) = a[i] * std::conj(b[j]);
        }
    }
    return m;
}

CMatrix CMatrix::adjoint() const {
    CMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = std::conj((*this)(r, c));
        }
    }
    return out;
}

CMatrix CMatrix::transpose() const {
    CMatrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = (*this)(r, c);
        }
    }
    return out;
}

cplx CMatrix::trace() const {
    require_square(*this, "trace");
    cplx t = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
        t += (*this)(i, i);
    }
    return t;
}

CMatrix &CMatrix::operator+=(const CMatrix &other) {
    require_same_shape(*this, other, "operator+");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] += other.data_[i];
    }
    return *this;
}

CMatrix &CMatrix::operator-=(const CMatrix &other) {
    require_same_shape(*this, other, "operator-");
    for (std::size_t i = 0; i < data_.size(); ++i) {
        data_[i] -= other.data_[i];
    }
    return *this;
}

CMatrix &CMatrix::operator*=(cplx s) {
    for (auto &x : data_) {
        x *= s;
    }
    return *this;
}

CMatrix operator*(const CMatrix &a, const CMatrix &b) {
    if (a.cols() != b.rows()) {
        throw Error(ErrorCode::Shape, "matrix product: inner dimensions differ");
    }
    CMatrix c(a.rows(), b.cols());
    kernels::matmul(a.data().data(), b.data().data(), c.data().data(), a.rows(), a.cols(), b.cols());
    return c;
}

CVector operator*(const CMatrix &a, std::span<const cplx> v) {
    if (a.cols() != v.size()) {
        throw Error(ErrorCode::Shape, "matrix-vector product: dimension mismatch");
    }
    CVector out(a.rows());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        out[r] = kernels::dotu(a.row(r).data(), v.data(), v.size());
    }
    return out;
}

bool CMatrix::all_finite() const {
    return std::all_of(data_.begin(), data_.end(),
                       [](const cplx &z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double max_abs_diff(const CMatrix &a, const CMatrix &b) {
    require_same_shape(a, b, "max_abs_diff");
    double worst = 0.0;
    for (std::size_t i = 0; i < a.data().size(); ++i) {
        worst = std::max(worst, std::abs(a.data()[i] - b.data()[i]));
    }
    return worst;
}

CMatrix kron(const CMatrix &a, const CMatrix &b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            const cplx s = a(i, j);
            for (std::size_t k = 0; k < b.rows(); ++k) {
                for (std::size_t l = 0; l < b.cols(); ++l) {
                    out(i * b.rows() + k, j * b.cols() + l) = s * b(k, l);
                }
            }
        }
    }
    return out;
}

CMatrix hermitian_part(const CMatrix &a) {
    require_square(a, "hermitian_part");
    CMatrix out = a + a.adjoint();
    out *= 0.5;
    return out;
}

std::vector<double> hermitian_eigenvalues(const CMatrix &h) {
    require_square(h, "hermitian_eigenvalues");
    if (h.empty()) {
        return {};
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(as_eigen(h), Eigen::EigenvaluesOnly);
    const auto &ev = solver.eigenvalues();
    return {ev.data(), ev.data() + ev.size()};
}

HermitianEigensystem hermitian_eigensystem(const CMatrix &h) {
    require_square(h, "hermitian_eigensystem");
    HermitianEigensystem out;
    if (h.empty()) {
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(as_eigen(h));
    const auto &ev = solver.eigenvalues();
    out.values.assign(ev.data(), ev.data() + ev.size());
    const auto &vecs = solver.eigenvectors();
    out.vectors = CMatrix(h.rows(), h.cols());
    for (std::size_t r = 0; r < h.rows(); ++r) {
        for (std::size_t c = 0; c < h.cols(); ++c) {
            out.vectors(r, c) = vecs(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c));
        }
    }
    return out;
}

double trace_distance(const CMatrix &a, const CMatrix &b) {
    double total = 0.0;
    for (double ev : hermitian_eigenvalues(a - b)) {
        total += std::abs(ev);
    }
    return 0.5 * total;
}

double expectation(const CMatrix &m, std::span<const cplx> psi) {
    const CVector mpsi = m * psi;
    return kernels::dotc(psi.data(), mpsi.data(), psi.size()).real();
}

double norm(std::span<const cplx> v) { return std::sqrt(kernels::dotc(v.data(), v.data(), v.size()).real()); }

DensityCheck check_density(const CMatrix &rho) {
    require_square(rho, "check_density");
    DensityCheck check;
    check.hermiticity = max_abs_diff(rho, rho.adjoint());
    check.trace_error = std::abs(rho.trace() - 1.0);
    const auto ev = hermitian_eigenvalues(hermitian_part(rho));
    check.min_eigenvalue = ev.empty() ? 0.0 : ev.front();
    return check;
}

CMatrix maximally_mixed(std::size_t dim) {
    CMatrix m = CMatrix::identity(dim);
    m *= 1.0 / static_cast<double>(dim);
    return m;
}

nlohmann::ordered_json to_json(const CMatrix &m) {
    auto out = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < m.cols(); ++c) {
            row.push_back({m(r, c).real(), m(r, c).imag()});
        }
        out.push_back(std::move(row));
    }
    return out;
}

nlohmann::ordered_json to_json(std::span<const cplx> v) {
    auto out = nlohmann::ordered_json::array();
    for (const cplx &z : v) {
        out.push_back({z.real(), z.imag()});
    }
    return out;
}

CMatrix matrix_from_json(const nlohmann::ordered_json &j) {
    if (!j.is_array()) {
        throw Error(ErrorCode::Parse, "matrix must be an array of rows");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = rows == 0 ? 0 : j.at(0).size();
    CMatrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        const auto &row = j.at(r);
        if (!row.is_array() || row.size() != cols) {
            throw Error(ErrorCode::Parse, "matrix row " + std::to_string(r) + " has the wrong length");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const auto &entry = row.at(c);
            if (entry.is_number()) {
                m(r, c) = entry.get<double>();
            } else if (entry.is_array() && entry.size() == 2) {
                m(r, c) = {entry.at(0).get<double>(), entry.at(1).get<double>()};
            } else {
                throw Error(ErrorCode::Parse, "matrix entry must be a number or a [re, im] pair");
            }
        }
    }
    return m;
}

}  // namespace tritter
