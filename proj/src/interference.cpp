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

#include "tritter/interference.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "tritter/error.hpp"
#include "tritter/kernels.hpp"

namespace tritter {

namespace {

// Hard caps on enumeration work so a bad input fails fast instead of hanging.
constexpr double kMaxMultisets = 5e6;
constexpr double kMaxPostselectTerms = 4e6;
constexpr double kZeroProbability = 1e-14;

double binomial(double n, double k) {
    double r = 1.0;
    for (double i = 1.0; i <= k; i += 1.0) {
        r *= (n - k + i) / i;
    }
    return r;
}

double factorial(unsigned n) {
    double f = 1.0;
    for (unsigned i = 2; i <= n; ++i) {
        f *= i;
    }
    return f;
}

void check_permanent_shape(const CMatrix &m) {
    if (!m.square()) {
        throw Error(ErrorCode::Shape, "permanent of a " + std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                                          " matrix");
    }
    if (m.rows() > kMaxPermanentDim) {
        throw Error(ErrorCode::Size, "permanent dimension " + std::to_string(m.rows()) + " exceeds " +
                                         std::to_string(kMaxPermanentDim));
    }
}

}  // namespace

double unitarity_error(const CMatrix &u) {
    if (!u.square()) {
        throw Error(ErrorCode::Shape, "unitarity check on a non-square matrix");
    }
    return max_abs_diff(u * u.adjoint(), CMatrix::identity(u.rows()));
}

Interferometer Interferometer::from_matrix(CMatrix u, double tol) {
    if (!u.square() || u.empty()) {
        throw Error(ErrorCode::Shape, "interferometer matrix must be square and non-empty");
    }
    if (!u.all_finite()) {
        throw Error(ErrorCode::Validation, "interferometer matrix has non-finite entries");
    }
    const double err = unitarity_error(u);
    if (!(err <= tol)) {
        throw Error(ErrorCode::Validation, "interferometer matrix is not unitary (max deviation " +
                                               std::to_string(err) + ")");
    }
    return Interferometer(std::move(u));
}

Interferometer Interferometer::nearest_unitary(const CMatrix &m) {
    if (!m.square() || m.empty()) {
        throw Error(ErrorCode::Shape, "interferometer matrix must be square and non-empty");
    }
    const auto n = static_cast<Eigen::Index>(m.rows());
    Eigen::MatrixXcd a(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            a(r, c) = m(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::MatrixXcd polar = svd.matrixU() * svd.matrixV().adjoint();
    CMatrix u(m.rows(), m.cols());
    for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < n; ++c) {
            u(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) = polar(r, c);
        }
    }
    return from_matrix(std::move(u));
}

Interferometer fourier_unitary(std::size_t n) {
    if (n == 0) {
        throw Error(ErrorCode::InvalidDimension, "Fourier interferometer needs at least one port");
    }
    CMatrix u(n, n);
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            // Reduce the exponent mod n first so large n keeps full phase accuracy.
            const double phase = 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
            u(k, j) = std::polar(scale, phase);
        }
    }
    return Interferometer::from_matrix(std::move(u));
}

InternalState InternalState::polarized(cplx h, cplx v, CVector spectral) {
    InternalState s;
    s.pol = {h, v};
    s.spectral = std::move(spectral);
    return s;
}

void InternalState::validate() const {
    const double pol_norm = std::norm(pol[0]) + std::norm(pol[1]);
    if (!(std::abs(pol_norm - 1.0) <= kStateNormTol)) {
        throw Error(ErrorCode::Validation, "polarisation amplitudes are not normalised (|a|^2 = " +
                                               std::to_string(pol_norm) + ")");
    }
    if (spectral.empty()) {
        throw Error(ErrorCode::Validation, "spectral vector is empty");
    }
    double spec_norm = 0.0;
    for (const cplx &z : spectral) {
        spec_norm += std::norm(z);
    }
    if (!(std::abs(spec_norm - 1.0) <= kStateNormTol)) {
        throw Error(ErrorCode::Validation, "spectral vector is not normalised (|s|^2 = " +
                                               std::to_string(spec_norm) + ")");
    }
}

std::size_t InputConfiguration::spectral_dim() const {
    return photons.empty() ? 0 : photons.front().state.spectral_dim();
}

void InputConfiguration::validate(std::size_t ports) const {
    if (photons.empty()) {
        throw Error(ErrorCode::Validation, "input configuration has no photons");
    }
    std::vector<bool> used(ports, false);
    const std::size_t dim = spectral_dim();
    for (std::size_t i = 0; i < photons.size(); ++i) {
        const Photon &p = photons[i];
        if (p.port >= ports) {
            throw Error(ErrorCode::Validation, "photon " + std::to_string(i) + " enters port " +
                                                   std::to_string(p.port) + " of a " + std::to_string(ports) +
                                                   "-port device");
        }
        if (used[p.port]) {
            throw Error(ErrorCode::Validation, "two photons share input port " + std::to_string(p.port));
        }
        used[p.port] = true;
        p.state.validate();
        if (p.state.spectral_dim() != dim) {
            throw Error(ErrorCode::Validation, "photons have different spectral dimensions");
        }
    }
}

unsigned OccupationPattern::total() const { return std::accumulate(counts.begin(), counts.end(), 0u); }

bool OccupationPattern::collision_free() const {
    return std::all_of(counts.begin(), counts.end(), [](unsigned c) { return c <= 1; });
}

std::size_t PostSelectionResult::qubits() const {
    return rho.rows() == 0 ? 0 : static_cast<std::size_t>(std::countr_zero(rho.rows()));
}

cplx permanent_enumerate(const CMatrix &m) {
    check_permanent_shape(m);
    const std::size_t n = m.rows();
    if (n == 0) {
        return 1.0;
    }
    std::vector<std::size_t> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    cplx total = 0.0;
    do {
        cplx term = 1.0;
        for (std::size_t k = 0; k < n; ++k) {
            term *= m(k, sigma[k]);
        }
        total += term;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    return total;
}

cplx permanent_ryser(const CMatrix &m) {
    check_permanent_shape(m);
    const std::size_t n = m.rows();
    if (n == 0) {
        return 1.0;
    }
    // Columns stored contiguously so each Gray-code step is one axpy.
    const CMatrix cols = m.transpose();
    CVector row_sums(n, 0.0);
    cplx total = 0.0;
    const std::uint64_t subsets = std::uint64_t{1} << n;
    std::uint64_t gray = 0;
    for (std::uint64_t step = 1; step < subsets; ++step) {
        const int flip = std::countr_zero(step);
        const std::uint64_t bit = std::uint64_t{1} << flip;
        gray ^= bit;
        const double sign = (gray & bit) != 0 ? 1.0 : -1.0;
        kernels::axpy(sign, cols.row(static_cast<std::size_t>(flip)).data(), row_sums.data(), n);
        cplx prod = 1.0;
        for (const cplx &s : row_sums) {
            prod *= s;
        }
        total += (std::popcount(gray) % 2 == 0) ? prod : -prod;
    }
    return (n % 2 == 0) ? total : -total;
}

cplx permanent(const CMatrix &m) {
    check_permanent_shape(m);
    return m.rows() <= kMaxEnumerationDim ? permanent_enumerate(m) : permanent_ryser(m);
}

namespace {

// Amplitudes of each photon over combined modes (out port, polarisation, spectral),
// index = (out * 2 + pol) * D + s.
std::vector<CVector> combined_amplitudes(const Interferometer &u, const InputConfiguration &in) {
    const std::size_t n_ports = u.dim();
    const std::size_t d = in.spectral_dim();
    const std::size_t internal = 2 * d;
    std::vector<CVector> amps;
    amps.reserve(in.size());
    for (const Photon &p : in.photons) {
        CVector a(n_ports * internal);
        for (std::size_t out = 0; out < n_ports; ++out) {
            const cplx t = u(p.port, out);
            for (std::size_t pol = 0; pol < 2; ++pol) {
                for (std::size_t s = 0; s < d; ++s) {
                    a[out * internal + pol * d + s] = t * p.state.amplitude(pol, s);
                }
            }
        }
        amps.push_back(std::move(a));
    }
    return amps;
}

}  // namespace

OutputDistribution output_distribution(const Interferometer &u, const InputConfiguration &in) {
    in.validate(u.dim());
    const std::size_t n = in.size();
    if (n > kMaxPermanentDim) {
        throw Error(ErrorCode::Size, "too many photons for exact evaluation");
    }
    const std::size_t internal = 2 * in.spectral_dim();
    const auto amps = combined_amplitudes(u, in);

    // Modes no photon can reach contribute nothing; drop them up front.
    std::vector<std::size_t> active;
    for (std::size_t mode = 0; mode < amps.front().size(); ++mode) {
        const bool reachable =
            std::any_of(amps.begin(), amps.end(), [mode](const CVector &a) { return std::abs(a[mode]) > 0.0; });
        if (reachable) {
            active.push_back(mode);
        }
    }
    const double work = binomial(static_cast<double>(active.size() + n - 1), static_cast<double>(n));
    if (work > kMaxMultisets) {
        throw Error(ErrorCode::Size, "output enumeration over " + std::to_string(active.size()) +
                                         " modes is too large");
    }

    OutputDistribution dist;
    {
        // Every port pattern appears in the result, even with probability zero.
        OccupationPattern pat{std::vector<unsigned>(u.dim(), 0)};
        std::vector<std::size_t> idx(n, 0);
        while (true) {
            std::fill(pat.counts.begin(), pat.counts.end(), 0u);
            for (std::size_t k : idx) {
                ++pat.counts[k];
            }
            dist.emplace(pat, 0.0);
            std::size_t pos = n;
            while (pos > 0 && idx[pos - 1] == u.dim() - 1) {
                --pos;
            }
            if (pos == 0) {
                break;
            }
            const std::size_t next = idx[pos - 1] + 1;
            for (std::size_t k = pos - 1; k < n; ++k) {
                idx[k] = next;
            }
        }
    }

    if (active.empty()) {
        return dist;
    }

    // Non-decreasing sequences over active modes enumerate each multiset once.
    std::vector<std::size_t> sel(n, 0);
    CMatrix mat(n, n);
    OccupationPattern pat{std::vector<unsigned>(u.dim(), 0)};
    while (true) {
        double norm_factor = 1.0;
        unsigned run = 1;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t mode = active[sel[k]];
            for (std::size_t i = 0; i < n; ++i) {
                mat(i, k) = amps[i][mode];
            }
            if (k > 0 && sel[k] == sel[k - 1]) {
                ++run;
            } else {
                norm_factor *= factorial(run);
                run = 1;
            }
        }
        norm_factor *= factorial(run);
        const double prob = std::norm(permanent(mat)) / norm_factor;
        if (prob > 0.0) {
            std::fill(pat.counts.begin(), pat.counts.end(), 0u);
            for (std::size_t k = 0; k < n; ++k) {
                ++pat.counts[active[sel[k]] / internal];
            }
            dist[pat] += prob;
        }

        std::size_t pos = n;
        while (pos > 0 && sel[pos - 1] == active.size() - 1) {
            --pos;
        }
        if (pos == 0) {
            break;
        }
        const std::size_t next = sel[pos - 1] + 1;
        for (std::size_t k = pos - 1; k < n; ++k) {
            sel[k] = next;
        }
    }
    return dist;
}

PostSelectionResult postselect_coincidence(const Interferometer &u, const InputConfiguration &in,
                                           const OccupationPattern &pattern) {
    in.validate(u.dim());
    if (pattern.counts.size() != u.dim()) {
        throw Error(ErrorCode::Validation, "pattern has " + std::to_string(pattern.counts.size()) +
                                               " ports, interferometer has " + std::to_string(u.dim()));
    }
    if (!pattern.collision_free()) {
        throw Error(ErrorCode::UnsupportedPattern, "post-selection requires at most one photon per output");
    }
    const std::size_t n = in.size();
    if (pattern.total() != n) {
        throw Error(ErrorCode::Validation, "pattern marks " + std::to_string(pattern.total()) + " ports for " +
                                               std::to_string(n) + " photons");
    }
    if (n > kMaxPermanentDim) {
        throw Error(ErrorCode::Size, "too many photons for exact evaluation");
    }
    const std::size_t d = in.spectral_dim();
    const double terms = std::pow(2.0 * static_cast<double>(d), static_cast<double>(n));
    if (terms > kMaxPostselectTerms) {
        throw Error(ErrorCode::Size, "post-selection sum over internal patterns is too large");
    }

    std::vector<std::size_t> outs;
    for (std::size_t j = 0; j < pattern.counts.size(); ++j) {
        if (pattern.counts[j] == 1) {
            outs.push_back(j);
        }
    }

    const std::size_t dim = std::size_t{1} << n;
    std::size_t spectral_patterns = 1;
    for (std::size_t k = 0; k < n; ++k) {
        spectral_patterns *= d;
    }

    CMatrix rho(dim, dim);
    CVector column(dim);
    CMatrix mat(n, n);
    std::vector<std::size_t> spec(n, 0);
    for (std::size_t s_index = 0; s_index < spectral_patterns; ++s_index) {
        std::size_t rem = s_index;
        for (std::size_t k = n; k-- > 0;) {
            spec[k] = rem % d;
            rem /= d;
        }
        for (std::size_t p_index = 0; p_index < dim; ++p_index) {
            for (std::size_t k = 0; k < n; ++k) {
                // Qubit k (output outs[k]) is bit n-1-k: first output is leftmost.
                const std::size_t pol = (p_index >> (n - 1 - k)) & 1u;
                for (std::size_t j = 0; j < n; ++j) {
                    const Photon &ph = in.photons[j];
                    mat(j, k) = u(ph.port, outs[k]) * ph.state.amplitude(pol, spec[k]);
                }
            }
            column[p_index] = permanent(mat);
        }
        for (std::size_t r = 0; r < dim; ++r) {
            if (column[r] == 0.0) {
                continue;
            }
            for (std::size_t c = 0; c < dim; ++c) {
                rho(r, c) += column[r] * std::conj(column[c]);
            }
        }
    }

    PostSelectionResult result;
    result.probability = rho.trace().real();
    if (!(result.probability > kZeroProbability)) {
        result.probability = std::max(result.probability, 0.0);
        result.rho = CMatrix(dim, dim);
        result.defined = false;
        return result;
    }
    rho *= 1.0 / result.probability;
    result.rho = std::move(rho);
    result.defined = true;
    return result;
}

double pair_coincidence_probability(const Interferometer &u, std::pair<std::size_t, std::size_t> ports,
                                    std::pair<std::size_t, std::size_t> outs, cplx overlap) {
    const double mag2 = std::norm(overlap);
    if (!(mag2 <= 1.0 + kStateNormTol)) {
        throw Error(ErrorCode::InvalidOverlap, "|overlap| = " + std::to_string(std::sqrt(mag2)) + " exceeds 1");
    }
    if (ports.first == ports.second || outs.first == outs.second) {
        throw Error(ErrorCode::Validation, "pair coincidence needs distinct ports and distinct outputs");
    }
    if (outs.first >= u.dim() || outs.second >= u.dim()) {
        throw Error(ErrorCode::Validation, "output index out of range");
    }
    InputConfiguration in;
    in.photons.push_back({ports.first, InternalState::polarized(1.0, 0.0, {1.0, 0.0})});
    in.photons.push_back(
        {ports.second, InternalState::polarized(1.0, 0.0, {overlap, std::sqrt(std::max(0.0, 1.0 - mag2))})});
    const auto dist = output_distribution(u, in);
    OccupationPattern target{std::vector<unsigned>(u.dim(), 0)};
    target.counts[outs.first] = 1;
    target.counts[outs.second] = 1;
    return dist.at(target);
}

std::vector<CVector> spectral_vectors_from_gram(const CMatrix &gram, double tol) {
    if (!gram.square() || gram.empty()) {
        throw Error(ErrorCode::Validation, "Gram matrix must be square and non-empty");
    }
    const std::size_t n = gram.rows();
    if (max_abs_diff(gram, gram.adjoint()) > tol) {
        throw Error(ErrorCode::Validation, "Gram matrix is not Hermitian");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(gram(i, i) - 1.0) > tol) {
            throw Error(ErrorCode::Validation, "Gram matrix diagonal entry " + std::to_string(i) + " is not 1");
        }
    }
    const auto ev = hermitian_eigenvalues(gram);
    if (ev.front() < -tol) {
        throw Error(ErrorCode::Validation, "Gram matrix is not positive semidefinite (min eigenvalue " +
                                               std::to_string(ev.front()) + ")");
    }

    // gram = R^dagger R with R upper triangular; zero pivots leave zero rows.
    CMatrix r(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        cplx diag = gram(i, i);
        for (std::size_t k = 0; k < i; ++k) {
            diag -= std::norm(r(k, i));
        }
        const double pivot = diag.real();
        if (pivot <= tol) {
            continue;
        }
        const double rii = std::sqrt(pivot);
        r(i, i) = rii;
        for (std::size_t j = i + 1; j < n; ++j) {
            cplx v = gram(i, j);
            for (std::size_t k = 0; k < i; ++k) {
                v -= std::conj(r(k, i)) * r(k, j);
            }
            r(i, j) = v / rii;
        }
    }

    std::vector<CVector> vectors(n, CVector(n));
    for (std::size_t j = 0; j < n; ++j) {
        double nrm = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            vectors[j][i] = r(i, j);
            nrm += std::norm(r(i, j));
        }
        nrm = std::sqrt(nrm);
        for (cplx &z : vectors[j]) {
            z /= nrm;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const cplx got = kernels::dotc(vectors[i].data(), vectors[j].data(), n);
            if (std::abs(got - gram(i, j)) > 1e-8) {
                throw Error(ErrorCode::Validation, "Gram matrix could not be factorised consistently");
            }
        }
    }
    return vectors;
}

InputConfiguration make_input(std::span<const std::array<cplx, 2>> pols, std::span<const CVector> spectra) {
    if (pols.size() != spectra.size()) {
        throw Error(ErrorCode::Validation, "polarisation and spectral lists differ in length");
    }
    InputConfiguration in;
    for (std::size_t j = 0; j < pols.size(); ++j) {
        in.photons.push_back({j, InternalState::polarized(pols[j][0], pols[j][1], spectra[j])});
    }
    return in;
}

InputConfiguration make_input(std::span<const std::array<cplx, 2>> pols, std::size_t spectral_dim) {
    if (spectral_dim == 0) {
        throw Error(ErrorCode::Validation, "spectral dimension must be at least 1");
    }
    CVector common(spectral_dim, 0.0);
    common[0] = 1.0;
    std::vector<CVector> spectra(pols.size(), common);
    return make_input(pols, spectra);
}

}  // namespace tritter
