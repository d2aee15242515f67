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

#include <array>
#include <compare>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include "tritter/linalg.hpp"

/// Multi-photon interference in passive linear optics.
///
/// Photons enter distinct spatial input ports, each carrying an internal state
/// (polarisation qubit tensored with a spectral vector). The interferometer
/// acts on spatial modes only. Transition amplitudes are matrix permanents.
///
/// Ports and output indices are zero-based throughout the C++ API.
namespace tritter {

inline constexpr double kUnitarityTol = 1e-10;
inline constexpr double kStateNormTol = 1e-12;
inline constexpr double kDensityTol = 1e-10;
inline constexpr double kNormalizationTol = 1e-9;

/// Largest matrix accepted by permanent().
inline constexpr std::size_t kMaxPermanentDim = 12;
/// permanent() switches from permutation enumeration to Ryser above this size.
inline constexpr std::size_t kMaxEnumerationDim = 6;

/// An N x N unitary on spatial modes. Row index = input port, column = output port.
class Interferometer {
   public:
    /// Throws ErrorCode::Shape for non-square input and ErrorCode::Validation
    /// when max |U U^dagger - I| exceeds `tol`.
    static Interferometer from_matrix(CMatrix u, double tol = kUnitarityTol);

    /// Closest unitary in Frobenius norm (polar factor of `m`).
    static Interferometer nearest_unitary(const CMatrix &m);

    std::size_t dim() const noexcept { return u_.rows(); }
    const CMatrix &matrix() const noexcept { return u_; }
    cplx operator()(std::size_t in, std::size_t out) const { return u_(in, out); }

   private:
    explicit Interferometer(CMatrix u) : u_(std::move(u)) {}
    CMatrix u_;
};

/// max |U U^dagger - I|.
double unitarity_error(const CMatrix &u);

/// Balanced N-port splitter: U(k, j) = exp(2 pi i k j / n) / sqrt(n), zero-based.
Interferometer fourier_unitary(std::size_t n);

enum class Polarization : std::size_t { H = 0, V = 1 };

struct InternalState {
    std::array<cplx, 2> pol{1.0, 0.0};
    CVector spectral{1.0};

    static InternalState polarized(cplx h, cplx v, CVector spectral = {1.0});

    std::size_t spectral_dim() const noexcept { return spectral.size(); }
    /// Amplitude on (polarisation p, spectral basis state s).
    cplx amplitude(std::size_t p, std::size_t s) const { return pol[p] * spectral[s]; }

    /// Throws ErrorCode::Validation when either factor is not unit-norm.
    void validate() const;
};

struct Photon {
    std::size_t port = 0;
    InternalState state;
};

struct InputConfiguration {
    std::vector<Photon> photons;

    std::size_t size() const noexcept { return photons.size(); }
    std::size_t spectral_dim() const;
    /// Checks ports are in range and distinct, states normalised, and all
    /// photons share one spectral dimension.
    void validate(std::size_t ports) const;
};

struct OccupationPattern {
    std::vector<unsigned> counts;

    unsigned total() const;
    bool collision_free() const;
    auto operator<=>(const OccupationPattern &) const = default;
};

using OutputDistribution = std::map<OccupationPattern, double>;

struct PostSelectionResult {
    CMatrix rho;  // over the post-selected polarisation qubits, output-port order
    double probability = 0.0;
    bool defined = false;  // false when probability is zero and rho is meaningless

    std::size_t qubits() const;
};

/// Sum over permutations of prod_k m(k, sigma(k)).
cplx permanent(const CMatrix &m);
cplx permanent_enumerate(const CMatrix &m);
cplx permanent_ryser(const CMatrix &m);

/// Port-resolved output probabilities, marginalised over internal modes.
/// Bunched patterns carry the 1/prod(n!) bosonic normalisation.
OutputDistribution output_distribution(const Interferometer &u, const InputConfiguration &in);

/// Polarisation state conditioned on the collision-free `pattern`, with the
/// spectral degrees of freedom traced out.
PostSelectionResult postselect_coincidence(const Interferometer &u, const InputConfiguration &in,
                                           const OccupationPattern &pattern);

/// Probability of one photon in each of `outs` for two H-polarised photons in
/// `ports` whose spectral states have inner product `overlap`.
double pair_coincidence_probability(const Interferometer &u, std::pair<std::size_t, std::size_t> ports,
                                    std::pair<std::size_t, std::size_t> outs, cplx overlap);

/// Spectral vectors s_j with <s_j|s_k> = gram(j, k). The Gram matrix must be
/// Hermitian, unit-diagonal and positive semidefinite. Vectors have dimension
/// gram.rows(); they are the columns of a semidefinite Cholesky factor.
std::vector<CVector> spectral_vectors_from_gram(const CMatrix &gram, double tol = kDensityTol);

/// Builds an input with photon j in port j carrying polarisation pols[j] and
/// spectral vector spectra[j].
InputConfiguration make_input(std::span<const std::array<cplx, 2>> pols, std::span<const CVector> spectra);

/// Same, with all photons in one common spectral mode of dimension `spectral_dim`.
InputConfiguration make_input(std::span<const std::array<cplx, 2>> pols, std::size_t spectral_dim = 1);

}  // namespace tritter
