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

#include "tritter/states.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "tritter/error.hpp"
#include "tritter/kernels.hpp"

namespace tritter {

namespace {

StateVector basis_superposition(std::size_t qubits, std::initializer_list<std::pair<std::size_t, double>> terms) {
    StateVector psi{CVector(std::size_t{1} << qubits, 0.0)};
    double norm2 = 0.0;
    for (const auto &[index, weight] : terms) {
        psi.amplitudes[index] = weight;
        norm2 += weight * weight;
    }
    const double scale = 1.0 / std::sqrt(norm2);
    for (cplx &a : psi.amplitudes) {
        a *= scale;
    }
    return psi;
}

void require_three_qubits(const CMatrix &rho, const char *what) {
    if (rho.rows() != 8 || rho.cols() != 8) {
        throw Error(ErrorCode::Shape, std::string(what) + " needs a 3-qubit density matrix");
    }
}

}  // namespace

std::string_view to_string(StateKind kind) {
    switch (kind) {
        case StateKind::W:
            return "w";
        case StateKind::Wbar:
            return "wbar";
        case StateKind::GHZ:
            return "ghz";
        case StateKind::G:
            return "g";
        case StateKind::Gprime:
            return "gprime";
        case StateKind::GHZprime:
            return "ghzprime";
        case StateKind::BellSinglet:
            return "singlet";
    }
    return "unknown";
}

std::optional<StateKind> parse_state_kind(std::string_view name) {
    for (StateKind k : {StateKind::W, StateKind::Wbar, StateKind::GHZ, StateKind::G, StateKind::Gprime,
                        StateKind::GHZprime, StateKind::BellSinglet}) {
        if (to_string(k) == name) {
            return k;
        }
    }
    return std::nullopt;
}

std::size_t StateVector::qubits() const { return static_cast<std::size_t>(std::countr_zero(amplitudes.size())); }

StateVector canonical_state(StateKind kind) {
    switch (kind) {
        case StateKind::W:
            return basis_superposition(3, {{0b001, 1.0}, {0b010, 1.0}, {0b100, 1.0}});
        case StateKind::Wbar:
            return basis_superposition(3, {{0b110, 1.0}, {0b101, 1.0}, {0b011, 1.0}});
        case StateKind::GHZ:
            return basis_superposition(3, {{0b000, 1.0}, {0b111, 1.0}});
        case StateKind::G:
            return basis_superposition(
                3, {{0b001, 1.0}, {0b010, 1.0}, {0b100, 1.0}, {0b110, 1.0}, {0b101, 1.0}, {0b011, 1.0}});
        case StateKind::Gprime:
            return basis_superposition(3, {{0b000, 3.0}, {0b011, -1.0}, {0b101, -1.0}, {0b110, -1.0}});
        case StateKind::GHZprime:
            return basis_superposition(3, {{0b000, 1.0}, {0b011, -1.0}, {0b101, -1.0}, {0b110, -1.0}});
        case StateKind::BellSinglet:
            return basis_superposition(2, {{0b01, 1.0}, {0b10, -1.0}});
    }
    throw Error(ErrorCode::Validation, "unknown state kind");
}

StateVector normalize_phase(StateVector psi) {
    double best = 0.0;
    for (const cplx &a : psi.amplitudes) {
        best = std::max(best, std::abs(a));
    }
    if (best == 0.0) {
        return psi;
    }
    for (const cplx &a : psi.amplitudes) {
        if (std::abs(a) >= best * (1.0 - 1e-9)) {
            const cplx phase = std::conj(a) / std::abs(a);
            for (cplx &b : psi.amplitudes) {
                b *= phase;
            }
            break;
        }
    }
    return psi;
}

StateVector dominant_state(const CMatrix &rho) {
    const auto eig = hermitian_eigensystem(hermitian_part(rho));
    const std::size_t top = eig.values.size() - 1;
    StateVector psi{CVector(rho.rows())};
    for (std::size_t r = 0; r < rho.rows(); ++r) {
        psi.amplitudes[r] = eig.vectors(r, top);
    }
    return normalize_phase(std::move(psi));
}

Recipe recipe(StateKind kind) {
    const double r2 = 1.0 / std::sqrt(2.0);
    const double r3 = std::sqrt(3.0) / 2.0;
    switch (kind) {
        case StateKind::W:
            return {kind, {{{1.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}}, {1, 9}};
        case StateKind::Gprime:
            // H, D, A
            return {kind, {{{1.0, 0.0}, {r2, r2}, {r2, -r2}}}, {1, 9}};
        case StateKind::GHZprime:
            // linear polarisations at 0 and +-60 degrees
            return {kind, {{{1.0, 0.0}, {0.5, r3}, {0.5, -r3}}}, {1, 12}};
        default:
            throw Error(ErrorCode::NoRecipe, "no tritter recipe for state '" + std::string(to_string(kind)) + "'");
    }
}

InputConfiguration recipe_input(const Recipe &r) { return make_input(r.inputs); }

InputConfiguration recipe_input(const Recipe &r, std::span<const CVector> spectra) {
    return make_input(r.inputs, spectra);
}

CMatrix local_transform(StateKind kind) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i{0.0, 1.0};
    switch (kind) {
        case StateKind::Gprime:
            return CMatrix{{s, s}, {s, -s}};
        case StateKind::GHZprime:
            return CMatrix{{s, s * i}, {s, -s * i}};
        default:
            throw Error(ErrorCode::NoTransform,
                        "no local transform for state '" + std::string(to_string(kind)) + "'");
    }
}

StateVector apply_local(const CMatrix &u, const StateVector &psi) {
    if (u.rows() != 2 || u.cols() != 2) {
        throw Error(ErrorCode::Shape, "local transform must be 2x2");
    }
    const std::size_t n = psi.qubits();
    CVector state = psi.amplitudes;
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t bit = std::size_t{1} << (n - 1 - q);
        for (std::size_t idx = 0; idx < state.size(); ++idx) {
            if ((idx & bit) != 0) {
                continue;
            }
            const cplx a0 = state[idx];
            const cplx a1 = state[idx | bit];
            state[idx] = u(0, 0) * a0 + u(0, 1) * a1;
            state[idx | bit] = u(1, 0) * a0 + u(1, 1) * a1;
        }
    }
    return {std::move(state)};
}

double overlap(const StateVector &a, const StateVector &b) {
    if (a.dim() != b.dim()) {
        throw Error(ErrorCode::Shape, "overlap: dimension mismatch");
    }
    return std::abs(kernels::dotc(a.amplitudes.data(), b.amplitudes.data(), a.dim()));
}

double fidelity(const CMatrix &rho, const StateVector &target) {
    if (!rho.square() || rho.rows() != target.dim()) {
        throw Error(ErrorCode::Shape, "fidelity: density matrix is " + std::to_string(rho.rows()) + "x" +
                                          std::to_string(rho.cols()) + ", target has " +
                                          std::to_string(target.dim()) + " amplitudes");
    }
    return expectation(rho, target.amplitudes);
}

double purity(const CMatrix &rho) {
    if (!rho.square()) {
        throw Error(ErrorCode::Shape, "purity of a non-square matrix");
    }
    // tr(rho^2) = sum_ij rho_ij rho_ji
    double total = 0.0;
    for (std::size_t i = 0; i < rho.rows(); ++i) {
        for (std::size_t j = 0; j < rho.cols(); ++j) {
            total += (rho(i, j) * rho(j, i)).real();
        }
    }
    return total;
}

WitnessReport witness_verdicts(StateKind claimed, double fid, double fidelity_w, double ghz_overlap) {
    WitnessReport w;
    w.claimed = claimed;
    w.fidelity = fid;
    w.fidelity_w = fidelity_w;
    w.ghz_overlap = ghz_overlap;
    w.w_witness = fidelity_w > WitnessThresholds::kW;
    w.genuine_tripartite = w.w_witness || ghz_overlap > WitnessThresholds::kGenuine;
    w.ghz_class = ghz_overlap > WitnessThresholds::kGhzClass;
    return w;
}

WitnessReport witness_report(const CMatrix &rho, StateKind claimed) {
    require_three_qubits(rho, "witness_report");
    if (claimed == StateKind::BellSinglet) {
        throw Error(ErrorCode::Validation, "witnesses are defined for three-qubit states");
    }
    const bool canonical_basis = claimed == StateKind::GHZ || claimed == StateKind::G;
    const StateKind reference = canonical_basis ? StateKind::GHZ : StateKind::GHZprime;
    return witness_verdicts(claimed, fidelity(rho, canonical_state(claimed)),
                            fidelity(rho, canonical_state(StateKind::W)), fidelity(rho, canonical_state(reference)));
}

nlohmann::ordered_json to_json(const WitnessReport &w) {
    nlohmann::ordered_json j;
    j["claimed"] = std::string(to_string(w.claimed));
    j["fidelity"] = w.fidelity;
    j["fidelity_w"] = w.fidelity_w;
    j["ghz_overlap"] = w.ghz_overlap;
    j["ghz_reference"] = (w.claimed == StateKind::GHZ || w.claimed == StateKind::G) ? "ghz" : "ghzprime";
    j["w_witness"] = w.w_witness;
    j["genuine_tripartite"] = w.genuine_tripartite;
    j["ghz_class"] = w.ghz_class;
    return j;
}

}  // namespace tritter
