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
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "tritter/interference.hpp"
#include "tritter/linalg.hpp"

/// Canonical few-qubit entangled states, input-polarisation recipes for the
/// ideal tritter, and fidelity-based entanglement witnesses.
///
/// Qubit ordering is output-port order, first port leftmost (most significant
/// bit), with H = 0 and V = 1.
namespace tritter {

enum class StateKind { W, Wbar, GHZ, G, Gprime, GHZprime, BellSinglet };

std::string_view to_string(StateKind kind);
std::optional<StateKind> parse_state_kind(std::string_view name);

struct StateVector {
    CVector amplitudes;

    std::size_t qubits() const;
    std::size_t dim() const noexcept { return amplitudes.size(); }
};

StateVector canonical_state(StateKind kind);

/// Multiplies by a global phase so the largest-magnitude amplitude (first one
/// on ties) is real and positive.
StateVector normalize_phase(StateVector psi);

/// Leading eigenvector of a density matrix, phase-normalised.
StateVector dominant_state(const CMatrix &rho);

struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;
    double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

using PolarizationAmplitudes = std::array<cplx, 2>;

struct Recipe {
    StateKind kind;
    std::array<PolarizationAmplitudes, 3> inputs;  // photon j enters port j
    Rational expected_probability;
};

/// Recipes exist for W, Gprime and GHZprime; anything else is ErrorCode::NoRecipe.
Recipe recipe(StateKind kind);

/// Input configuration for a recipe. `spectra` defaults to one shared mode.
InputConfiguration recipe_input(const Recipe &r);
InputConfiguration recipe_input(const Recipe &r, std::span<const CVector> spectra);

/// Single-qubit unitary that maps G' -> G (Hadamard) or GHZ' -> GHZ when applied
/// to every qubit. Other kinds are ErrorCode::NoTransform.
CMatrix local_transform(StateKind kind);

/// Applies `u` to every qubit of `psi`.
StateVector apply_local(const CMatrix &u, const StateVector &psi);

/// |<a|b>|
double overlap(const StateVector &a, const StateVector &b);

/// <psi|rho|psi>
double fidelity(const CMatrix &rho, const StateVector &target);

/// tr(rho^2)
double purity(const CMatrix &rho);

struct WitnessThresholds {
    static constexpr double kW = 2.0 / 3.0;
    static constexpr double kGenuine = 0.5;
    static constexpr double kGhzClass = 0.75;
};

struct WitnessReport {
    StateKind claimed = StateKind::W;
    double fidelity = 0.0;     // <claimed|rho|claimed>
    double fidelity_w = 0.0;   // <W|rho|W>
    double ghz_overlap = 0.0;  // <R|rho|R>, R = GHZ for claims GHZ/G, else GHZ'
    bool w_witness = false;           // fidelity_w > 2/3
    bool genuine_tripartite = false;  // w_witness or ghz_overlap > 1/2
    bool ghz_class = false;           // ghz_overlap > 3/4
};

/// Threshold verdicts from already-computed values; strict inequalities.
WitnessReport witness_verdicts(StateKind claimed, double fidelity, double fidelity_w, double ghz_overlap);

/// Requires a 3-qubit (8x8) density matrix.
WitnessReport witness_report(const CMatrix &rho, StateKind claimed);

nlohmann::ordered_json to_json(const WitnessReport &w);

}  // namespace tritter
