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

#include <cstdint>
#include <functional>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "tritter/linalg.hpp"
#include "tritter/states.hpp"

/// Pauli-basis projective tomography: simulated counts, maximum-likelihood
/// reconstruction and Poisson Monte-Carlo error bars.
namespace tritter {

enum class PauliBasis { X, Y, Z };

struct MeasurementSetting {
    std::vector<PauliBasis> bases;

    std::size_t qubits() const noexcept { return bases.size(); }
    std::string label() const;
    static MeasurementSetting parse(const std::string &label);
    auto operator<=>(const MeasurementSetting &) const = default;
};

/// All 3^n settings in lexicographic X < Y < Z order.
std::vector<MeasurementSetting> measurement_settings(std::size_t n);

/// Rows are <e_b| for the 2^n product eigenstates of `setting`. Outcome bit 0
/// is the +1 eigenstate; qubit 0 is the leftmost bit.
CMatrix measurement_basis(const MeasurementSetting &setting);

/// Outcome probabilities, indexed by outcome bitstring.
std::vector<double> born_probabilities(const CMatrix &rho, const MeasurementSetting &setting);

struct CountsTable {
    std::size_t qubits = 0;
    std::vector<MeasurementSetting> settings;
    std::vector<std::vector<double>> counts;  // [setting][outcome]

    double shots(std::size_t setting) const;
    double total() const;
    void validate() const;
};

/// Multinomial draws of `shots` events per setting.
CountsTable simulate_counts(const CMatrix &rho, const std::vector<MeasurementSetting> &settings, std::uint64_t shots,
                            std::uint64_t seed);

/// shots * probability, without sampling noise.
CountsTable expected_counts(const CMatrix &rho, const std::vector<MeasurementSetting> &settings, double shots);

struct MleOptions {
    double tolerance = 1e-9;  // trace distance between successive iterates
    std::size_t max_iterations = 10000;
    bool record_trace = false;  // keep the per-iteration log-likelihood
};

struct ReconstructionResult {
    CMatrix rho;
    double log_likelihood = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
    double last_step = 0.0;                // trace distance of the final update
    std::size_t diluted_steps = 0;         // iterations that fell back to a damped update
    std::vector<double> likelihood_trace;  // filled when MleOptions::record_trace
};

/// Iterative R rho R likelihood ascent from the maximally mixed state. Each
/// update is damped, (I + eps R) rho (I + eps R), whenever the undamped step
/// would lower the likelihood, so the likelihood never decreases.
ReconstructionResult reconstruct_mle(const CountsTable &counts, const MleOptions &options = {});

/// Unconstrained linear inversion from Pauli expectation values. May have
/// negative eigenvalues; intended as a diagnostic.
CMatrix reconstruct_linear(const CountsTable &counts);

/// sum n log p for `rho` against `counts`.
double log_likelihood(const CMatrix &rho, const CountsTable &counts);

struct Functional {
    enum class Kind { Fidelity, Purity };
    Kind kind = Kind::Purity;
    StateVector target;

    static Functional fidelity_to(StateVector target) { return {Kind::Fidelity, std::move(target)}; }
    static Functional purity_of() { return {Kind::Purity, {}}; }
    double operator()(const CMatrix &rho) const;
};

struct UncertaintyEstimate {
    double mean = 0.0;
    double std = 0.0;  // sample standard deviation
    std::size_t resamples = 0;
    std::size_t failures = 0;
};

/// Redraws every count as Poisson(observed), reconstructs and evaluates the
/// functional. Resample i uses a stream seeded from (seed, i), so the result
/// does not depend on `threads` (0 = hardware concurrency).
UncertaintyEstimate monte_carlo_uncertainty(const CountsTable &counts, std::size_t resamples,
                                            const Functional &functional, std::uint64_t seed,
                                            unsigned threads = 0, const MleOptions &options = {});

void write_counts_csv(std::ostream &out, const CountsTable &counts);
CountsTable read_counts_csv(std::istream &in);

nlohmann::ordered_json to_json(const ReconstructionResult &r);
nlohmann::ordered_json to_json(const UncertaintyEstimate &u);

}  // namespace tritter
