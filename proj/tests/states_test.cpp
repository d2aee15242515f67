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

#include <cmath>
#include <random>

#include "gtest/gtest.h"
#include "test_util.hpp"
#include "tritter/error.hpp"

using namespace tritter;

namespace {

constexpr StateKind kAllKinds[] = {StateKind::W,      StateKind::Wbar,     StateKind::GHZ,        StateKind::G,
                                   StateKind::Gprime, StateKind::GHZprime, StateKind::BellSinglet};

// Unnormalised coincidence amplitudes from explicit 3x3 permanents of the
// literal tritter matrix weighted by input polarisations.
CVector coincidence_amplitudes(const std::array<PolarizationAmplitudes, 3> &pols) {
    const CMatrix u = testutil::tritter_literal();
    CVector amps(8);
    for (std::size_t idx = 0; idx < 8; ++idx) {
        CMatrix m(3, 3);
        for (std::size_t j = 0; j < 3; ++j) {
            for (std::size_t k = 0; k < 3; ++k) {
                m(j, k) = u(j, k) * pols[j][(idx >> (2 - k)) & 1u];
            }
        }
        amps[idx] = testutil::permanent3(m);
    }
    return amps;
}

CMatrix mixture(const StateVector &psi, double lambda) {
    CMatrix rho = CMatrix::projector(psi.amplitudes);
    rho *= 1.0 - lambda;
    CMatrix white = CMatrix::identity(psi.dim());
    white *= lambda / static_cast<double>(psi.dim());
    return rho + white;
}

ErrorCode code_of(const std::function<void()> &fn) {
    try {
        fn();
    } catch (const Error &e) {
        return e.code();
    }
    ADD_FAILURE() << "no tritter::Error thrown";
    return ErrorCode::Io;
}

}  // namespace

TEST(canonical_state, w_amplitudes) {
    const auto w = canonical_state(StateKind::W);
    const double a = 1.0 / std::sqrt(3.0);
    const double want[8] = {0, a, a, 0, a, 0, 0, 0};
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(std::abs(w.amplitudes[i] - want[i]), 0.0, 1e-15) << i;
    }
}

TEST(canonical_state, gprime_amplitudes) {
    const auto g = canonical_state(StateKind::Gprime);
    const double s = 1.0 / (2.0 * std::sqrt(3.0));
    const double want[8] = {3 * s, 0, 0, -s, 0, -s, -s, 0};
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(std::abs(g.amplitudes[i] - want[i]), 0.0, 1e-15) << i;
    }
}

TEST(canonical_state, g_is_even_superposition_of_w_and_wbar) {
    const auto g = canonical_state(StateKind::G);
    const auto w = canonical_state(StateKind::W);
    const auto wb = canonical_state(StateKind::Wbar);
    const double s = 1.0 / std::sqrt(6.0);
    const double want[8] = {0, s, s, s, s, s, s, 0};
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(std::abs(g.amplitudes[i] - want[i]), 0.0, 1e-15) << i;
        EXPECT_NEAR(std::abs(g.amplitudes[i] - (w.amplitudes[i] + wb.amplitudes[i]) / std::sqrt(2.0)), 0.0, 1e-15);
    }
}

TEST(canonical_state, ghzprime_amplitudes) {
    const auto g = canonical_state(StateKind::GHZprime);
    const double want[8] = {0.5, 0, 0, -0.5, 0, -0.5, -0.5, 0};
    for (std::size_t i = 0; i < 8; ++i) {
        EXPECT_NEAR(std::abs(g.amplitudes[i] - want[i]), 0.0, 1e-15) << i;
    }
}

TEST(canonical_state, all_kinds_normalised_and_named) {
    for (StateKind k : kAllKinds) {
        const auto psi = canonical_state(k);
        double n2 = 0.0;
        for (const cplx &a : psi.amplitudes) {
            n2 += std::norm(a);
        }
        EXPECT_NEAR(n2, 1.0, 1e-12) << to_string(k);
        EXPECT_EQ(parse_state_kind(to_string(k)), k);
    }
    EXPECT_FALSE(parse_state_kind("bogus").has_value());
}

TEST(recipe, inputs_match_expected_polarisations) {
    const double r2 = 1.0 / std::sqrt(2.0);
    const double r3 = std::sqrt(3.0) / 2.0;
    const auto w = recipe(StateKind::W);
    EXPECT_EQ(w.inputs[2][1], cplx(1.0));
    EXPECT_EQ(w.expected_probability.num, 1);
    EXPECT_EQ(w.expected_probability.den, 9);
    const auto g = recipe(StateKind::Gprime);
    EXPECT_NEAR(std::abs(g.inputs[1][1] - r2), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(g.inputs[2][1] + r2), 0.0, 1e-15);
    EXPECT_EQ(g.expected_probability.den, 9);
    const auto h = recipe(StateKind::GHZprime);
    EXPECT_NEAR(std::abs(h.inputs[1][1] - r3), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h.inputs[2][1] + r3), 0.0, 1e-15);
    EXPECT_EQ(h.expected_probability.den, 12);
}

TEST(recipe, w_coincidence_amplitudes_from_explicit_permanents) {
    const CVector amps = coincidence_amplitudes(recipe(StateKind::W).inputs);
    for (std::size_t idx = 0; idx < 8; ++idx) {
        const double want = (idx == 1 || idx == 2 || idx == 4) ? -1.0 / (3.0 * std::sqrt(3.0)) : 0.0;
        EXPECT_NEAR(std::abs(amps[idx] - want), 0.0, 1e-15) << idx;
    }
}

TEST(recipe, every_recipe_reproduces_its_state_at_exact_probability) {
    for (StateKind k : {StateKind::W, StateKind::Gprime, StateKind::GHZprime}) {
        const auto r = recipe(k);
        const CVector amps = coincidence_amplitudes(r.inputs);
        double p_oracle = 0.0;
        for (const cplx &a : amps) {
            p_oracle += std::norm(a);
        }
        EXPECT_NEAR(p_oracle, r.expected_probability.value(), 1e-12) << to_string(k);

        const auto res = postselect_coincidence(fourier_unitary(3), recipe_input(r), {{1, 1, 1}});
        ASSERT_TRUE(res.defined);
        EXPECT_NEAR(res.probability, r.expected_probability.value(), 1e-12) << to_string(k);
        EXPECT_GT(fidelity(res.rho, canonical_state(k)), 1.0 - 1e-10) << to_string(k);

        StateVector oracle{amps};
        for (cplx &a : oracle.amplitudes) {
            a /= std::sqrt(p_oracle);
        }
        EXPECT_NEAR(overlap(oracle, canonical_state(k)), 1.0, 1e-12) << to_string(k);
        const auto dom = dominant_state(res.rho);
        const auto canon = normalize_phase(canonical_state(k));
        for (std::size_t i = 0; i < 8; ++i) {
            EXPECT_NEAR(std::abs(dom.amplitudes[i] - canon.amplitudes[i]), 0.0, 1e-10) << to_string(k) << " " << i;
        }
    }
}

TEST(recipe, other_kinds_have_no_recipe) {
    for (StateKind k : {StateKind::Wbar, StateKind::GHZ, StateKind::G, StateKind::BellSinglet}) {
        EXPECT_EQ(code_of([&] { recipe(k); }), ErrorCode::NoRecipe);
    }
}

TEST(local_transform, matrices) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i{0.0, 1.0};
    EXPECT_LT(max_abs_diff(local_transform(StateKind::Gprime), CMatrix{{s, s}, {s, -s}}), 1e-15);
    EXPECT_LT(max_abs_diff(local_transform(StateKind::GHZprime), CMatrix{{s, s * i}, {s, -s * i}}), 1e-15);
    EXPECT_EQ(code_of([] { local_transform(StateKind::W); }), ErrorCode::NoTransform);
}

TEST(local_transform, maps_primed_states_to_canonical_ones) {
    const auto g = apply_local(local_transform(StateKind::Gprime), canonical_state(StateKind::Gprime));
    EXPECT_GT(overlap(g, canonical_state(StateKind::G)), 1.0 - 1e-12);
    const auto ghz = apply_local(local_transform(StateKind::GHZprime), canonical_state(StateKind::GHZprime));
    EXPECT_GT(overlap(ghz, canonical_state(StateKind::GHZ)), 1.0 - 1e-12);
}

TEST(local_transform, apply_local_matches_kronecker_product) {
    std::mt19937_64 rng(5);
    const CMatrix u = testutil::random_unitary(2, rng);
    const StateVector psi{testutil::random_state(8, rng)};
    const CMatrix big = kron(kron(u, u), u);
    const auto got = apply_local(u, psi);
    for (std::size_t r = 0; r < 8; ++r) {
        cplx want = 0.0;
        for (std::size_t c = 0; c < 8; ++c) {
            want += big(r, c) * psi.amplitudes[c];
        }
        EXPECT_LT(std::abs(got.amplitudes[r] - want), 1e-14);
    }
}

TEST(fidelity, reference_values) {
    const auto w = canonical_state(StateKind::W);
    EXPECT_NEAR(fidelity(CMatrix::projector(w.amplitudes), w), 1.0, 1e-15);
    for (StateKind k : kAllKinds) {
        const auto psi = canonical_state(k);
        EXPECT_NEAR(fidelity(maximally_mixed(psi.dim()), psi), 1.0 / static_cast<double>(psi.dim()), 1e-15);
    }
    const auto gp = canonical_state(StateKind::Gprime);
    EXPECT_NEAR(fidelity(CMatrix::projector(gp.amplitudes), canonical_state(StateKind::GHZprime)), 0.75, 1e-12);
    EXPECT_NEAR(std::pow(overlap(gp, canonical_state(StateKind::GHZprime)), 2), 0.75, 1e-12);
    EXPECT_EQ(code_of([] { fidelity(CMatrix::identity(4), canonical_state(StateKind::W)); }), ErrorCode::Shape);
}

TEST(purity, reference_values) {
    const auto w = canonical_state(StateKind::W);
    EXPECT_NEAR(purity(CMatrix::projector(w.amplitudes)), 1.0, 1e-15);
    EXPECT_NEAR(purity(maximally_mixed(8)), 0.125, 1e-15);
    const double lambda = 0.2;
    const double closed_form = (1 - lambda) * (1 - lambda) + 2 * (1 - lambda) * lambda / 8 + lambda * lambda / 8;
    // 0.64 + 0.04 + 0.005
    EXPECT_NEAR(closed_form, 0.685, 1e-12);
    // Explicit tr(rho rho) through the matrix product.
    const CMatrix rho = mixture(w, lambda);
    EXPECT_NEAR((rho * rho).trace().real(), closed_form, 1e-12);
    EXPECT_NEAR(purity(rho), closed_form, 1e-12);
    EXPECT_EQ(code_of([] { purity(CMatrix(2, 3)); }), ErrorCode::Shape);
}

TEST(fidelity, linear_in_rho_and_phase_invariant) {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const CMatrix a = testutil::random_density(8, rng);
        const CMatrix b = testutil::random_density(8, rng);
        const StateVector psi{testutil::random_state(8, rng)};
        const double t = unit(rng);
        CMatrix ta = a;
        ta *= t;
        CMatrix tb = b;
        tb *= 1.0 - t;
        EXPECT_NEAR(fidelity(ta + tb, psi), t * fidelity(a, psi) + (1 - t) * fidelity(b, psi), 1e-13);
        StateVector rotated = psi;
        const cplx phase = std::polar(1.0, 2.0 * M_PI * unit(rng));
        for (cplx &z : rotated.amplitudes) {
            z *= phase;
        }
        EXPECT_NEAR(fidelity(a, rotated), fidelity(a, psi), 1e-14);
        const double f = fidelity(a, psi);
        EXPECT_GE(f, 0.0);
        EXPECT_LE(f, 1.0 + 1e-10);
        const double p = purity(a);
        EXPECT_GE(p, 0.125 - 1e-12);
        EXPECT_LE(p, 1.0 + 1e-10);
    }
}

TEST(normalize_phase, largest_amplitude_becomes_real_positive) {
    StateVector psi{{cplx(0.1, 0.0), cplx(0.0, -0.9), cplx(0.3, 0.3), cplx(0.0)}};
    const auto out = normalize_phase(psi);
    EXPECT_NEAR(out.amplitudes[1].imag(), 0.0, 1e-15);
    EXPECT_NEAR(out.amplitudes[1].real(), 0.9, 1e-15);
    EXPECT_NEAR(overlap(out, psi), overlap(psi, psi), 1e-15);
}

TEST(witness, reported_verdict_calls) {
    EXPECT_TRUE(witness_verdicts(StateKind::W, 0.873, 0.873, 0.0).w_witness);
    EXPECT_TRUE(witness_verdicts(StateKind::W, 0.873, 0.873, 0.0).genuine_tripartite);
    EXPECT_TRUE(witness_verdicts(StateKind::Gprime, 0.6, 0.0, 0.572).genuine_tripartite);
    EXPECT_FALSE(witness_verdicts(StateKind::Gprime, 0.6, 0.0, 0.572).ghz_class);
    EXPECT_TRUE(witness_verdicts(StateKind::GHZprime, 0.788, 0.0, 0.788).ghz_class);
}

TEST(witness, thresholds_are_strict) {
    const auto at = witness_verdicts(StateKind::GHZprime, 0.75, 2.0 / 3.0, 0.75);
    EXPECT_FALSE(at.w_witness);
    EXPECT_FALSE(at.ghz_class);
    EXPECT_TRUE(at.genuine_tripartite);
    const auto half = witness_verdicts(StateKind::GHZprime, 0.5, 0.0, 0.5);
    EXPECT_FALSE(half.genuine_tripartite);
}

TEST(witness, maximally_mixed_fails_everything) {
    for (StateKind k : {StateKind::W, StateKind::Gprime, StateKind::GHZprime, StateKind::GHZ}) {
        const auto r = witness_report(maximally_mixed(8), k);
        EXPECT_NEAR(r.fidelity, 0.125, 1e-15);
        EXPECT_FALSE(r.w_witness);
        EXPECT_FALSE(r.genuine_tripartite);
        EXPECT_FALSE(r.ghz_class);
    }
}

TEST(witness, pure_targets_pass_their_witnesses) {
    const auto w = witness_report(CMatrix::projector(canonical_state(StateKind::W).amplitudes), StateKind::W);
    EXPECT_NEAR(w.fidelity_w, 1.0, 1e-12);
    EXPECT_TRUE(w.w_witness);
    EXPECT_TRUE(w.genuine_tripartite);
    EXPECT_FALSE(w.ghz_class);
    const auto g = witness_report(CMatrix::projector(canonical_state(StateKind::GHZprime).amplitudes),
                                  StateKind::GHZprime);
    EXPECT_NEAR(g.ghz_overlap, 1.0, 1e-12);
    EXPECT_TRUE(g.ghz_class);
    const auto gp =
        witness_report(CMatrix::projector(canonical_state(StateKind::Gprime).amplitudes), StateKind::Gprime);
    EXPECT_NEAR(gp.ghz_overlap, 0.75, 1e-12);
    EXPECT_TRUE(gp.genuine_tripartite);
    EXPECT_EQ(code_of([] { witness_report(CMatrix::identity(4), StateKind::W); }), ErrorCode::Shape);
}

TEST(witness, values_in_unit_interval_and_verdicts_are_threshold_functions) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 100; ++trial) {
        const CMatrix rho = testutil::random_density(8, rng);
        for (StateKind k : {StateKind::W, StateKind::Gprime, StateKind::GHZprime}) {
            const auto r = witness_report(rho, k);
            for (double v : {r.fidelity, r.fidelity_w, r.ghz_overlap}) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0 + 1e-10);
            }
            const auto again = witness_verdicts(k, r.fidelity, r.fidelity_w, r.ghz_overlap);
            EXPECT_EQ(again.w_witness, r.w_witness);
            EXPECT_EQ(again.genuine_tripartite, r.genuine_tripartite);
            EXPECT_EQ(again.ghz_class, r.ghz_class);
        }
    }
}

TEST(witness, white_noise_never_turns_a_fail_into_a_pass) {
    std::mt19937_64 rng(8);
    std::vector<CMatrix> states;
    for (StateKind k : {StateKind::W, StateKind::Gprime, StateKind::GHZprime, StateKind::G}) {
        states.push_back(CMatrix::projector(canonical_state(k).amplitudes));
    }
    for (int i = 0; i < 30; ++i) {
        states.push_back(testutil::random_density(8, rng));
    }
    for (const CMatrix &rho : states) {
        for (StateKind k : {StateKind::W, StateKind::Gprime, StateKind::GHZprime}) {
            auto prev = witness_report(rho, k);
            for (double lambda = 0.05; lambda <= 1.0 + 1e-12; lambda += 0.05) {
                CMatrix noisy = rho;
                noisy *= 1.0 - lambda;
                CMatrix white = maximally_mixed(8);
                white *= lambda;
                const auto cur = witness_report(noisy + white, k);
                EXPECT_FALSE(!prev.w_witness && cur.w_witness);
                EXPECT_FALSE(!prev.genuine_tripartite && cur.genuine_tripartite);
                EXPECT_FALSE(!prev.ghz_class && cur.ghz_class);
                prev = cur;
            }
        }
    }
}

TEST(witness, json_has_values_and_verdicts) {
    const auto j = to_json(witness_report(maximally_mixed(8), StateKind::W));
    EXPECT_EQ(j.at("claimed"), "w");
    EXPECT_TRUE(j.contains("fidelity_w"));
    EXPECT_TRUE(j.contains("genuine_tripartite"));
}
