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

// Acceptance suite: one PASS/FAIL line per primary criterion, non-zero exit on
// any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "test_util.hpp"
#include "tritter/calibration.hpp"
#include "tritter/interference.hpp"
#include "tritter/pipeline.hpp"
#include "tritter/states.hpp"
#include "tritter/tomography.hpp"

using namespace tritter;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string &what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const OccupationPattern kCoincidence{{1, 1, 1}};

PostSelectionResult ideal(StateKind k) {
    return postselect_coincidence(fourier_unitary(3), recipe_input(recipe(k)), kCoincidence);
}

Outcome criterion1() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto res = ideal(StateKind::W);
    const double f = fidelity(res.rho, canonical_state(StateKind::W));
    const double dt = seconds_since(t0);
    o.require(f > 1.0 - 1e-10, "fidelity " + fmt("%.15f", f));
    o.require(std::abs(res.probability - 1.0 / 9.0) <= 1e-12, "probability " + fmt("%.15f", res.probability));
    o.require(dt < 1.0, "runtime " + fmt("%.3f s", dt));
    o.detail = o.pass ? "F=" + fmt("%.12f", f) + " p=" + fmt("%.12f", res.probability) + " t=" + fmt("%.4fs", dt)
                      : o.detail;
    return o;
}

Outcome criterion2() {
    Outcome o;
    std::string summary;
    for (auto [k, p] : {std::pair{StateKind::Gprime, 1.0 / 9.0}, std::pair{StateKind::GHZprime, 1.0 / 12.0}}) {
        const auto res = ideal(k);
        const double f = fidelity(res.rho, canonical_state(k));
        const std::string name(to_string(k));
        o.require(f > 1.0 - 1e-10, name + " fidelity " + fmt("%.15f", f));
        o.require(std::abs(res.probability - p) <= 1e-12, name + " probability " + fmt("%.15f", res.probability));
        summary += name + ": F=" + fmt("%.12f", f) + " p=" + fmt("%.12f", res.probability) + " ";
    }
    if (o.pass) {
        o.detail = summary;
    }
    return o;
}

Outcome criterion3() {
    Outcome o;
    const std::array<PolarizationAmplitudes, 2> pols{{{1.0, 0.0}, {0.0, 1.0}}};
    const auto res = postselect_coincidence(fourier_unitary(2), make_input(pols), OccupationPattern{{1, 1}});
    const double f = fidelity(res.rho, canonical_state(StateKind::BellSinglet));
    o.require(std::abs(res.probability - 0.5) <= 1e-15, "probability " + fmt("%.17f", res.probability));
    o.require(f > 1.0 - 1e-10, "singlet fidelity " + fmt("%.15f", f));
    if (o.pass) {
        o.detail = "p=" + fmt("%.15f", res.probability) + " F_singlet=" + fmt("%.12f", f);
    }
    return o;
}

Outcome criterion4() {
    Outcome o;
    const auto u = fourier_unitary(3);
    double worst = 0.0;
    for (int i = 0; i <= 10; ++i) {
        const double x = i / 10.0;
        const double p = pair_coincidence_probability(u, {0, 1}, {0, 1}, x);
        worst = std::max(worst, std::abs(p - (2.0 - x * x) / 9.0));
    }
    const double v = visibility(pair_coincidence_probability(u, {0, 1}, {0, 1}, 0.0),
                                pair_coincidence_probability(u, {0, 1}, {0, 1}, 1.0));
    o.require(worst <= 1e-12, "max deviation " + fmt("%.3e", worst));
    o.require(std::abs(v - 0.5) <= 1e-12, "visibility " + fmt("%.15f", v));
    if (o.pass) {
        o.detail = "max |P11-(2-x^2)/9|=" + fmt("%.2e", worst) + " V(x=1)=" + fmt("%.12f", v);
    }
    return o;
}

Outcome criterion5() {
    Outcome o;
    IntensityTable t;
    t.percent.resize(3, 3);
    t.percent << 32.01, 30.24, 29.86, 33.05, 29.18, 29.75, 32.97, 27.92, 29.94;
    const double printed_magnitudes[3][3] = {{0.987, 1.02, 0.997}, {1.00, 0.999, 0.997}, {1.01, 0.984, 1.01}};
    const double printed_loss[3] = {0.356, 0.363, 0.409};
    const auto m = sinkhorn_magnitudes(t).normalized();
    double worst_m = 0.0;
    double worst_l = 0.0;
    for (Eigen::Index r = 0; r < 3; ++r) {
        for (Eigen::Index c = 0; c < 3; ++c) {
            worst_m = std::max(worst_m, std::abs(m(r, c) - printed_magnitudes[r][c]));
        }
        const std::array<double, 3> row{t.percent(r, 0), t.percent(r, 1), t.percent(r, 2)};
        worst_l = std::max(worst_l, std::abs(insertion_loss_db(row) - printed_loss[r]));
    }
    o.require(worst_m <= 0.01, "magnitude deviation " + fmt("%.4f", worst_m));
    o.require(worst_l <= 0.02, "loss deviation " + fmt("%.4f dB", worst_l));
    if (o.pass) {
        o.detail = "max magnitude dev=" + fmt("%.4f", worst_m) + " max loss dev=" + fmt("%.4f dB", worst_l);
    }
    return o;
}

Outcome criterion6() {
    Outcome o;
    const double g = overlap(apply_local(local_transform(StateKind::Gprime), canonical_state(StateKind::Gprime)),
                             canonical_state(StateKind::G));
    const double h =
        overlap(apply_local(local_transform(StateKind::GHZprime), canonical_state(StateKind::GHZprime)),
                canonical_state(StateKind::GHZ));
    o.require(g > 1.0 - 1e-12, "G' -> G overlap " + fmt("%.15f", g));
    o.require(h > 1.0 - 1e-12, "GHZ' -> GHZ overlap " + fmt("%.15f", h));
    if (o.pass) {
        o.detail = "|<G|U^3|G'>|=" + fmt("%.14f", g) + " |<GHZ|U^3|GHZ'>|=" + fmt("%.14f", h);
    }
    return o;
}

Outcome criterion7() {
    Outcome o;
    const double ov = std::pow(overlap(canonical_state(StateKind::GHZprime), canonical_state(StateKind::Gprime)), 2);
    o.require(std::abs(ov - 0.75) <= 1e-12, "|<GHZ'|G'>|^2 " + fmt("%.15f", ov));
    o.require(witness_verdicts(StateKind::W, 0.873, 0.873, 0.0).w_witness, "F=0.873 W-witness");
    o.require(witness_verdicts(StateKind::Gprime, 0.834, 0.0, 0.572).genuine_tripartite, "overlap 0.572 genuine");
    o.require(witness_verdicts(StateKind::GHZprime, 0.788, 0.0, 0.788).ghz_class, "F=0.788 GHZ-class");
    if (o.pass) {
        o.detail = "|<GHZ'|G'>|^2=" + fmt("%.14f", ov) + "; 0.873 W pass, 0.572 genuine pass, 0.788 GHZ-class pass";
    }
    return o;
}

Outcome criterion8() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto settings = measurement_settings(3);
    MleOptions opts;
    opts.record_trace = true;
    std::string summary;
    std::size_t steps = 0;
    for (StateKind k : {StateKind::W, StateKind::Gprime, StateKind::GHZprime}) {
        const auto counts = simulate_counts(ideal(k).rho, settings, 10000, 2024);
        const auto r = reconstruct_mle(counts, opts);
        const double f = fidelity(r.rho, canonical_state(k));
        const std::string name(to_string(k));
        o.require(f > 0.98, name + " fidelity " + fmt("%.4f", f));
        for (std::size_t i = 1; i < r.likelihood_trace.size(); ++i) {
            ++steps;
            if (r.likelihood_trace[i] < r.likelihood_trace[i - 1]) {
                o.require(false, name + " likelihood fell at step " + std::to_string(i));
                break;
            }
        }
        summary += name + " F=" + fmt("%.4f", f) + " ";
    }
    const auto target = Functional::fidelity_to(canonical_state(StateKind::W));
    double prev = std::numeric_limits<double>::infinity();
    std::string stds;
    for (std::uint64_t shots : {100u, 1000u, 10000u}) {
        const auto counts = simulate_counts(ideal(StateKind::W).rho, settings, shots, 77);
        const auto est = monte_carlo_uncertainty(counts, 20, target, 78);
        o.require(est.std < prev, "MC std not decreasing at " + std::to_string(shots) + " shots");
        stds += fmt("%.2e", est.std) + " ";
        prev = est.std;
    }
    const double dt = seconds_since(t0);
    o.require(dt < 60.0, "runtime " + fmt("%.1f s", dt));
    if (o.pass) {
        o.detail = summary + "| " + std::to_string(steps) + " monotone steps | MC std " + stds + "| t=" +
                   fmt("%.2fs", dt);
    }
    return o;
}

// Distinguishable photons: weights prod_j |U(j, sigma(j))|^2 over assignments,
// each contributing the product state with photon sigma^-1(k) in output k.
CMatrix classical_mixture(const Recipe &r) {
    const CMatrix u = testutil::tritter_literal();
    CMatrix rho(8, 8);
    double total = 0.0;
    std::array<std::size_t, 3> sigma{0, 1, 2};
    do {
        double w = 1.0;
        for (std::size_t j = 0; j < 3; ++j) {
            w *= std::norm(u(j, sigma[j]));
        }
        std::array<std::size_t, 3> inv{};
        for (std::size_t j = 0; j < 3; ++j) {
            inv[sigma[j]] = j;
        }
        CVector psi(8);
        for (std::size_t idx = 0; idx < 8; ++idx) {
            psi[idx] = r.inputs[inv[0]][(idx >> 2) & 1u] * r.inputs[inv[1]][(idx >> 1) & 1u] *
                       r.inputs[inv[2]][idx & 1u];
        }
        CMatrix term = CMatrix::projector(psi);
        term *= w;
        rho = rho + term;
        total += w;
    } while (std::next_permutation(sigma.begin(), sigma.end()));
    rho *= 1.0 / total;
    return rho;
}

Outcome criterion9() {
    Outcome o;
    const auto u = fourier_unitary(3);
    std::string summary;
    for (StateKind k : {StateKind::W, StateKind::Gprime, StateKind::GHZprime}) {
        const Recipe r = recipe(k);
        const std::string name(to_string(k));
        double prev = 2.0;
        summary += name + " F=";
        for (double x2 : {1.0, 0.956, 0.85, 0.5}) {
            NoiseConfig noise;
            noise.gram = uniform_gram(3, std::sqrt(x2));
            const double f = fidelity(generate_state(u, r, noise).rho, canonical_state(k));
            if (x2 == 1.0) {
                o.require(std::abs(f - 1.0) <= 1e-10, name + " fidelity at full overlap " + fmt("%.15f", f));
            }
            o.require(f < prev, name + " fidelity not decreasing at overlap^2 " + fmt("%.3f", x2));
            prev = f;
            summary += fmt("%.4f", f) + ",";
        }
        NoiseConfig orthogonal;
        orthogonal.gram = CMatrix::identity(3);
        const CMatrix rho = generate_state(u, r, orthogonal).rho;
        const double coherence = max_abs_diff(rho, classical_mixture(r));
        o.require(coherence < 1e-10, name + " residual interference coherence " + fmt("%.2e", coherence));
        if (k == StateKind::W) {
            double off = 0.0;
            for (std::size_t i = 0; i < 8; ++i) {
                for (std::size_t j = 0; j < 8; ++j) {
                    off = i == j ? off : std::max(off, std::abs(rho(i, j)));
                }
            }
            o.require(off < 1e-10, "W off-diagonal " + fmt("%.2e", off));
        }
        summary += " orth-dev=" + fmt("%.1e", coherence) + " ";
    }
    if (o.pass) {
        o.detail = summary;
    }
    return o;
}

Outcome criterion10() {
    Outcome o;
    const auto u = fourier_unitary(3);
    NoiseConfig noise;
    noise.gram = uniform_gram(3, std::sqrt(0.956));
    const CMatrix base = generate_state(u, recipe(StateKind::W), noise).rho;
    const StateVector w = canonical_state(StateKind::W);
    double best_lambda = -1.0;
    double best_f = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double lambda = i * 1e-4;
        const double f = fidelity(depolarize(base, lambda), w);
        if (std::abs(f - 0.873) <= 0.05 && (best_lambda < 0.0 || std::abs(f - 0.873) < std::abs(best_f - 0.873))) {
            best_lambda = lambda;
            best_f = f;
        }
    }
    o.require(best_lambda >= 0.0, "no lambda in [0, 0.1] reaches F_W within 0.05 of 0.873");
    if (o.pass) {
        o.detail = "F_W(lambda=0)=" + fmt("%.4f", fidelity(base, w)) + "; closest at lambda=" +
                   fmt("%.4f", best_lambda) + " F_W=" + fmt("%.4f", best_f) +
                   " (substituted check; measured hardware fidelities not reproducible)";
    }
    return o;
}

}  // namespace

int main() {
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"W state from H,H,V", criterion1},
        {"G' and GHZ' recipes", criterion2},
        {"two-port singlet", criterion3},
        {"pair coincidence sweep", criterion4},
        {"Sinkhorn and insertion loss", criterion5},
        {"local transforms", criterion6},
        {"witness calls", criterion7},
        {"tomography round trip", criterion8},
        {"distinguishability suite", criterion9},
        {"noise model spans measured regime", criterion10},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception &e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s [%zu] %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first, o.detail.c_str());
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
