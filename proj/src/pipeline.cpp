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

#include "tritter/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tritter/error.hpp"
#include "tritter/kernels.hpp"

namespace tritter {

namespace {

using ojson = nlohmann::ordered_json;

[[noreturn]] void field_error(const std::string &field, const std::string &what) {
    throw Error(ErrorCode::Validation, field + ": " + what);
}

template <typename T>
T get_field(const ojson &j, const std::string &key, const std::string &path, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) {
        return fallback;
    }
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception &) {
        field_error(path + key, "has the wrong type");
    }
}

std::string rational_string(const Rational &r) { return std::to_string(r.num) + "/" + std::to_string(r.den); }

ojson pol_json(const PolarizationAmplitudes &p) { return to_json(std::span<const cplx>(p.data(), p.size())); }

ojson postselection_json(const PostSelectionResult &r) {
    ojson j;
    j["probability"] = r.probability;
    j["defined"] = r.defined;
    j["rho"] = to_json(r.rho);
    return j;
}

}  // namespace

void ExperimentConfig::validate() const {
    if (state != StateKind::W && state != StateKind::Gprime && state != StateKind::GHZprime) {
        field_error("state", "no tritter recipe for '" + std::string(to_string(state)) + "'");
    }
    if (interferometer.kind == InterferometerSource::Kind::IdealFourier && interferometer.ports != 3) {
        field_error("interferometer.ports", "recipes need a 3-port device");
    }
    if (interferometer.kind == InterferometerSource::Kind::MagnitudesCsv && interferometer.csv_path.empty()) {
        field_error("interferometer.path", "magnitudes source needs a CSV path");
    }
    if (noise.gram) {
        const CMatrix &g = *noise.gram;
        if (g.rows() != 3 || g.cols() != 3) {
            field_error("noise.gram", "must be 3x3");
        }
        if (!g.all_finite()) {
            field_error("noise.gram", "has non-finite entries");
        }
        try {
            spectral_vectors_from_gram(g);
        } catch (const Error &e) {
            field_error("noise.gram", e.what());
        }
    }
    if (noise.extinction_ratios) {
        if (noise.extinction_ratios->size() != 3) {
            field_error("noise.extinction_ratios", "needs one ratio per photon");
        }
        for (double r : *noise.extinction_ratios) {
            if (!(r > 1.0) || std::isnan(r)) {
                field_error("noise.extinction_ratios", "ratios must exceed 1");
            }
        }
    }
    if (!(noise.white_noise >= 0.0 && noise.white_noise <= 1.0)) {
        field_error("noise.white_noise", "must lie in [0, 1]");
    }
    if (tomography.enabled) {
        if (tomography.shots == 0) {
            field_error("tomography.shots", "must be positive");
        }
        if (tomography.resamples < 2) {
            field_error("tomography.resamples", "must be at least 2");
        }
    }
}

ExperimentConfig ExperimentConfig::from_json(const ojson &j) {
    if (!j.is_object()) {
        field_error("config", "must be a JSON object");
    }
    ExperimentConfig c;
    const auto state = get_field<std::string>(j, "state", "", "w");
    const auto kind = parse_state_kind(state);
    if (!kind) {
        field_error("state", "unknown state '" + state + "'");
    }
    c.state = *kind;

    if (j.contains("interferometer")) {
        const auto &ij = j.at("interferometer");
        const auto source = get_field<std::string>(ij, "source", "interferometer.", "ideal-fourier");
        if (source == "ideal-fourier") {
            c.interferometer.kind = InterferometerSource::Kind::IdealFourier;
            c.interferometer.ports = get_field<std::size_t>(ij, "ports", "interferometer.", 3);
        } else if (source == "magnitudes-csv") {
            c.interferometer.kind = InterferometerSource::Kind::MagnitudesCsv;
            c.interferometer.csv_path = get_field<std::string>(ij, "path", "interferometer.", "");
        } else {
            field_error("interferometer.source", "expected 'ideal-fourier' or 'magnitudes-csv'");
        }
    }

    if (j.contains("noise")) {
        const auto &nj = j.at("noise");
        if (nj.contains("gram") && !nj.at("gram").is_null()) {
            try {
                c.noise.gram = matrix_from_json(nj.at("gram"));
            } catch (const Error &e) {
                field_error("noise.gram", e.what());
            }
        }
        if (nj.contains("extinction_ratios") && !nj.at("extinction_ratios").is_null()) {
            c.noise.extinction_ratios =
                get_field<std::vector<double>>(nj, "extinction_ratios", "noise.", std::vector<double>{});
        }
        c.noise.white_noise = get_field<double>(nj, "white_noise", "noise.", 0.0);
    }

    if (j.contains("tomography")) {
        const auto &tj = j.at("tomography");
        c.tomography.enabled = get_field<bool>(tj, "enabled", "tomography.", true);
        c.tomography.shots = get_field<std::uint64_t>(tj, "shots", "tomography.", 10000);
        c.tomography.resamples = get_field<std::size_t>(tj, "resamples", "tomography.", 20);
        c.tomography.seed = get_field<std::uint64_t>(tj, "seed", "tomography.", 1);
    }

    if (j.contains("output")) {
        const auto &oj = j.at("output");
        c.output.report = get_field<std::string>(oj, "report", "output.", "");
        c.output.counts_csv = get_field<std::string>(oj, "counts_csv", "output.", "");
    }
    c.validate();
    return c;
}

ojson ExperimentConfig::to_json() const {
    ojson j;
    j["state"] = std::string(to_string(state));
    ojson ij;
    if (interferometer.kind == InterferometerSource::Kind::IdealFourier) {
        ij["source"] = "ideal-fourier";
        ij["ports"] = interferometer.ports;
    } else {
        ij["source"] = "magnitudes-csv";
        ij["path"] = interferometer.csv_path;
    }
    j["interferometer"] = ij;
    ojson nj;
    nj["gram"] = noise.gram ? tritter::to_json(*noise.gram) : ojson(nullptr);
    nj["extinction_ratios"] = noise.extinction_ratios ? ojson(*noise.extinction_ratios) : ojson(nullptr);
    nj["white_noise"] = noise.white_noise;
    j["noise"] = nj;
    ojson tj;
    tj["enabled"] = tomography.enabled;
    tj["shots"] = tomography.shots;
    tj["resamples"] = tomography.resamples;
    tj["seed"] = tomography.seed;
    j["tomography"] = tj;
    ojson oj;
    oj["report"] = output.report;
    oj["counts_csv"] = output.counts_csv;
    j["output"] = oj;
    return j;
}

CMatrix uniform_gram(std::size_t n, double overlap) {
    CMatrix g(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            g(i, k) = i == k ? 1.0 : overlap;
        }
    }
    return g;
}

PolarizationAmplitudes apply_extinction(const PolarizationAmplitudes &pol, double ratio) {
    if (!(ratio > 1.0)) {
        throw Error(ErrorCode::Validation, "extinction ratio must exceed 1");
    }
    const double keep = std::sqrt(ratio / (1.0 + ratio));
    const double leak = std::sqrt(1.0 / (1.0 + ratio));
    const PolarizationAmplitudes orth{-std::conj(pol[1]), std::conj(pol[0])};
    return {keep * pol[0] + leak * orth[0], keep * pol[1] + leak * orth[1]};
}

CMatrix depolarize(const CMatrix &rho, double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) {
        throw Error(ErrorCode::Validation, "white-noise weight must lie in [0, 1]");
    }
    return rho * (1.0 - lambda) + maximally_mixed(rho.rows()) * lambda;
}

Interferometer build_interferometer(const InterferometerSource &source) {
    if (source.kind == InterferometerSource::Kind::IdealFourier) {
        return fourier_unitary(source.ports);
    }
    const CalibrationReport cal = run_calibrate(source.csv_path);
    const Interferometer ideal = fourier_unitary(cal.table.ports());
    CMatrix m(ideal.dim(), ideal.dim());
    for (std::size_t r = 0; r < ideal.dim(); ++r) {
        for (std::size_t c = 0; c < ideal.dim(); ++c) {
            const cplx phase = ideal(r, c) / std::abs(ideal(r, c));
            m(r, c) = cal.sinkhorn.magnitudes(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) * phase;
        }
    }
    return Interferometer::nearest_unitary(m);
}

PostSelectionResult generate_state(const Interferometer &u, const Recipe &recipe, const NoiseConfig &noise) {
    auto pols = recipe.inputs;
    if (noise.extinction_ratios) {
        for (std::size_t j = 0; j < pols.size(); ++j) {
            pols[j] = apply_extinction(pols[j], noise.extinction_ratios->at(j));
        }
    }
    const CMatrix gram = noise.gram ? *noise.gram : uniform_gram(pols.size(), 1.0);
    const auto spectra = spectral_vectors_from_gram(gram);
    const InputConfiguration in = make_input(pols, spectra);
    OccupationPattern coincidence{std::vector<unsigned>(u.dim(), 1)};
    PostSelectionResult result = postselect_coincidence(u, in, coincidence);
    if (result.defined && noise.white_noise > 0.0) {
        result.rho = depolarize(result.rho, noise.white_noise);
    }
    return result;
}

bool RunReport::oracles_ok() const {
    return std::all_of(oracle_checks.begin(), oracle_checks.end(), [](const OracleCheck &c) { return c.ok; });
}

RunReport run_generate(const ExperimentConfig &config, CountsTable *counts_out) {
    config.validate();
    RunReport report;
    report.config = config;
    report.recipe = recipe(config.state);
    report.interferometer = build_interferometer(config.interferometer);
    const StateVector target = canonical_state(config.state);

    report.ideal = postselect_coincidence(fourier_unitary(3), recipe_input(report.recipe),
                                          OccupationPattern{{1, 1, 1}});
    report.noisy = generate_state(report.interferometer, report.recipe, config.noise);
    if (!report.noisy.defined) {
        throw Error(ErrorCode::Convergence, "post-selection probability is zero under the configured noise");
    }
    report.noisy_fidelity = fidelity(report.noisy.rho, target);
    report.noisy_purity = purity(report.noisy.rho);
    report.noisy_witness = witness_report(report.noisy.rho, config.state);

    const double ideal_fid = report.ideal.defined ? fidelity(report.ideal.rho, target) : 0.0;
    report.oracle_checks.push_back({"ideal_probability", report.recipe.expected_probability.value(),
                                    report.ideal.probability, 1e-12,
                                    std::abs(report.ideal.probability - report.recipe.expected_probability.value()) <=
                                        1e-12});
    report.oracle_checks.push_back({"ideal_fidelity", 1.0, ideal_fid, 1e-10, ideal_fid > 1.0 - 1e-10});
    const DensityCheck dc = check_density(report.noisy.rho);
    report.oracle_checks.push_back({"noisy_state_is_density_matrix", 0.0,
                                    std::max({dc.hermiticity, dc.trace_error, -dc.min_eigenvalue}), kDensityTol,
                                    dc.ok(kDensityTol)});

    if (config.tomography.enabled) {
        const auto settings = measurement_settings(3);
        CountsTable counts = simulate_counts(report.noisy.rho, settings, config.tomography.shots,
                                             config.tomography.seed);
        TomographySummary t;
        t.reconstruction = reconstruct_mle(counts);
        t.fidelity = fidelity(t.reconstruction.rho, target);
        t.purity = purity(t.reconstruction.rho);
        // Resampling streams are offset from the counting stream.
        const std::uint64_t mc_seed = config.tomography.seed + 0x9E3779B97F4A7C15ull;
        t.fidelity_mc = monte_carlo_uncertainty(counts, config.tomography.resamples, Functional::fidelity_to(target),
                                                mc_seed);
        t.purity_mc = monte_carlo_uncertainty(counts, config.tomography.resamples, Functional::purity_of(), mc_seed);
        t.witness = witness_report(t.reconstruction.rho, config.state);
        report.tomography = std::move(t);
        if (counts_out != nullptr) {
            *counts_out = std::move(counts);
        }
    }
    return report;
}

ojson RunReport::to_json() const {
    ojson j;
    j["config"] = config.to_json();
    ojson r;
    r["state"] = std::string(to_string(recipe.kind));
    auto inputs = ojson::array();
    for (const auto &p : recipe.inputs) {
        inputs.push_back(pol_json(p));
    }
    r["inputs"] = inputs;
    r["expected_probability"] = rational_string(recipe.expected_probability);
    j["recipe"] = r;
    ojson ij;
    ij["matrix"] = tritter::to_json(interferometer.matrix());
    ij["unitarity_error"] = unitarity_error(interferometer.matrix());
    j["interferometer"] = ij;
    j["ideal"] = postselection_json(ideal);
    ojson nj = postselection_json(noisy);
    nj["fidelity"] = noisy_fidelity;
    nj["purity"] = noisy_purity;
    nj["witness"] = tritter::to_json(noisy_witness);
    j["noisy"] = nj;
    if (tomography) {
        ojson tj;
        tj["reconstruction"] = tritter::to_json(tomography->reconstruction);
        tj["fidelity"] = tomography->fidelity;
        tj["fidelity_mc"] = tritter::to_json(tomography->fidelity_mc);
        tj["purity"] = tomography->purity;
        tj["purity_mc"] = tritter::to_json(tomography->purity_mc);
        tj["witness"] = tritter::to_json(tomography->witness);
        j["tomography"] = tj;
    } else {
        j["tomography"] = nullptr;
    }
    auto checks = ojson::array();
    for (const auto &c : oracle_checks) {
        ojson cj;
        cj["name"] = c.name;
        cj["expected"] = c.expected;
        cj["actual"] = c.actual;
        cj["tolerance"] = c.tolerance;
        cj["ok"] = c.ok;
        checks.push_back(cj);
    }
    j["oracle_checks"] = checks;
    ojson prov;
    prov["version"] = kVersion;
    prov["seed"] = config.tomography.seed;
    prov["kernels"] = std::string(kernels::isa_name(kernels::active_table().isa));
    j["provenance"] = prov;
    return j;
}

CalibrationReport run_calibrate(const IntensityTable &table) {
    CalibrationReport report;
    report.table = table;
    report.sinkhorn = sinkhorn_magnitudes(table);
    for (Eigen::Index r = 0; r < table.percent.rows(); ++r) {
        std::vector<double> row;
        for (Eigen::Index c = 0; c < table.percent.cols(); ++c) {
            row.push_back(table.percent(r, c));
        }
        report.insertion_loss_db.push_back(insertion_loss_db(row));
    }
    return report;
}

CalibrationReport run_calibrate(const std::string &csv_path) {
    std::ifstream in(csv_path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + csv_path + "'");
    }
    return run_calibrate(read_intensity_csv(in));
}

ojson CalibrationReport::to_json() const {
    ojson j;
    auto table_json = ojson::array();
    for (Eigen::Index r = 0; r < table.percent.rows(); ++r) {
        auto row = ojson::array();
        for (Eigen::Index c = 0; c < table.percent.cols(); ++c) {
            row.push_back(table.percent(r, c));
        }
        table_json.push_back(row);
    }
    j["splitting_percent"] = table_json;
    j["sinkhorn"] = tritter::to_json(sinkhorn);
    auto losses = ojson::array();
    for (std::size_t r = 0; r < insertion_loss_db.size(); ++r) {
        ojson lj;
        lj["computed_db"] = insertion_loss_db[r];
        if (r < table.loss_db.size() && table.loss_db[r]) {
            lj["measured_db"] = *table.loss_db[r];
            lj["difference_db"] = insertion_loss_db[r] - *table.loss_db[r];
        } else {
            lj["measured_db"] = nullptr;
            lj["difference_db"] = nullptr;
        }
        losses.push_back(lj);
    }
    j["insertion_loss"] = losses;
    return j;
}

void HomConfig::validate() const {
    if (!(setup.rate > 0.0) || !std::isfinite(setup.rate)) {
        field_error("rate", "must be positive");
    }
    if (!(setup.coherence > 0.0)) {
        field_error("coherence", "must be positive");
    }
    if (!(setup.peak_overlap_sq >= 0.0 && setup.peak_overlap_sq <= 1.0)) {
        field_error("overlap", "overlap^2 must lie in [0, 1]");
    }
    if (points < 5) {
        field_error("points", "need at least 5 delays");
    }
    if (!(delay_max > delay_min)) {
        field_error("delay_max", "must exceed delay_min");
    }
    if (setup.ports.first == setup.ports.second || setup.ports.first > 2 || setup.ports.second > 2) {
        field_error("ports", "need two distinct tritter input ports");
    }
    if (setup.outs.first == setup.outs.second || setup.outs.first > 2 || setup.outs.second > 2) {
        field_error("outs", "need two distinct tritter output ports");
    }
}

ojson HomConfig::to_json() const {
    ojson j;
    j["overlap_sq"] = setup.peak_overlap_sq;
    j["rate"] = setup.rate;
    j["coherence"] = setup.coherence;
    j["delay_min"] = delay_min;
    j["delay_max"] = delay_max;
    j["points"] = points;
    j["ports"] = {setup.ports.first + 1, setup.ports.second + 1};
    j["outs"] = {setup.outs.first + 1, setup.outs.second + 1};
    j["seed"] = setup.seed;
    return j;
}

HomReport run_hom(const HomConfig &config) {
    config.validate();
    HomReport report;
    report.config = config;
    const auto grid = delay_grid(config.delay_min, config.delay_max, config.points);
    report.scan = hom_scan(fourier_unitary(3), grid, config.setup);
    report.fit = fit_gaussian(report.scan);
    report.visibility_fit = report.fit.visibility();
    const auto [lo, hi] = std::minmax_element(report.scan.counts.begin(), report.scan.counts.end());
    report.visibility_counts = visibility(*hi, *lo);
    report.visibility_expected = visibility(report.scan.ceiling_rate, report.scan.floor_rate);
    return report;
}

ojson HomReport::to_json() const {
    ojson j;
    j["config"] = config.to_json();
    j["fit"] = tritter::to_json(fit);
    j["visibility_fit"] = visibility_fit;
    j["visibility_counts"] = visibility_counts;
    j["visibility_expected"] = visibility_expected;
    j["floor_rate"] = scan.floor_rate;
    j["ceiling_rate"] = scan.ceiling_rate;
    return j;
}

TomoReport run_tomo(const CountsTable &counts, std::optional<StateKind> target, std::size_t resamples,
                    std::uint64_t seed) {
    TomoReport report;
    report.counts = counts;
    report.target = target;
    report.reconstruction = reconstruct_mle(counts);
    if (target) {
        report.fidelity_mc =
            monte_carlo_uncertainty(counts, resamples, Functional::fidelity_to(canonical_state(*target)), seed);
    }
    report.purity_mc = monte_carlo_uncertainty(counts, resamples, Functional::purity_of(), seed);
    return report;
}

ojson TomoReport::to_json() const {
    ojson j;
    j["reconstruction"] = tritter::to_json(reconstruction);
    j["purity"] = purity(reconstruction.rho);
    j["purity_mc"] = tritter::to_json(purity_mc);
    if (target) {
        const StateVector psi = canonical_state(*target);
        j["target"] = std::string(to_string(*target));
        j["fidelity"] = fidelity(reconstruction.rho, psi);
        j["fidelity_mc"] = tritter::to_json(*fidelity_mc);
        if (counts.qubits == 3) {
            j["witness"] = tritter::to_json(witness_report(reconstruction.rho, *target));
        }
    } else {
        j["target"] = nullptr;
    }
    return j;
}

}  // namespace tritter
