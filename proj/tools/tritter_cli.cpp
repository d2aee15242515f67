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

// Command-line front end: generate, calibrate, hom, tomo, report.
//
// Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "tritter/error.hpp"
#include "tritter/pipeline.hpp"

namespace {

using tritter::Error;
using tritter::ErrorCode;
using ojson = nlohmann::ordered_json;

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

void emit_json(const ojson &j, const std::string &path) {
    const std::string text = j.dump(2) + "\n";
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    }
    out << text;
}

template <typename Fn>
void write_file(const std::string &path, Fn &&fn) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(ErrorCode::Io, "cannot write '" + path + "'");
    }
    fn(out);
}

ojson read_json_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::Io, "cannot open '" + path + "'");
    }
    try {
        return ojson::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw Error(ErrorCode::Parse, path + ": " + e.what());
    }
}

tritter::StateKind state_or_throw(const std::string &name) {
    const auto kind = tritter::parse_state_kind(name);
    if (!kind) {
        throw Error(ErrorCode::Validation, "state: unknown state '" + name + "'");
    }
    return *kind;
}

struct GenerateArgs {
    std::string config;
    std::string state;
    std::optional<std::uint64_t> shots;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> resamples;
    std::optional<double> white_noise;
    std::optional<double> overlap_sq;
    std::optional<double> extinction;
    std::string interferometer_csv;
    std::string out;
    std::string counts_csv;
    bool no_tomography = false;
};

int run_generate_cmd(const GenerateArgs &a) {
    tritter::ExperimentConfig config;
    if (!a.config.empty()) {
        config = tritter::ExperimentConfig::from_json(read_json_file(a.config));
    }
    if (!a.state.empty()) {
        config.state = state_or_throw(a.state);
    }
    if (a.shots) {
        config.tomography.shots = *a.shots;
    }
    if (a.seed) {
        config.tomography.seed = *a.seed;
    }
    if (a.resamples) {
        config.tomography.resamples = *a.resamples;
    }
    if (a.white_noise) {
        config.noise.white_noise = *a.white_noise;
    }
    if (a.overlap_sq) {
        if (!(*a.overlap_sq >= 0.0 && *a.overlap_sq <= 1.0)) {
            throw Error(ErrorCode::Validation, "noise.gram: --overlap must lie in [0, 1]");
        }
        config.noise.gram = tritter::uniform_gram(3, std::sqrt(*a.overlap_sq));
    }
    if (a.extinction) {
        config.noise.extinction_ratios = std::vector<double>(3, *a.extinction);
    }
    if (!a.interferometer_csv.empty()) {
        config.interferometer.kind = tritter::InterferometerSource::Kind::MagnitudesCsv;
        config.interferometer.csv_path = a.interferometer_csv;
    }
    if (!a.out.empty()) {
        config.output.report = a.out;
    }
    if (!a.counts_csv.empty()) {
        config.output.counts_csv = a.counts_csv;
    }
    if (a.no_tomography) {
        config.tomography.enabled = false;
    }
    config.validate();

    tritter::CountsTable counts;
    const tritter::RunReport report = tritter::run_generate(config, &counts);
    emit_json(report.to_json(), config.output.report);
    if (!config.output.counts_csv.empty() && report.tomography) {
        write_file(config.output.counts_csv, [&](std::ostream &out) { tritter::write_counts_csv(out, counts); });
    }
    if (!report.oracles_ok()) {
        std::cerr << "oracle check failed; see oracle_checks in the report\n";
        return kExitNumerical;
    }
    return 0;
}

struct HomArgs {
    tritter::HomConfig config;
    std::vector<std::size_t> ports{1, 2};
    std::vector<std::size_t> outs{1, 2};
    std::string scan_out;
    std::string fit_out;
};

int run_hom_cmd(HomArgs a) {
    if (a.ports.size() != 2 || a.outs.size() != 2 || a.ports[0] == 0 || a.ports[1] == 0 || a.outs[0] == 0 ||
        a.outs[1] == 0) {
        throw Error(ErrorCode::Validation, "ports/outs: give two 1-based indices each");
    }
    a.config.setup.ports = {a.ports[0] - 1, a.ports[1] - 1};
    a.config.setup.outs = {a.outs[0] - 1, a.outs[1] - 1};
    const tritter::HomReport report = tritter::run_hom(a.config);
    if (!a.scan_out.empty()) {
        write_file(a.scan_out, [&](std::ostream &out) { tritter::write_dip_csv(out, report.scan); });
    }
    emit_json(report.to_json(), a.fit_out);
    return 0;
}

struct TomoArgs {
    std::string counts;
    std::string state;
    std::string target;
    std::uint64_t shots = 10000;
    std::uint64_t seed = 1;
    std::size_t resamples = 20;
    std::string out;
    std::string counts_out;
};

int run_tomo_cmd(const TomoArgs &a) {
    tritter::CountsTable counts;
    std::optional<tritter::StateKind> target;
    if (!a.target.empty()) {
        target = state_or_throw(a.target);
    }
    if (!a.counts.empty()) {
        std::ifstream in(a.counts);
        if (!in) {
            throw Error(ErrorCode::Io, "cannot open '" + a.counts + "'");
        }
        counts = tritter::read_counts_csv(in);
    } else {
        if (a.state.empty()) {
            throw Error(ErrorCode::Validation, "tomo: give --counts or --state");
        }
        const auto kind = state_or_throw(a.state);
        const auto psi = tritter::canonical_state(kind);
        counts = tritter::simulate_counts(tritter::CMatrix::projector(psi.amplitudes),
                                          tritter::measurement_settings(psi.qubits()), a.shots, a.seed);
        if (!target) {
            target = kind;
        }
    }
    if (!a.counts_out.empty()) {
        write_file(a.counts_out, [&](std::ostream &out) { tritter::write_counts_csv(out, counts); });
    }
    const auto report = tritter::run_tomo(counts, target, a.resamples, a.seed + 1);
    emit_json(report.to_json(), a.out);
    return 0;
}

void print_witness(std::string label, const tritter::WitnessReport &w) {
    label.resize(5, ' ');
    std::cout << label << " w_witness          " << (w.w_witness ? "pass" : "fail") << "  (F_W = " << w.fidelity_w
              << ")\n";
    std::cout << label << " genuine_tripartite " << (w.genuine_tripartite ? "pass" : "fail") << "  (GHZ overlap "
              << w.ghz_overlap << ")\n";
    std::cout << label << " ghz_class          " << (w.ghz_class ? "pass" : "fail") << "\n";
}

int run_report_cmd(const std::string &input) {
    const ojson j = read_json_file(input);
    if (!j.contains("tomography") || !j.contains("noisy")) {
        throw Error(ErrorCode::Validation, input + ": not a generate report");
    }
    const auto kind = state_or_throw(j.at("config").at("state").get<std::string>());
    std::cout << "state            " << tritter::to_string(kind) << "\n";
    std::cout << "probability      " << j.at("noisy").at("probability").get<double>() << "  (ideal "
              << j.at("ideal").at("probability").get<double>() << ")\n";
    std::cout << "exact fidelity   " << j.at("noisy").at("fidelity").get<double>() << "\n";
    std::cout << "exact purity     " << j.at("noisy").at("purity").get<double>() << "\n";
    // Verdicts are recomputed from the stored density matrices.
    print_witness("exact", tritter::witness_report(tritter::matrix_from_json(j.at("noisy").at("rho")), kind));
    const auto &t = j.at("tomography");
    if (!t.is_null()) {
        std::cout << "tomo fidelity    " << t.at("fidelity").get<double>() << " +- "
                  << t.at("fidelity_mc").at("std").get<double>() << "\n";
        std::cout << "tomo purity      " << t.at("purity").get<double>() << " +- "
                  << t.at("purity_mc").at("std").get<double>() << "\n";
        print_witness("tomo", tritter::witness_report(tritter::matrix_from_json(t.at("reconstruction").at("rho")), kind));
    }
    bool ok = true;
    for (const auto &c : j.at("oracle_checks")) {
        ok = ok && c.at("ok").get<bool>();
    }
    std::cout << "oracle checks    " << (ok ? "ok" : "FAILED") << "\n";
    return ok ? 0 : kExitNumerical;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"Multiport beam-splitter entanglement simulator"};
    app.require_subcommand(1);

    GenerateArgs gen;
    auto *generate = app.add_subcommand("generate", "Simulate post-selected state generation with tomography");
    generate->add_option("--config", gen.config, "JSON experiment config");
    generate->add_option("--state", gen.state, "w | gprime | ghzprime");
    generate->add_option("--shots", gen.shots, "Tomography shots per setting");
    generate->add_option("--seed", gen.seed, "Master seed");
    generate->add_option("--resamples", gen.resamples, "Monte-Carlo resamples");
    generate->add_option("--white-noise", gen.white_noise, "Depolarising weight lambda");
    generate->add_option("--overlap", gen.overlap_sq, "Uniform pairwise spectral overlap^2");
    generate->add_option("--extinction", gen.extinction, "Extinction ratio applied to every photon");
    generate->add_option("--interferometer-csv", gen.interferometer_csv, "Splitting-ratio CSV for the device");
    generate->add_option("--out", gen.out, "Report path (default stdout)");
    generate->add_option("--counts-csv", gen.counts_csv, "Write simulated tomography counts");
    generate->add_flag("--no-tomography", gen.no_tomography, "Skip simulated tomography");

    std::string cal_input;
    std::string cal_out;
    auto *calibrate = app.add_subcommand("calibrate", "Transfer-matrix magnitudes from splitting ratios");
    calibrate->add_option("--input", cal_input, "Splitting-ratio CSV")->required();
    calibrate->add_option("--out", cal_out, "Report path (default stdout)");

    HomArgs hom;
    auto *hom_cmd = app.add_subcommand("hom", "Simulate and fit a two-photon interference dip");
    hom_cmd->add_option("--overlap", hom.config.setup.peak_overlap_sq, "Spectral overlap^2 at zero delay");
    hom_cmd->add_option("--rate", hom.config.setup.rate, "Counts scale per point");
    hom_cmd->add_option("--coherence", hom.config.setup.coherence, "Coherence scale of the delay");
    hom_cmd->add_option("--delay-min", hom.config.delay_min, "First delay of the scan");
    hom_cmd->add_option("--delay-max", hom.config.delay_max, "Last delay of the scan");
    hom_cmd->add_option("--points", hom.config.points, "Number of delay points");
    hom_cmd->add_option("--seed", hom.config.setup.seed, "Poisson sampling seed");
    hom_cmd->add_option("--ports", hom.ports, "Two 1-based input ports")->expected(2);
    hom_cmd->add_option("--outs", hom.outs, "Two 1-based output ports")->expected(2);
    hom_cmd->add_option("--scan-out", hom.scan_out, "Dip scan CSV");
    hom_cmd->add_option("--out", hom.fit_out, "Fit report path (default stdout)");

    TomoArgs tomo;
    auto *tomo_cmd = app.add_subcommand("tomo", "Reconstruct a density matrix from Pauli counts");
    tomo_cmd->add_option("--counts", tomo.counts, "Counts CSV (setting,outcome,count)");
    tomo_cmd->add_option("--state", tomo.state, "Simulate counts of this canonical state instead");
    tomo_cmd->add_option("--target", tomo.target, "State to report fidelity against");
    tomo_cmd->add_option("--shots", tomo.shots, "Shots per setting when simulating");
    tomo_cmd->add_option("--seed", tomo.seed, "Master seed");
    tomo_cmd->add_option("--resamples", tomo.resamples, "Monte-Carlo resamples");
    tomo_cmd->add_option("--out", tomo.out, "Report path (default stdout)");
    tomo_cmd->add_option("--counts-out", tomo.counts_out, "Write the counts used");

    std::string report_input;
    auto *report = app.add_subcommand("report", "Summarise a generate report");
    report->add_option("--input", report_input, "Report JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitValidation;
    }

    try {
        if (generate->parsed()) {
            return run_generate_cmd(gen);
        }
        if (calibrate->parsed()) {
            emit_json(tritter::run_calibrate(cal_input).to_json(), cal_out);
            return 0;
        }
        if (hom_cmd->parsed()) {
            return run_hom_cmd(hom);
        }
        if (tomo_cmd->parsed()) {
            return run_tomo_cmd(tomo);
        }
        if (report->parsed()) {
            return run_report_cmd(report_input);
        }
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.category() == tritter::ErrorCategory::Validation ? kExitValidation : kExitNumerical;
    } catch (const nlohmann::json::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
