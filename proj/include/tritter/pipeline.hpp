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
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tritter/calibration.hpp"
#include "tritter/interference.hpp"
#include "tritter/states.hpp"
#include "tritter/tomography.hpp"

/// Config-driven runs that chain generation, noise, tomography and witnesses.
namespace tritter {

inline constexpr const char *kVersion = "0.1.0";

struct InterferometerSource {
    enum class Kind { IdealFourier, MagnitudesCsv };
    Kind kind = Kind::IdealFourier;
    std::size_t ports = 3;
    std::string csv_path;  // for MagnitudesCsv
};

struct NoiseConfig {
    /// Pairwise spectral overlaps <s_j|s_k>; unit diagonal, PSD. Absent = identical spectra.
    std::optional<CMatrix> gram;
    /// Intended-to-orthogonal power ratio per photon; absent = perfect preparation.
    std::optional<std::vector<double>> extinction_ratios;
    /// rho -> (1 - lambda) rho + lambda I / dim
    double white_noise = 0.0;
};

struct TomographyConfig {
    bool enabled = true;
    std::uint64_t shots = 10000;
    std::size_t resamples = 20;
    std::uint64_t seed = 1;
};

struct OutputPaths {
    std::string report;  // JSON; empty = stdout only
    std::string counts_csv;
};

struct ExperimentConfig {
    StateKind state = StateKind::W;
    InterferometerSource interferometer;
    NoiseConfig noise;
    TomographyConfig tomography;
    OutputPaths output;

    /// Throws ErrorCode::Validation naming the offending field, e.g. "noise.gram".
    void validate() const;
    static ExperimentConfig from_json(const nlohmann::ordered_json &j);
    nlohmann::ordered_json to_json() const;
};

/// Uniform pairwise overlap x between all `n` photons (x^2 is what a HOM dip measures).
CMatrix uniform_gram(std::size_t n, double overlap);

/// Polarisation after imperfect preparation: intended state plus a coherent
/// leak of power 1/(1 + ratio) into the orthogonal polarisation.
PolarizationAmplitudes apply_extinction(const PolarizationAmplitudes &pol, double ratio);

/// (1 - lambda) rho + lambda I / dim
CMatrix depolarize(const CMatrix &rho, double lambda);

/// Interferometer described by a config. Measured magnitudes are combined with
/// the ideal Fourier phases and projected to the nearest unitary.
Interferometer build_interferometer(const InterferometerSource &source);

/// Post-selected state for a recipe under the noise block, before tomography.
PostSelectionResult generate_state(const Interferometer &u, const Recipe &recipe, const NoiseConfig &noise);

struct OracleCheck {
    std::string name;
    double expected = 0.0;
    double actual = 0.0;
    double tolerance = 0.0;
    bool ok = false;
};

struct TomographySummary {
    ReconstructionResult reconstruction;
    double fidelity = 0.0;
    double purity = 0.0;
    UncertaintyEstimate fidelity_mc;
    UncertaintyEstimate purity_mc;
    WitnessReport witness;
};

struct RunReport {
    ExperimentConfig config;
    Recipe recipe;
    Interferometer interferometer = fourier_unitary(3);
    PostSelectionResult ideal;
    PostSelectionResult noisy;
    double noisy_fidelity = 0.0;
    double noisy_purity = 0.0;
    WitnessReport noisy_witness;
    std::optional<TomographySummary> tomography;
    std::vector<OracleCheck> oracle_checks;

    bool oracles_ok() const;
    nlohmann::ordered_json to_json() const;
};

/// Counts are also returned so callers can write them out.
RunReport run_generate(const ExperimentConfig &config, CountsTable *counts_out = nullptr);

struct CalibrationReport {
    IntensityTable table;
    SinkhornResult sinkhorn;
    std::vector<double> insertion_loss_db;

    nlohmann::ordered_json to_json() const;
};

CalibrationReport run_calibrate(const std::string &csv_path);
CalibrationReport run_calibrate(const IntensityTable &table);

struct HomConfig {
    HomSetup setup;
    double delay_min = -4.0;
    double delay_max = 4.0;
    std::size_t points = 81;

    void validate() const;
    nlohmann::ordered_json to_json() const;
};

struct HomReport {
    HomConfig config;
    DipScan scan;
    GaussianFit fit;
    double visibility_fit = 0.0;
    double visibility_counts = 0.0;    // (N_max - N_min) / N_max on raw counts
    double visibility_expected = 0.0;  // from the noiseless floor and ceiling

    nlohmann::ordered_json to_json() const;
};

HomReport run_hom(const HomConfig &config);

struct TomoReport {
    CountsTable counts;
    ReconstructionResult reconstruction;
    std::optional<StateKind> target;
    std::optional<UncertaintyEstimate> fidelity_mc;
    UncertaintyEstimate purity_mc;

    nlohmann::ordered_json to_json() const;
};

TomoReport run_tomo(const CountsTable &counts, std::optional<StateKind> target, std::size_t resamples,
                    std::uint64_t seed);

}  // namespace tritter
