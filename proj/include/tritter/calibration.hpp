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

#include <Eigen/Core>
#include <cstdint>
#include <istream>
#include <optional>
#include <ostream>
#include <utility>
#include <vector>

#include "json.hpp"
#include "tritter/interference.hpp"

/// Interferometer characterisation: transfer-matrix magnitudes from classical
/// splitting ratios, insertion loss, and two-photon interference dips.
namespace tritter {

/// Percent of input-k power arriving at output j (row = input), with an
/// optional measured insertion loss per input (`loss_db` may be left empty).
struct IntensityTable {
    Eigen::MatrixXd percent;
    std::vector<std::optional<double>> loss_db;

    std::size_t ports() const { return static_cast<std::size_t>(percent.rows()); }
    /// Entries non-negative and finite, rows summing to at most 100.
    void validate() const;
};

/// Reads 3 data rows of 3 or 4 numeric columns (outputs, then optional loss
/// in dB). A header row and a leading non-numeric label column are accepted.
IntensityTable read_intensity_csv(std::istream &in);

inline constexpr double kSinkhornTol = 1e-9;
inline constexpr std::size_t kSinkhornMaxIter = 10000;

struct SinkhornResult {
    Eigen::MatrixXd doubly_stochastic;  // row-normalised power fractions after scaling
    Eigen::MatrixXd magnitudes;         // element-wise sqrt; 1/sqrt(N) for a balanced device
    std::size_t iterations = 0;
    double residual = 0.0;  // max |row or column sum - 1|

    /// magnitudes * sqrt(N), i.e. the coefficients multiplying 1/sqrt(N).
    Eigen::MatrixXd normalized() const;
};

/// Alternating row/column scaling of the row-normalised fractions.
/// Zero entries are ErrorCode::CannotScale; running out of iterations is
/// ErrorCode::Convergence.
SinkhornResult sinkhorn_magnitudes(const IntensityTable &t, double tol = kSinkhornTol,
                                   std::size_t max_iter = kSinkhornMaxIter);

/// -10 log10(sum / 100); +infinity when nothing is transmitted.
double insertion_loss_db(std::span<const double> percents);

/// (n_max - n_min) / n_max
double visibility(double n_max, double n_min);

struct DipScan {
    std::vector<double> delays;
    std::vector<double> counts;
    std::vector<double> expected;  // noiseless rate * probability; empty when read from data
    double coherence = 0.0;
    double peak_overlap_sq = 1.0;
    double rate = 0.0;
    double floor_rate = 0.0;    // expected counts at zero delay
    double ceiling_rate = 0.0;  // expected counts for fully distinguishable photons

    void validate() const;
};

struct HomSetup {
    std::pair<std::size_t, std::size_t> ports{0, 1};
    std::pair<std::size_t, std::size_t> outs{0, 1};
    double coherence = 1.0;
    double rate = 1e4;
    /// |<psi_j|psi_k>|^2 at zero delay.
    double peak_overlap_sq = 1.0;
    std::uint64_t seed = 0;
};

/// Spectral overlap exp(-delay^2 / (2 coherence^2)) * sqrt(peak_overlap_sq) at each
/// delay, pair-coincidence probability through `u`, Poisson counts around
/// rate * probability.
DipScan hom_scan(const Interferometer &u, std::span<const double> delays, const HomSetup &setup);

/// Evenly spaced grid of `points` delays on [lo, hi].
std::vector<double> delay_grid(double lo, double hi, std::size_t points);

struct GaussianFit {
    double amplitude = 0.0;
    double center = 0.0;
    double width = 0.0;
    double offset = 0.0;
    double residual_norm = 0.0;
    std::size_t iterations = 0;
    bool converged = false;

    double visibility() const { return amplitude / offset; }
    double operator()(double delay) const;
};

/// Levenberg-Marquardt fit of offset - amplitude * exp(-(d - center)^2 / (2 width^2)).
GaussianFit fit_gaussian(const DipScan &scan);

void write_dip_csv(std::ostream &out, const DipScan &scan);
DipScan read_dip_csv(std::istream &in);

nlohmann::ordered_json to_json(const GaussianFit &fit);
nlohmann::ordered_json to_json(const SinkhornResult &s);

}  // namespace tritter
