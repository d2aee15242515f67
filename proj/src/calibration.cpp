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

#include "tritter/calibration.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <random>
#include <sstream>

#include "tritter/csv.hpp"
#include "tritter/error.hpp"

namespace tritter {

void IntensityTable::validate() const {
    if (percent.rows() == 0 || percent.rows() != percent.cols()) {
        throw Error(ErrorCode::Validation, "intensity table must be square and non-empty");
    }
    if (!loss_db.empty() && loss_db.size() != static_cast<std::size_t>(percent.rows())) {
        throw Error(ErrorCode::Validation, "intensity table loss column has the wrong length");
    }
    for (Eigen::Index r = 0; r < percent.rows(); ++r) {
        for (Eigen::Index c = 0; c < percent.cols(); ++c) {
            const double v = percent(r, c);
            if (!std::isfinite(v) || v < 0.0) {
                throw Error(ErrorCode::Validation, "intensity table entry (" + std::to_string(r) + ", " +
                                                       std::to_string(c) + ") must be a non-negative number");
            }
        }
        // Rounded data may overshoot by a hair.
        if (percent.row(r).sum() > 100.0 + 1e-6) {
            throw Error(ErrorCode::Validation, "intensity table row " + std::to_string(r) + " sums to more than 100%");
        }
    }
}

IntensityTable read_intensity_csv(std::istream &in) {
    auto rows = csv::read_rows(in);
    if (!rows.empty() && csv::looks_like_header(rows.front())) {
        rows.erase(rows.begin());
    }
    if (rows.size() != 3) {
        throw Error(ErrorCode::Parse, "intensity table needs 3 data rows, found " + std::to_string(rows.size()));
    }
    IntensityTable t;
    t.percent = Eigen::MatrixXd::Zero(3, 3);
    t.loss_db.assign(3, std::nullopt);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        auto fields = rows[r].fields;
        // Five columns can only be label, three outputs and a loss.
        if (fields.size() == 5 || (fields.size() == 4 && !csv::to_number(fields.front()))) {
            fields.erase(fields.begin());
        }
        if (fields.size() != 3 && fields.size() != 4) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(rows[r].line) + ": expected 3 or 4 columns, found " +
                                              std::to_string(fields.size()));
        }
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const auto v = csv::to_number(fields[c]);
            if (!v) {
                throw Error(ErrorCode::Parse, "line " + std::to_string(rows[r].line) + ": '" + fields[c] +
                                                  "' is not a number");
            }
            if (c < 3) {
                t.percent(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = *v;
            } else {
                t.loss_db[r] = *v;
            }
        }
    }
    t.validate();
    return t;
}

Eigen::MatrixXd SinkhornResult::normalized() const {
    return magnitudes * std::sqrt(static_cast<double>(magnitudes.rows()));
}

namespace {

double sinkhorn_residual(const Eigen::MatrixXd &a) {
    const double rows = (a.rowwise().sum().array() - 1.0).abs().maxCoeff();
    const double cols = (a.colwise().sum().array() - 1.0).abs().maxCoeff();
    return std::max(rows, cols);
}

}  // namespace

SinkhornResult sinkhorn_magnitudes(const IntensityTable &t, double tol, std::size_t max_iter) {
    t.validate();
    if (!(tol > 0.0)) {
        throw Error(ErrorCode::Validation, "Sinkhorn tolerance must be positive");
    }
    if ((t.percent.array() <= 0.0).any()) {
        throw Error(ErrorCode::CannotScale, "splitting ratios contain a zero entry; no doubly stochastic scaling");
    }
    Eigen::MatrixXd a = t.percent;
    for (Eigen::Index r = 0; r < a.rows(); ++r) {
        a.row(r) /= a.row(r).sum();
    }
    SinkhornResult result;
    result.residual = sinkhorn_residual(a);
    while (result.residual > tol) {
        if (result.iterations >= max_iter) {
            std::ostringstream msg;
            msg << "Sinkhorn scaling did not converge in " << max_iter << " iterations (residual " << result.residual
                << ")";
            throw Error(ErrorCode::Convergence, msg.str());
        }
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
            a.col(c) /= a.col(c).sum();
        }
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            a.row(r) /= a.row(r).sum();
        }
        ++result.iterations;
        result.residual = sinkhorn_residual(a);
    }
    result.doubly_stochastic = a;
    result.magnitudes = a.array().sqrt().matrix();
    return result;
}

double insertion_loss_db(std::span<const double> percents) {
    double total = 0.0;
    for (double p : percents) {
        if (!(p >= 0.0)) {
            throw Error(ErrorCode::Validation, "intensity fractions must be non-negative");
        }
        total += p;
    }
    if (total == 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    return -10.0 * std::log10(total / 100.0);
}

double visibility(double n_max, double n_min) {
    if (!(n_max > 0.0)) {
        throw Error(ErrorCode::UndefinedVisibility, "visibility needs a positive maximum count");
    }
    if (!(n_min >= 0.0) || n_min > n_max) {
        throw Error(ErrorCode::Validation, "visibility needs 0 <= n_min <= n_max");
    }
    return (n_max - n_min) / n_max;
}

void DipScan::validate() const {
    if (delays.empty()) {
        throw Error(ErrorCode::Validation, "dip scan is empty");
    }
    if (counts.size() != delays.size() || (!expected.empty() && expected.size() != delays.size())) {
        throw Error(ErrorCode::Validation, "dip scan columns differ in length");
    }
    for (std::size_t i = 1; i < delays.size(); ++i) {
        if (!(delays[i] > delays[i - 1])) {
            throw Error(ErrorCode::Validation, "dip scan delays must be strictly increasing");
        }
    }
    for (double c : counts) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
            throw Error(ErrorCode::Validation, "dip scan counts must be non-negative");
        }
    }
}

std::vector<double> delay_grid(double lo, double hi, std::size_t points) {
    if (points < 2 || !(hi > lo)) {
        throw Error(ErrorCode::Validation, "delay grid needs at least 2 points and hi > lo");
    }
    std::vector<double> grid(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    for (std::size_t i = 0; i < points; ++i) {
        grid[i] = lo + step * static_cast<double>(i);
    }
    grid.back() = hi;
    return grid;
}

DipScan hom_scan(const Interferometer &u, std::span<const double> delays, const HomSetup &setup) {
    if (delays.empty()) {
        throw Error(ErrorCode::Validation, "HOM scan needs at least one delay");
    }
    if (!(setup.coherence > 0.0)) {
        throw Error(ErrorCode::Validation, "coherence scale must be positive");
    }
    if (!(setup.rate > 0.0) || !std::isfinite(setup.rate)) {
        throw Error(ErrorCode::Validation, "count rate must be positive");
    }
    if (!(setup.peak_overlap_sq >= 0.0 && setup.peak_overlap_sq <= 1.0)) {
        throw Error(ErrorCode::InvalidOverlap, "peak overlap^2 must lie in [0, 1]");
    }
    DipScan scan;
    scan.delays.assign(delays.begin(), delays.end());
    scan.coherence = setup.coherence;
    scan.peak_overlap_sq = setup.peak_overlap_sq;
    scan.rate = setup.rate;
    const double peak = std::sqrt(setup.peak_overlap_sq);
    auto expected_at = [&](double delay) {
        const double x = peak * std::exp(-delay * delay / (2.0 * setup.coherence * setup.coherence));
        return setup.rate * pair_coincidence_probability(u, setup.ports, setup.outs, x);
    };
    scan.floor_rate = expected_at(0.0);
    scan.ceiling_rate = setup.rate * pair_coincidence_probability(u, setup.ports, setup.outs, 0.0);

    std::mt19937_64 rng(setup.seed);
    scan.expected.reserve(delays.size());
    scan.counts.reserve(delays.size());
    for (double d : delays) {
        const double mean = expected_at(d);
        scan.expected.push_back(mean);
        std::poisson_distribution<long long> poisson(mean);
        scan.counts.push_back(mean > 0.0 ? static_cast<double>(poisson(rng)) : 0.0);
    }
    scan.validate();
    return scan;
}

double GaussianFit::operator()(double delay) const {
    const double z = (delay - center) / width;
    return offset - amplitude * std::exp(-0.5 * z * z);
}

GaussianFit fit_gaussian(const DipScan &scan) {
    scan.validate();
    const auto n = static_cast<Eigen::Index>(scan.delays.size());
    if (n < 5) {
        throw Error(ErrorCode::Fit, "Gaussian fit needs at least 5 points");
    }
    const auto &x = scan.delays;
    const auto &y = scan.counts;
    const auto [min_it, max_it] = std::minmax_element(y.begin(), y.end());
    if (*max_it - *min_it <= 0.0) {
        throw Error(ErrorCode::Fit, "scan has no variation to fit");
    }

    // Moment-style start: offset at the maximum, depth to the minimum, centre at
    // the minimum, width from the half-depth crossing nearest the centre.
    const auto imin = static_cast<std::size_t>(min_it - y.begin());
    const double offset0 = *max_it;
    const double amp0 = *max_it - *min_it;
    const double half = offset0 - 0.5 * amp0;
    double hwhm = 0.0;
    for (std::size_t i = imin; i < y.size(); ++i) {
        if (y[i] >= half) {
            hwhm = x[i] - x[imin];
            break;
        }
    }
    for (std::size_t i = imin + 1; i-- > 0;) {
        if (y[i] >= half) {
            const double left = x[imin] - x[i];
            hwhm = hwhm > 0.0 ? std::min(hwhm, left) : left;
            break;
        }
    }
    if (!(hwhm > 0.0)) {
        hwhm = 0.25 * (x.back() - x.front());
    }

    Eigen::Vector4d p(offset0, amp0, x[imin], hwhm / std::sqrt(2.0 * std::log(2.0)));
    auto residuals = [&](const Eigen::Vector4d &q, Eigen::VectorXd &r, Eigen::MatrixXd *jac) {
        r.resize(n);
        if (jac != nullptr) {
            jac->resize(n, 4);
        }
        for (Eigen::Index i = 0; i < n; ++i) {
            const double dx = x[static_cast<std::size_t>(i)] - q(2);
            const double g = std::exp(-0.5 * dx * dx / (q(3) * q(3)));
            r(i) = q(0) - q(1) * g - y[static_cast<std::size_t>(i)];
            if (jac != nullptr) {
                (*jac)(i, 0) = 1.0;
                (*jac)(i, 1) = -g;
                (*jac)(i, 2) = -q(1) * g * dx / (q(3) * q(3));
                (*jac)(i, 3) = -q(1) * g * dx * dx / (q(3) * q(3) * q(3));
            }
        }
    };

    Eigen::VectorXd r;
    Eigen::MatrixXd jac;
    residuals(p, r, &jac);
    double cost = r.squaredNorm();
    double lambda = 1e-3;
    GaussianFit fit;
    constexpr std::size_t kMaxIter = 500;
    for (fit.iterations = 0; fit.iterations < kMaxIter; ++fit.iterations) {
        const Eigen::Matrix4d jtj = jac.transpose() * jac;
        const Eigen::Vector4d grad = jac.transpose() * r;
        bool stepped = false;
        while (lambda < 1e12) {
            Eigen::Matrix4d damped = jtj;
            damped.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
            const Eigen::Vector4d step = damped.ldlt().solve(-grad);
            const Eigen::Vector4d trial = p + step;
            Eigen::VectorXd r_trial;
            residuals(trial, r_trial, nullptr);
            const double trial_cost = r_trial.squaredNorm();
            if (std::isfinite(trial_cost) && trial_cost <= cost) {
                const double rel = (cost - trial_cost) / std::max(cost, 1e-300);
                const double step_rel = step.norm() / std::max(p.norm(), 1e-300);
                p = trial;
                cost = trial_cost;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (rel < 1e-15 || step_rel < 1e-13) {
                    fit.converged = true;
                }
                break;
            }
            lambda *= 10.0;
        }
        if (!stepped) {
            // No descent direction left: at a minimum to working precision.
            fit.converged = true;
        }
        if (fit.converged) {
            break;
        }
        residuals(p, r, &jac);
    }
    residuals(p, r, nullptr);
    fit.offset = p(0);
    fit.amplitude = p(1);
    fit.center = p(2);
    fit.width = std::abs(p(3));
    fit.residual_norm = r.norm();
    if (!std::isfinite(fit.residual_norm) || !(fit.width > 0.0) || fit.offset < 0.0) {
        throw Error(ErrorCode::Fit, "Gaussian fit diverged (residual norm " + std::to_string(fit.residual_norm) + ")");
    }
    return fit;
}

void write_dip_csv(std::ostream &out, const DipScan &scan) {
    const bool with_expected = !scan.expected.empty();
    out << (with_expected ? "delay,counts,expected\n" : "delay,counts\n");
    out << std::setprecision(17);
    for (std::size_t i = 0; i < scan.delays.size(); ++i) {
        out << scan.delays[i] << ',' << scan.counts[i];
        if (with_expected) {
            out << ',' << scan.expected[i];
        }
        out << '\n';
    }
}

DipScan read_dip_csv(std::istream &in) {
    auto rows = csv::read_rows(in);
    if (!rows.empty() && csv::looks_like_header(rows.front())) {
        rows.erase(rows.begin());
    }
    DipScan scan;
    for (const auto &row : rows) {
        if (row.fields.size() < 2 || row.fields.size() > 3) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(row.line) + ": expected delay,counts[,expected]");
        }
        std::vector<double> values;
        for (const auto &f : row.fields) {
            const auto v = csv::to_number(f);
            if (!v) {
                throw Error(ErrorCode::Parse, "line " + std::to_string(row.line) + ": '" + f + "' is not a number");
            }
            values.push_back(*v);
        }
        scan.delays.push_back(values[0]);
        scan.counts.push_back(values[1]);
        if (values.size() == 3) {
            scan.expected.push_back(values[2]);
        }
    }
    if (!scan.expected.empty() && scan.expected.size() != scan.delays.size()) {
        throw Error(ErrorCode::Parse, "expected column is present on some rows only");
    }
    scan.validate();
    return scan;
}

nlohmann::ordered_json to_json(const GaussianFit &fit) {
    nlohmann::ordered_json j;
    j["offset"] = fit.offset;
    j["amplitude"] = fit.amplitude;
    j["center"] = fit.center;
    j["width"] = fit.width;
    j["visibility"] = fit.visibility();
    j["residual_norm"] = fit.residual_norm;
    j["iterations"] = fit.iterations;
    j["converged"] = fit.converged;
    return j;
}

nlohmann::ordered_json to_json(const SinkhornResult &s) {
    auto matrix = [](const Eigen::MatrixXd &m) {
        auto out = nlohmann::ordered_json::array();
        for (Eigen::Index r = 0; r < m.rows(); ++r) {
            auto row = nlohmann::ordered_json::array();
            for (Eigen::Index c = 0; c < m.cols(); ++c) {
                row.push_back(m(r, c));
            }
            out.push_back(std::move(row));
        }
        return out;
    };
    nlohmann::ordered_json j;
    j["magnitudes"] = matrix(s.magnitudes);
    j["normalized"] = matrix(s.normalized());
    j["doubly_stochastic"] = matrix(s.doubly_stochastic);
    j["iterations"] = s.iterations;
    j["residual"] = s.residual;
    return j;
}

}  // namespace tritter
