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

#include "tritter/tomography.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <limits>
#include <map>
#include <random>
#include <thread>

#include "tritter/csv.hpp"
#include "tritter/error.hpp"
#include "tritter/kernels.hpp"

namespace tritter {

namespace {

// Probabilities are floored here so log and 1/p stay finite.
constexpr double kProbabilityFloor = 1e-300;

CMatrix single_qubit_bras(PauliBasis b) {
    const double s = 1.0 / std::sqrt(2.0);
    const cplx i{0.0, 1.0};
    switch (b) {
        case PauliBasis::X:
            return CMatrix{{s, s}, {s, -s}};
        case PauliBasis::Y:
            // conj of (|0> + i|1>)/sqrt2 and (|0> - i|1>)/sqrt2
            return CMatrix{{s, -s * i}, {s, s * i}};
        case PauliBasis::Z:
            return CMatrix{{1.0, 0.0}, {0.0, 1.0}};
    }
    throw Error(ErrorCode::Validation, "unknown Pauli basis");
}

char basis_char(PauliBasis b) {
    switch (b) {
        case PauliBasis::X:
            return 'X';
        case PauliBasis::Y:
            return 'Y';
        case PauliBasis::Z:
            return 'Z';
    }
    return '?';
}

std::string outcome_label(std::size_t outcome, std::size_t qubits) {
    std::string s(qubits, '0');
    for (std::size_t q = 0; q < qubits; ++q) {
        if ((outcome >> (qubits - 1 - q)) & 1u) {
            s[q] = '1';
        }
    }
    return s;
}

// Measurement bases for every setting of a counts table, built once per call.
class TomographyModel {
   public:
    explicit TomographyModel(const CountsTable &counts) : counts_(counts), dim_(std::size_t{1} << counts.qubits) {
        bras_.reserve(counts.settings.size());
        kets_.reserve(counts.settings.size());
        for (const auto &s : counts.settings) {
            bras_.push_back(measurement_basis(s));
            kets_.push_back(bras_.back().adjoint());
        }
        total_ = counts.total();
    }

    std::size_t dim() const { return dim_; }

    void probabilities(const CMatrix &rho, std::vector<std::vector<double>> &out) const {
        out.resize(bras_.size());
        CMatrix t(dim_, dim_);
        for (std::size_t s = 0; s < bras_.size(); ++s) {
            kernels::matmul(bras_[s].data().data(), rho.data().data(), t.data().data(), dim_, dim_, dim_);
            out[s].resize(dim_);
            for (std::size_t b = 0; b < dim_; ++b) {
                const double p = kernels::dotc(bras_[s].row(b).data(), t.row(b).data(), dim_).real();
                out[s][b] = std::max(p, kProbabilityFloor);
            }
        }
    }

    double log_likelihood(const std::vector<std::vector<double>> &probs) const {
        double total = 0.0;
        for (std::size_t s = 0; s < probs.size(); ++s) {
            for (std::size_t b = 0; b < dim_; ++b) {
                const double n = counts_.counts[s][b];
                if (n > 0.0) {
                    total += n * std::log(probs[s][b]);
                }
            }
        }
        return total;
    }

    /// sum_sb (n_sb / N) / p_sb |e_sb><e_sb|; equals I at a perfect fit.
    CMatrix gradient_operator(const std::vector<std::vector<double>> &probs) const {
        CMatrix r(dim_, dim_);
        CMatrix weighted(dim_, dim_);
        CMatrix term(dim_, dim_);
        for (std::size_t s = 0; s < bras_.size(); ++s) {
            for (std::size_t b = 0; b < dim_; ++b) {
                const double w = counts_.counts[s][b] / (total_ * probs[s][b]);
                for (std::size_t c = 0; c < dim_; ++c) {
                    weighted(b, c) = w * bras_[s](b, c);
                }
            }
            kernels::matmul(kets_[s].data().data(), weighted.data().data(), term.data().data(), dim_, dim_, dim_);
            r += term;
        }
        return r;
    }

   private:
    const CountsTable &counts_;
    std::size_t dim_;
    double total_ = 0.0;
    std::vector<CMatrix> bras_;
    std::vector<CMatrix> kets_;
};

CMatrix sandwich(const CMatrix &a, const CMatrix &rho) {
    CMatrix out = a * rho * a;
    out = hermitian_part(out);
    out *= 1.0 / out.trace().real();
    return out;
}

void require_complete(const CountsTable &counts) {
    counts.validate();
    const auto expected = measurement_settings(counts.qubits);
    auto have = counts.settings;
    std::sort(have.begin(), have.end());
    if (have != expected) {
        throw Error(ErrorCode::Validation, "counts cover " + std::to_string(have.size()) + " distinct settings; " +
                                               std::to_string(expected.size()) +
                                               " Pauli settings are needed for reconstruction");
    }
    if (!(counts.total() > 0.0)) {
        throw Error(ErrorCode::Validation, "counts table is empty");
    }
}

}  // namespace

std::string MeasurementSetting::label() const {
    std::string s;
    for (PauliBasis b : bases) {
        s.push_back(basis_char(b));
    }
    return s;
}

MeasurementSetting MeasurementSetting::parse(const std::string &label) {
    MeasurementSetting s;
    for (char c : label) {
        switch (c) {
            case 'X':
            case 'x':
                s.bases.push_back(PauliBasis::X);
                break;
            case 'Y':
            case 'y':
                s.bases.push_back(PauliBasis::Y);
                break;
            case 'Z':
            case 'z':
                s.bases.push_back(PauliBasis::Z);
                break;
            default:
                throw Error(ErrorCode::Parse, "bad measurement setting '" + label + "'");
        }
    }
    if (s.bases.empty()) {
        throw Error(ErrorCode::Parse, "empty measurement setting");
    }
    return s;
}

std::vector<MeasurementSetting> measurement_settings(std::size_t n) {
    if (n == 0) {
        throw Error(ErrorCode::InvalidDimension, "tomography needs at least one qubit");
    }
    std::size_t total = 1;
    for (std::size_t q = 0; q < n; ++q) {
        total *= 3;
    }
    std::vector<MeasurementSetting> out;
    out.reserve(total);
    for (std::size_t idx = 0; idx < total; ++idx) {
        MeasurementSetting s;
        s.bases.resize(n);
        std::size_t rem = idx;
        for (std::size_t q = n; q-- > 0;) {
            s.bases[q] = static_cast<PauliBasis>(rem % 3);
            rem /= 3;
        }
        out.push_back(std::move(s));
    }
    return out;
}

CMatrix measurement_basis(const MeasurementSetting &setting) {
    CMatrix m = CMatrix::identity(1);
    for (PauliBasis b : setting.bases) {
        m = kron(m, single_qubit_bras(b));
    }
    return m;
}

std::vector<double> born_probabilities(const CMatrix &rho, const MeasurementSetting &setting) {
    const std::size_t dim = std::size_t{1} << setting.qubits();
    if (!rho.square() || rho.rows() != dim) {
        throw Error(ErrorCode::Shape, "density matrix does not match a " + std::to_string(setting.qubits()) +
                                          "-qubit setting");
    }
    const CMatrix bras = measurement_basis(setting);
    const CMatrix t = bras * rho;
    std::vector<double> p(dim);
    for (std::size_t b = 0; b < dim; ++b) {
        p[b] = kernels::dotc(bras.row(b).data(), t.row(b).data(), dim).real();
    }
    return p;
}

double CountsTable::shots(std::size_t setting) const {
    double s = 0.0;
    for (double c : counts.at(setting)) {
        s += c;
    }
    return s;
}

double CountsTable::total() const {
    double s = 0.0;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        s += shots(i);
    }
    return s;
}

void CountsTable::validate() const {
    if (qubits == 0 || settings.empty()) {
        throw Error(ErrorCode::Validation, "counts table is empty");
    }
    if (counts.size() != settings.size()) {
        throw Error(ErrorCode::Validation, "counts table has mismatched setting and count lists");
    }
    const std::size_t dim = std::size_t{1} << qubits;
    for (std::size_t s = 0; s < settings.size(); ++s) {
        if (settings[s].qubits() != qubits) {
            throw Error(ErrorCode::Validation, "setting " + settings[s].label() + " has the wrong qubit count");
        }
        if (counts[s].size() != dim) {
            throw Error(ErrorCode::Validation, "setting " + settings[s].label() + " needs " + std::to_string(dim) +
                                                   " outcome counts");
        }
        for (double c : counts[s]) {
            if (!(c >= 0.0) || !std::isfinite(c)) {
                throw Error(ErrorCode::Validation, "counts must be non-negative");
            }
        }
    }
}

CountsTable simulate_counts(const CMatrix &rho, const std::vector<MeasurementSetting> &settings, std::uint64_t shots,
                            std::uint64_t seed) {
    if (shots == 0) {
        throw Error(ErrorCode::Validation, "shots per setting must be positive");
    }
    if (settings.empty()) {
        throw Error(ErrorCode::Validation, "no measurement settings");
    }
    CountsTable table;
    table.qubits = settings.front().qubits();
    table.settings = settings;
    std::mt19937_64 rng(seed);
    for (const auto &s : settings) {
        auto p = born_probabilities(rho, s);
        for (double &x : p) {
            x = std::max(x, 0.0);
        }
        // Sequential binomials give an exact multinomial draw.
        std::vector<double> row(p.size(), 0.0);
        std::uint64_t remaining = shots;
        double mass = 0.0;
        for (double x : p) {
            mass += x;
        }
        for (std::size_t b = 0; b + 1 < p.size() && remaining > 0; ++b) {
            const double q = mass > 0.0 ? std::clamp(p[b] / mass, 0.0, 1.0) : 0.0;
            std::binomial_distribution<std::uint64_t> draw(remaining, q);
            const std::uint64_t k = draw(rng);
            row[b] = static_cast<double>(k);
            remaining -= k;
            mass -= p[b];
        }
        row.back() += static_cast<double>(remaining);
        table.counts.push_back(std::move(row));
    }
    return table;
}

CountsTable expected_counts(const CMatrix &rho, const std::vector<MeasurementSetting> &settings, double shots) {
    if (!(shots > 0.0)) {
        throw Error(ErrorCode::Validation, "shots per setting must be positive");
    }
    if (settings.empty()) {
        throw Error(ErrorCode::Validation, "no measurement settings");
    }
    CountsTable table;
    table.qubits = settings.front().qubits();
    table.settings = settings;
    for (const auto &s : settings) {
        auto p = born_probabilities(rho, s);
        for (double &x : p) {
            x = shots * std::max(x, 0.0);
        }
        table.counts.push_back(std::move(p));
    }
    return table;
}

double log_likelihood(const CMatrix &rho, const CountsTable &counts) {
    counts.validate();
    TomographyModel model(counts);
    std::vector<std::vector<double>> probs;
    model.probabilities(rho, probs);
    return model.log_likelihood(probs);
}

ReconstructionResult reconstruct_mle(const CountsTable &counts, const MleOptions &options) {
    require_complete(counts);
    TomographyModel model(counts);
    const std::size_t dim = model.dim();
    const CMatrix identity = CMatrix::identity(dim);

    ReconstructionResult result;
    result.rho = maximally_mixed(dim);
    std::vector<std::vector<double>> probs;
    std::vector<std::vector<double>> trial_probs;
    model.probabilities(result.rho, probs);
    result.log_likelihood = model.log_likelihood(probs);
    if (options.record_trace) {
        result.likelihood_trace.push_back(result.log_likelihood);
    }

    while (result.iterations < options.max_iterations) {
        const CMatrix r = model.gradient_operator(probs);
        CMatrix candidate = sandwich(r, result.rho);
        model.probabilities(candidate, trial_probs);
        double trial_ll = model.log_likelihood(trial_probs);

        if (!(trial_ll >= result.log_likelihood)) {
            ++result.diluted_steps;
            bool improved = false;
            for (double eps = 1.0; eps > 1e-12; eps *= 0.5) {
                candidate = sandwich(identity + r * eps, result.rho);
                model.probabilities(candidate, trial_probs);
                trial_ll = model.log_likelihood(trial_probs);
                if (trial_ll >= result.log_likelihood) {
                    improved = true;
                    break;
                }
            }
            if (!improved) {
                // No ascent direction at working precision.
                result.converged = true;
                result.last_step = 0.0;
                break;
            }
        }

        result.last_step = trace_distance(candidate, result.rho);
        result.rho = std::move(candidate);
        result.log_likelihood = trial_ll;
        std::swap(probs, trial_probs);
        ++result.iterations;
        if (options.record_trace) {
            result.likelihood_trace.push_back(result.log_likelihood);
        }
        if (result.last_step < options.tolerance) {
            result.converged = true;
            break;
        }
    }
    return result;
}

CMatrix reconstruct_linear(const CountsTable &counts) {
    require_complete(counts);
    const std::size_t n = counts.qubits;
    const std::size_t dim = std::size_t{1} << n;
    const CMatrix paulis[4] = {
        CMatrix::identity(2),
        CMatrix{{0.0, 1.0}, {1.0, 0.0}},
        CMatrix{{0.0, cplx{0.0, -1.0}}, {cplx{0.0, 1.0}, 0.0}},
        CMatrix{{1.0, 0.0}, {0.0, -1.0}},
    };
    std::size_t strings = 1;
    for (std::size_t q = 0; q < n; ++q) {
        strings *= 4;
    }
    CMatrix rho(dim, dim);
    std::vector<std::size_t> ops(n);
    for (std::size_t idx = 0; idx < strings; ++idx) {
        std::size_t rem = idx;
        for (std::size_t q = n; q-- > 0;) {
            ops[q] = rem % 4;
            rem /= 4;
        }
        // Average the expectation over every setting compatible with the string.
        double sum = 0.0;
        std::size_t matches = 0;
        for (std::size_t s = 0; s < counts.settings.size(); ++s) {
            bool ok = true;
            for (std::size_t q = 0; q < n && ok; ++q) {
                ok = ops[q] == 0 || static_cast<std::size_t>(counts.settings[s].bases[q]) + 1 == ops[q];
            }
            if (!ok) {
                continue;
            }
            const double shots = counts.shots(s);
            if (shots <= 0.0) {
                continue;
            }
            double e = 0.0;
            for (std::size_t b = 0; b < dim; ++b) {
                int sign = 1;
                for (std::size_t q = 0; q < n; ++q) {
                    if (ops[q] != 0 && ((b >> (n - 1 - q)) & 1u)) {
                        sign = -sign;
                    }
                }
                e += sign * counts.counts[s][b];
            }
            sum += e / shots;
            ++matches;
        }
        if (matches == 0) {
            continue;
        }
        CMatrix op = CMatrix::identity(1);
        for (std::size_t q = 0; q < n; ++q) {
            op = kron(op, paulis[ops[q]]);
        }
        rho += op * (sum / static_cast<double>(matches) / static_cast<double>(dim));
    }
    return rho;
}

double Functional::operator()(const CMatrix &rho) const {
    return kind == Kind::Fidelity ? fidelity(rho, target) : purity(rho);
}

UncertaintyEstimate monte_carlo_uncertainty(const CountsTable &counts, std::size_t resamples,
                                            const Functional &functional, std::uint64_t seed, unsigned threads,
                                            const MleOptions &options) {
    if (resamples < 2) {
        throw Error(ErrorCode::Validation, "Monte-Carlo uncertainty needs at least 2 resamples");
    }
    require_complete(counts);

    std::vector<double> values(resamples, std::numeric_limits<double>::quiet_NaN());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= resamples) {
                return;
            }
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(i >> 32)};
            std::mt19937_64 rng(seq);
            CountsTable redrawn = counts;
            for (auto &row : redrawn.counts) {
                for (double &c : row) {
                    if (c > 0.0) {
                        std::poisson_distribution<long long> poisson(c);
                        c = static_cast<double>(poisson(rng));
                    }
                }
            }
            try {
                values[i] = functional(reconstruct_mle(redrawn, options).rho);
            } catch (const Error &) {
                // Left as NaN and counted as a failure below.
            }
        }
    };

    unsigned pool = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    pool = static_cast<unsigned>(std::min<std::size_t>(pool, resamples));
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < pool; ++t) {
            workers.emplace_back(worker);
        }
    }

    UncertaintyEstimate est;
    est.resamples = resamples;
    double sum = 0.0;
    std::size_t good = 0;
    for (double v : values) {
        if (std::isnan(v)) {
            ++est.failures;
        } else {
            sum += v;
            ++good;
        }
    }
    if (good < 2) {
        throw Error(ErrorCode::Convergence, "fewer than two Monte-Carlo resamples reconstructed successfully");
    }
    est.mean = sum / static_cast<double>(good);
    double var = 0.0;
    for (double v : values) {
        if (!std::isnan(v)) {
            var += (v - est.mean) * (v - est.mean);
        }
    }
    est.std = std::sqrt(var / static_cast<double>(good - 1));
    return est;
}

void write_counts_csv(std::ostream &out, const CountsTable &counts) {
    counts.validate();
    out << "setting,outcome,count\n";
    out << std::setprecision(17);
    for (std::size_t s = 0; s < counts.settings.size(); ++s) {
        const std::string label = counts.settings[s].label();
        for (std::size_t b = 0; b < counts.counts[s].size(); ++b) {
            out << label << ',' << outcome_label(b, counts.qubits) << ',' << counts.counts[s][b] << '\n';
        }
    }
}

CountsTable read_counts_csv(std::istream &in) {
    auto rows = csv::read_rows(in);
    if (!rows.empty() && rows.front().fields.size() == 3 && !csv::to_number(rows.front().fields[2])) {
        rows.erase(rows.begin());
    }
    if (rows.empty()) {
        throw Error(ErrorCode::Parse, "counts file has no data rows");
    }
    std::map<MeasurementSetting, std::vector<double>> grouped;
    std::vector<MeasurementSetting> order;
    std::size_t qubits = 0;
    for (const auto &row : rows) {
        if (row.fields.size() != 3) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(row.line) + ": expected setting,outcome,count");
        }
        MeasurementSetting setting;
        try {
            setting = MeasurementSetting::parse(row.fields[0]);
        } catch (const Error &e) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(row.line) + ": " + e.what());
        }
        if (qubits == 0) {
            qubits = setting.qubits();
        }
        const std::string &outcome = row.fields[1];
        if (setting.qubits() != qubits || outcome.size() != qubits ||
            outcome.find_first_not_of("01") != std::string::npos) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(row.line) + ": inconsistent setting/outcome width");
        }
        const auto count = csv::to_number(row.fields[2]);
        if (!count || *count < 0.0) {
            throw Error(ErrorCode::Parse, "line " + std::to_string(row.line) + ": bad count '" + row.fields[2] + "'");
        }
        auto [it, inserted] = grouped.try_emplace(setting, std::vector<double>(std::size_t{1} << qubits, 0.0));
        if (inserted) {
            order.push_back(setting);
        }
        it->second[std::stoul(outcome, nullptr, 2)] += *count;
    }
    CountsTable table;
    table.qubits = qubits;
    for (const auto &s : order) {
        table.settings.push_back(s);
        table.counts.push_back(grouped.at(s));
    }
    table.validate();
    return table;
}

nlohmann::ordered_json to_json(const ReconstructionResult &r) {
    nlohmann::ordered_json j;
    j["rho"] = to_json(r.rho);
    j["log_likelihood"] = r.log_likelihood;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["last_step"] = r.last_step;
    j["diluted_steps"] = r.diluted_steps;
    return j;
}

nlohmann::ordered_json to_json(const UncertaintyEstimate &u) {
    nlohmann::ordered_json j;
    j["mean"] = u.mean;
    j["std"] = u.std;
    j["resamples"] = u.resamples;
    j["failures"] = u.failures;
    return j;
}

}  // namespace tritter
