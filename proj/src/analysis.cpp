/*
Copyright 2026 The pushsum-lab Authors

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
*/

#include "pushsum/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "pushsum/error.hpp"
#include "pushsum/kernels.hpp"

namespace pushsum {

namespace {

constexpr double kProductColumnTolerance = 1e-9;

void check_sequence(std::span<const WeightMatrix> seq, const BoundParams &params, const char *who) {
    if (seq.empty()) throw PreconditionError(std::string(who) + ": empty weight sequence");
    const std::size_t n = seq.front().n_nodes();
    std::vector<EdgeSet> graphs;
    graphs.reserve(seq.size());
    for (std::size_t t = 0; t < seq.size(); ++t) {
        if (seq[t].n_nodes() != n) throw PreconditionError(std::string(who) + ": matrices disagree on N");
        graphs.push_back(support_graph(seq[t]));
        if (!check_definition1(seq[t], graphs.back(), params.delta))
            throw PreconditionError(std::string(who) + ": W(" + std::to_string(t + 1) +
                                    ") is not column stochastic with entries >= delta");
        for (std::size_t i = 0; i < n; ++i)
            if (!(seq[t](i, i) > 0.0))
                throw PreconditionError(std::string(who) + ": W(" + std::to_string(t + 1) + ") has a zero diagonal entry");
    }
    if (seq.size() < params.period_b)
        throw PreconditionError(std::string(who) + ": sequence shorter than the connectivity period B");
    const auto report = check_windows(graphs, params.period_b);
    if (!report.is_b_strongly_connected)
        throw PreconditionError(std::string(who) + ": support graphs are not B-strongly connected (window " +
                                std::to_string(report.first_violating_window.value_or(0)) + ")");
    if (*report.diameter_delta > params.diameter_delta)
        throw PreconditionError(std::string(who) + ": support graph diameter " + std::to_string(*report.diameter_delta) +
                                " exceeds Delta = " + std::to_string(params.diameter_delta));
}

void finish(VerificationReport &r) {
    r.worst_margin = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < r.details.size(); ++k)
        if (r.details[k] < r.worst_margin) {
            r.worst_margin = r.details[k];
            r.worst_round = k + 1;
        }
    r.passed = r.passed && r.worst_margin >= -kBoundSlack;
}

} // namespace

double BoundParams::lambda_pow(double n) const noexcept {
    if (n == 0.0) return 1.0;
    if (lambda == 0.0) return n > 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::exp(n * log_lambda);
}

BoundParams compute_bound_params(double delta, std::size_t diameter_delta, std::size_t period_b) {
    if (!(delta > 0.0 && delta <= 1.0)) throw PreconditionError("compute_bound_params: delta must lie in (0, 1]");
    if (diameter_delta == 0 || period_b == 0) throw PreconditionError("compute_bound_params: Delta and B must be >= 1");
    BoundParams p;
    p.delta = delta;
    p.diameter_delta = diameter_delta;
    p.period_b = period_b;
    const auto db = static_cast<double>(diameter_delta * period_b);
    p.delta_pow = std::pow(delta, db);
    if (!(p.delta_pow > 0.0))
        throw PreconditionError("compute_bound_params: delta^(Delta B) underflows to zero; the bounds are meaningless");
    p.lemma_c = 4.0 / p.delta_pow;
    if (p.delta_pow == 1.0) {
        p.lambda = 0.0;
        p.log_lambda = -std::numeric_limits<double>::infinity();
    } else {
        p.log_lambda = std::log1p(-p.delta_pow) / db;
        p.lambda = std::exp(p.log_lambda);
    }
    return p;
}

EdgeSet support_graph(const WeightMatrix &w) {
    EdgeSet e(w.n_nodes());
    for (std::size_t i = 0; i < w.n_nodes(); ++i)
        for (std::size_t j = 0; j < w.n_nodes(); ++j)
            if (w(i, j) > 0.0) e.insert(j, i);
    return e;
}

VerificationReport verify_lemma1(std::span<const WeightMatrix> seq, const BoundParams &params) {
    check_sequence(seq, params, "verify_lemma1");
    const std::size_t n = seq.front().n_nodes();
    const std::size_t horizon = seq.size();

    VerificationReport report;
    report.check = "lemma1";
    report.passed = true;

    // phi(t): row means of P(t,1).
    std::vector<Vec> phi(horizon);
    {
        Matrix p = seq[0].matrix();
        for (std::size_t t = 0; t < horizon; ++t) {
            if (t > 0) p = kernels::serial::matmul(seq[t].matrix(), p);
            phi[t].assign(n, 0.0);
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < n; ++j) s += p(i, j);
                phi[t][i] = s / static_cast<double>(n);
                total += phi[t][i];
                if (phi[t][i] < 0.0) report.passed = false;
            }
            if (std::abs(total - 1.0) > 1e-9) report.passed = false;
        }
    }

    // margins(s, t) for every gap; threads own disjoint start indices s.
    Matrix margins(horizon, horizon, std::numeric_limits<double>::infinity());
    std::vector<double> column_error(horizon, 0.0);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t ss = 0; ss < static_cast<std::ptrdiff_t>(horizon); ++ss) {
        const auto s = static_cast<std::size_t>(ss);
        Matrix p = seq[s].matrix();
        for (std::size_t t = s; t < horizon; ++t) {
            if (t > s) p = kernels::serial::matmul(seq[t].matrix(), p);
            double dev = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                double col = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    col += p(i, j);
                    dev = std::max(dev, std::abs(p(i, j) - phi[t][i]));
                }
                column_error[s] = std::max(column_error[s], std::abs(col - 1.0));
            }
            margins(s, t) = params.lemma_k * params.lambda_pow(static_cast<double>(t - s)) - dev;
        }
    }

    report.details.assign(horizon, std::numeric_limits<double>::infinity());
    double worst_column_error = 0.0;
    for (std::size_t s = 0; s < horizon; ++s) {
        worst_column_error = std::max(worst_column_error, column_error[s]);
        for (std::size_t t = s; t < horizon; ++t) report.details[t] = std::min(report.details[t], margins(s, t));
    }
    if (worst_column_error > kProductColumnTolerance) report.passed = false;
    finish(report);
    report.stats["max_column_sum_error"] = worst_column_error;
    return report;
}

VerificationReport verify_lemma2(std::span<const WeightMatrix> seq, const BoundParams &params) {
    check_sequence(seq, params, "verify_lemma2");
    const std::size_t n = seq.front().n_nodes();
    const std::size_t window = params.window();

    VerificationReport report;
    report.check = "lemma2";
    report.passed = true;

    Vec v(n, 1.0);
    double improvement = std::numeric_limits<double>::infinity();
    double min_r = std::numeric_limits<double>::infinity();
    for (std::size_t t = 1; t <= seq.size(); ++t) {
        v = kernels::serial::matvec(seq[t - 1].matrix(), v);
        const double r = *std::min_element(v.begin(), v.end());
        min_r = std::min(min_r, r);
        const bool long_run = t >= window;
        const double threshold = long_run ? static_cast<double>(n) * params.delta_pow : params.delta_pow;
        report.details.push_back(r - threshold);
        if (long_run) improvement = std::min(improvement, r / params.delta_pow);
    }
    finish(report);
    report.stats["min_row_sum"] = min_r;
    report.stats["delta_pow"] = params.delta_pow;
    if (std::isfinite(improvement)) report.stats["improvement_factor"] = improvement;
    return report;
}

double consensus_bound(const BoundParams &params, std::size_t n_nodes, Norm norm, std::uint64_t t, double x0_norm,
                       double discounted_eps) {
    const auto n = static_cast<double>(n_nodes);
    const bool long_run = t >= params.window();
    double coef = params.lemma_c;
    if (norm == Norm::L1)
        coef = long_run ? coef / n : coef;
    else
        coef = long_run ? coef / std::sqrt(n) : coef * std::sqrt(n);
    return coef * (params.lambda_pow(static_cast<double>(t) - 1.0) * x0_norm + discounted_eps);
}

VerificationReport verify_theorem1(const Trajectory &trajectory, const BoundParams &params, Norm norm) {
    const std::size_t n = trajectory.x0.rows();
    VerificationReport report;
    report.check = norm == Norm::L1 ? "theorem1_l1" : "corollary4_l2";
    report.passed = true;
    if (trajectory.rounds.empty()) throw PreconditionError("verify_theorem1: empty trajectory");

    auto mat_norm = [norm](const Matrix &m) { return norm == Norm::L1 ? entrywise_l1(m) : frobenius(m); };
    const double x0_norm = mat_norm(trajectory.x0);
    double discounted = 0.0;
    double worst_ratio = 0.0;
    for (std::size_t k = 0; k < trajectory.rounds.size(); ++k) {
        const auto &r = trajectory.rounds[k];
        if (r.eps.rows() != n || r.x.rows() != n || r.y.rows() != n)
            throw PreconditionError("verify_theorem1: missing or malformed perturbation history");
        const std::uint64_t t = k + 1;
        discounted = params.lambda * discounted + mat_norm(r.eps);
        const double bound = consensus_bound(params, n, norm, t, x0_norm, discounted);
        const Vec xbar = row_mean(r.x);
        double worst = 0.0;
        Vec diff(xbar.size());
        for (std::size_t i = 0; i < n; ++i) {
            const auto yi = r.y.row(i);
            for (std::size_t c = 0; c < diff.size(); ++c) diff[c] = yi[c] - xbar[c];
            worst = std::max(worst, norm == Norm::L1 ? norm_l1(diff) : norm_l2(diff));
        }
        report.details.push_back(bound - worst);
        if (bound > 0.0) worst_ratio = std::max(worst_ratio, worst / bound);
    }
    finish(report);
    report.stats["max_distance_over_bound"] = worst_ratio;
    return report;
}

std::pair<double, double> compare_regimes(const BoundParams &params, std::size_t n_nodes) {
    return {params.lemma_c, params.lemma_c / static_cast<double>(std::max<std::size_t>(n_nodes, 1))};
}

} // namespace pushsum
