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

#include "pushsum/algorithms.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "pushsum/error.hpp"
#include "pushsum/kernels.hpp"
#include "pushsum/rng.hpp"

namespace pushsum {

std::string_view to_string(OptimizerKind kind) noexcept {
    switch (kind) {
    case OptimizerKind::SGAP: return "SGAP";
    case OptimizerKind::MSGAP: return "MSGAP";
    case OptimizerKind::SGP: return "SGP";
    case OptimizerKind::MSGP: return "MSGP";
    case OptimizerKind::SADDOPT: return "SADDOPT";
    }
    return "?";
}

OptimizerKind parse_optimizer_kind(std::string_view name) {
    for (auto k : {OptimizerKind::SGAP, OptimizerKind::MSGAP, OptimizerKind::SGP, OptimizerKind::MSGP,
                   OptimizerKind::SADDOPT})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown optimizer kind '" + std::string(name) + "' (expected SGAP, MSGAP, SGP, MSGP or SADDOPT)");
}

void OptimizerSpec::validate() const {
    if (!(gamma > 0.0) || !std::isfinite(gamma)) throw ConfigError("optimizer: learning rate gamma must be > 0");
    if (!(beta >= 0.0 && beta < 1.0)) throw ConfigError("optimizer: momentum rate beta must lie in [0, 1)");
}

double effective_beta(const OptimizerSpec &spec) noexcept {
    return spec.kind == OptimizerKind::MSGAP || spec.kind == OptimizerKind::MSGP ? spec.beta : 0.0;
}

WeightingMethod effective_weighting(OptimizerKind kind, const WeightingMethod &configured) {
    if (kind == OptimizerKind::SGAP || kind == OptimizerKind::MSGAP) return configured;
    return UniformOutDegree{};
}

OptimizerState OptimizerState::zeros(std::size_t n, std::size_t d) {
    OptimizerState s;
    s.momentum.assign(n, Vec(d, 0.0));
    return s;
}

Perturbation sgap_perturbation(const Matrix &grad, double gamma) {
    Perturbation eps(grad.rows(), grad.cols());
    for (std::size_t k = 0; k < grad.data().size(); ++k) eps.data()[k] = -gamma * grad.data()[k];
    return eps;
}

Perturbation msgap_perturbation(OptimizerState &state, const Matrix &grad, double gamma, double beta) {
    if (state.momentum.size() != grad.rows()) throw ShapeError("msgap_perturbation: momentum/gradient node count differ");
    Perturbation eps(grad.rows(), grad.cols());
    for (std::size_t i = 0; i < grad.rows(); ++i) {
        auto &m = state.momentum[i];
        if (m.size() != grad.cols()) throw ShapeError("msgap_perturbation: momentum dimension differs");
        const auto g = grad.row(i);
        for (std::size_t k = 0; k < m.size(); ++k) {
            m[k] = beta * m[k] + g[k];
            eps(i, k) = -gamma * m[k];
        }
    }
    return eps;
}

namespace {

Matrix sample_gradients(const Problem &problem, const Matrix &points, std::uint64_t seed, std::uint64_t round) {
    const std::size_t n = points.rows();
    Matrix g(n, points.cols());
#pragma omp parallel for schedule(static) if (n > 1)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        const Vec gi = problem.stochastic_gradient(i, points.row(i), GradientKey{seed, round, i});
        std::copy(gi.begin(), gi.end(), g.row(i).begin());
    }
    return g;
}

Vec mean_of(const std::vector<Vec> &rows) {
    Vec s(rows.empty() ? 0 : rows.front().size(), 0.0);
    for (const auto &r : rows)
        for (std::size_t k = 0; k < s.size(); ++k) s[k] += r[k];
    for (double &v : s) v /= static_cast<double>(rows.size());
    return s;
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

WeightMatrix saddopt_round(OptimizerState &state, NetworkState &network, const Problem &problem, const EdgeSet &edges,
                           double gamma, std::uint64_t seed) {
    const std::size_t n = network.n_nodes();
    const std::size_t d = network.dim();
    if (state.tracking.size() != n || state.prev_grad.size() != n)
        throw ShapeError("saddopt_round: tracking state not initialized");
    WeightMatrix w = build_weight_matrix(UniformOutDegree{}, edges, {});

    const Matrix z = Matrix::from_rows(state.tracking);
    Matrix x = kernels::parallel::matmul(w.matrix(), network.x_matrix());
    for (std::size_t k = 0; k < x.data().size(); ++k) x.data()[k] -= gamma * z.data()[k];
    const Vec a = kernels::parallel::matvec(w.matrix(), network.a_vector());

    Matrix y(n, d);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(a[i] > kNormalizerFloor))
            throw NumericError("saddopt_round: normalizer of node " + std::to_string(i) + " underflowed at round " +
                               std::to_string(network.round + 1));
        auto &node = network.nodes[i];
        node.x.assign(x.row(i).begin(), x.row(i).end());
        node.a = a[i];
        node.y.resize(d);
        for (std::size_t k = 0; k < d; ++k) node.y[k] = node.x[k] / a[i];
        std::copy(node.y.begin(), node.y.end(), y.row(i).begin());
    }
    ++network.round;
    network.link_history.push_back(edges);
    while (network.link_history.size() > network.period_b) network.link_history.erase(network.link_history.begin());

    const Matrix g_new = sample_gradients(problem, y, seed, network.round);
    const Matrix mixed = kernels::parallel::matmul(w.matrix(), z);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < d; ++k) {
            state.tracking[i][k] = mixed(i, k) + g_new(i, k) - state.prev_grad[i][k];
            state.prev_grad[i][k] = g_new(i, k);
        }
    return w;
}

std::size_t scalars_per_edge(OptimizerKind kind, const WeightingMethod &effective, std::size_t dim) noexcept {
    if (kind == OptimizerKind::SADDOPT) return 2 * dim + 1;
    return dim + 1 + (is_moreau(effective) ? 1 : 0);
}

void MetricsLog::write_csv(std::ostream &os) const {
    os << kCsvHeader << '\n';
    for (const auto &r : rows) {
        os << r.t << ',' << fmt_double(r.loss) << ',' << fmt_double(r.grad_norm_sq) << ',' << fmt_double(r.cons_l1_max)
           << ',' << fmt_double(r.cons_l1_mean) << ',' << fmt_double(r.cons_l2_mean) << ',' << fmt_double(r.bound_l1)
           << ',' << r.scalars_sent << ',' << fmt_double(r.lemma5_resid) << ',' << fmt_double(r.lemma10_resid) << '\n';
    }
}

void write_state_csv(std::ostream &os, const std::vector<StateDumpRow> &rows) {
    os << "round,node,a,x_norm,cons_l1,cons_l2\n";
    for (const auto &r : rows)
        os << r.round << ',' << r.node << ',' << fmt_double(r.a) << ',' << fmt_double(r.x_norm) << ','
           << fmt_double(r.cons_l1) << ',' << fmt_double(r.cons_l2) << '\n';
}

std::vector<Vec> initial_parameters(std::size_t n, std::size_t d, double scale, std::uint64_t seed) {
    std::vector<Vec> x0(n, Vec(d, 0.0));
    if (scale == 0.0) return x0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto k = rng::key(rng::Stream::Init, {seed, i});
        for (std::size_t c = 0; c < d; ++c) x0[i][c] = scale * rng::normal(k, c);
    }
    return x0;
}

ExperimentResult run_experiment(const Problem &problem, const GraphSpec &graph, const OptimizerSpec &optimizer,
                                const WeightingMethod &weighting, std::uint64_t horizon_t, std::uint64_t seed,
                                const RunOptions &options) {
    graph.validate();
    optimizer.validate();
    if (const auto *p = std::get_if<MoreauParams>(&weighting)) p->validate();
    if (problem.n_nodes() != graph.n_nodes)
        throw ConfigError("run_experiment: problem and topology disagree on n_nodes");
    if (horizon_t < 1) throw ConfigError("run_experiment: horizon T must be >= 1");

    const auto method = effective_weighting(optimizer.kind, weighting);
    const std::uint64_t rounds = horizon_t - 1;
    const auto conn = validate_assumption1(graph, std::max<std::uint64_t>(rounds, graph.period_b));
    if (!conn.is_b_strongly_connected)
        throw PreconditionError("run_experiment: topology breaks B-strong connectivity at window " +
                                std::to_string(conn.first_violating_window.value_or(0)));

    const double delta = analytic_delta(method, conn.max_out_degree);
    const BoundParams bounds = compute_bound_params(delta, *conn.diameter_delta, graph.period_b);

    const std::size_t n = problem.n_nodes();
    const std::size_t d = problem.dim();
    const bool tracking = optimizer.kind == OptimizerKind::SADDOPT;
    const double gamma = optimizer.gamma;
    const double beta = effective_beta(optimizer);
    const bool momentum = beta > 0.0 || optimizer.kind == OptimizerKind::MSGAP || optimizer.kind == OptimizerKind::MSGP;
    const std::size_t per_edge = scalars_per_edge(optimizer.kind, method, d);

    NetworkState net = init_network(initial_parameters(n, d, options.init_scale, seed), graph.period_b);
    OptimizerState opt = OptimizerState::zeros(n, d);
    const Matrix x0 = net.x_matrix();
    const double x0_l1 = entrywise_l1(x0);
    const Vec mass0 = row_sum(x0);

    if (tracking) {
        const Matrix g0 = sample_gradients(problem, net.y_matrix(), seed, 0);
        opt.tracking.resize(n);
        for (std::size_t i = 0; i < n; ++i) opt.tracking[i].assign(g0.row(i).begin(), g0.row(i).end());
        opt.prev_grad = opt.tracking;
        if (options.zero_perturbation)
            for (auto &z : opt.tracking) std::fill(z.begin(), z.end(), 0.0);
    }

    ExperimentResult result;
    RunSummary &summary = result.summary;
    summary.bounds = bounds;
    summary.max_out_degree = conn.max_out_degree;
    summary.min_weight_entry = std::numeric_limits<double>::infinity();
    if (options.record_trace) {
        result.trace.emplace();
        result.trace->trajectory.x0 = x0;
    }

    const double saddopt_shift = tracking ? bounds.lambda_pow(-1.0) : 1.0;
    auto record = [&](std::uint64_t t, double bound, std::uint64_t sent, double l5, double l10) {
        const Vec xbar = net.average();
        const Vec grad = problem.global_gradient(xbar);
        const Vec l1 = consensus_distance(net, Norm::L1);
        const Vec l2 = consensus_distance(net, Norm::L2);
        MetricsRecord r;
        r.t = t;
        r.loss = problem.global_loss(xbar);
        r.grad_norm_sq = squared_norm(grad);
        for (std::size_t i = 0; i < n; ++i) {
            r.cons_l1_max = std::max(r.cons_l1_max, l1[i]);
            r.cons_l1_mean += l1[i] / static_cast<double>(n);
            r.cons_l2_mean += l2[i] / static_cast<double>(n);
        }
        r.bound_l1 = bound;
        r.scalars_sent = sent;
        r.lemma5_resid = l5;
        r.lemma10_resid = l10;
        for (double v : {r.loss, r.grad_norm_sq, r.cons_l1_max, r.cons_l1_mean, r.cons_l2_mean, r.bound_l1, r.lemma5_resid,
                         r.lemma10_resid})
            if (!std::isfinite(v))
                throw NumericError("run_experiment: non-finite metric at round " + std::to_string(t) +
                                   " (loss=" + std::to_string(r.loss) + ")");
        if (options.dump_state)
            for (std::size_t i = 0; i < n; ++i)
                result.state_rows.push_back({t, i, net.nodes[i].a, norm_l2(net.nodes[i].x), l1[i], l2[i]});
        result.log.rows.push_back(r);
    };

    record(0, saddopt_shift * consensus_bound(bounds, n, Norm::L1, 0, x0_l1, 0.0), 0, 0.0, 0.0);

    Vec xbar_prev = net.average();
    Vec zbar_prev = xbar_prev;
    Vec injected_total(d, 0.0);
    double discounted = 0.0;
    double grad_mean_sq_sum = 0.0;

    for (std::uint64_t t = 1; t <= rounds; ++t) {
        const EdgeSet edges = generate_edges(graph, t);
        Matrix injected;
        Vec gbar;
        Vec direction_bar;
        WeightMatrix w;

        if (tracking) {
            gbar = mean_of(opt.prev_grad);
            direction_bar = mean_of(opt.tracking);
            injected = Matrix::from_rows(opt.tracking);
            for (double &v : injected.data()) v *= -gamma;
            w = saddopt_round(opt, net, problem, edges, gamma, seed);
            if (options.zero_perturbation)
                for (auto &z : opt.tracking) std::fill(z.begin(), z.end(), 0.0);
        } else {
            Matrix grads = options.zero_perturbation ? Matrix(n, d) : sample_gradients(problem, net.y_matrix(), seed, t - 1);
            injected = momentum ? msgap_perturbation(opt, grads, gamma, beta) : sgap_perturbation(grads, gamma);
            gbar = row_mean(grads);
            direction_bar = momentum ? mean_of(opt.momentum) : gbar;
            w = protocol_round(net, injected, edges, method);
        }
        if (tracking && options.zero_perturbation) {
            gbar.assign(d, 0.0);
            direction_bar.assign(d, 0.0);
        }

        if (!check_definition1(w, edges, delta))
            throw NumericError("run_experiment: weight matrix of round " + std::to_string(t) +
                               " breaks column stochasticity, sparsity or the delta floor");
        summary.min_weight_entry = std::min(summary.min_weight_entry, w.min_nonzero());

        // Averages and identity residuals.
        const Vec xbar = net.average();
        Vec zbar(d);
        for (std::size_t k = 0; k < d; ++k) zbar[k] = (xbar[k] - beta * xbar_prev[k]) / (1.0 - beta);
        double l5 = 0.0;
        double l10 = 0.0;
        double lhs6 = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double r5 = zbar[k] - zbar_prev[k] + gamma / (1.0 - beta) * gbar[k];
            const double r10 = xbar[k] - xbar_prev[k] + gamma * direction_bar[k];
            l5 += r5 * r5;
            l10 += r10 * r10;
            lhs6 += (zbar[k] - xbar[k]) * (zbar[k] - xbar[k]);
        }
        summary.lemma6_lhs += lhs6;
        grad_mean_sq_sum += squared_norm(gbar);

        // Conservation.
        const Vec inj_sum = row_sum(injected);
        for (std::size_t k = 0; k < d; ++k) injected_total[k] += inj_sum[k];
        const Vec mass = row_sum(net.x_matrix());
        double mass_resid = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double r = mass[k] - mass0[k] - injected_total[k];
            mass_resid += r * r;
        }
        mass_resid = std::sqrt(mass_resid);
        double a_sum = 0.0;
        for (const auto &node : net.nodes) a_sum += node.a;
        const double normalizer_resid = std::abs(a_sum - static_cast<double>(n));
        summary.max_mass_resid = std::max(summary.max_mass_resid, mass_resid);
        summary.max_normalizer_resid = std::max(summary.max_normalizer_resid, normalizer_resid);

        discounted = bounds.lambda * discounted + entrywise_l1(injected);
        const double bound = saddopt_shift * consensus_bound(bounds, n, Norm::L1, t, x0_l1, discounted);
        const std::uint64_t sent = static_cast<std::uint64_t>(per_edge) * edges.size();

        if (result.trace) {
            auto &tr = *result.trace;
            tr.edges.push_back(edges);
            tr.weights.push_back(w);
            tr.trajectory.rounds.push_back({net.x_matrix(), net.a_vector(), net.y_matrix(), injected});
            tr.mass_resid.push_back(mass_resid);
            tr.normalizer_resid.push_back(normalizer_resid);
        }

        record(t, bound, sent, std::sqrt(l5), std::sqrt(l10));
        summary.max_lemma5_resid = std::max(summary.max_lemma5_resid, std::sqrt(l5));
        summary.max_lemma10_resid = std::max(summary.max_lemma10_resid, std::sqrt(l10));
        summary.total_scalars_sent += sent;

        xbar_prev = xbar;
        zbar_prev = zbar;
    }

    const double one_minus = 1.0 - beta;
    summary.lemma6_rhs = gamma * gamma * beta * beta / (one_minus * one_minus * one_minus * one_minus) * grad_mean_sq_sum;
    const auto &last = result.log.rows.back();
    summary.final_loss = last.loss;
    summary.final_grad_norm_sq = last.grad_norm_sq;
    summary.final_average = net.average();
    double cons = 0.0;
    for (const auto &r : result.log.rows) cons += r.cons_l1_mean;
    summary.mean_consensus_l1 = cons / static_cast<double>(result.log.rows.size());
    if (rounds == 0) summary.min_weight_entry = 0.0;
    return result;
}

} // namespace pushsum
