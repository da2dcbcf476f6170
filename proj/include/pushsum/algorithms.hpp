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

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "pushsum/analysis.hpp"
#include "pushsum/problems.hpp"
#include "pushsum/protocol.hpp"
#include "pushsum/topology.hpp"
#include "pushsum/weighting.hpp"

namespace pushsum {

enum class OptimizerKind { SGAP, MSGAP, SGP, MSGP, SADDOPT };

std::string_view to_string(OptimizerKind kind) noexcept;
OptimizerKind parse_optimizer_kind(std::string_view name);

struct OptimizerSpec {
    OptimizerKind kind = OptimizerKind::SGAP;
    double gamma = 0.05;
    double beta = 0.0;

    void validate() const;
    bool operator==(const OptimizerSpec &) const = default;
};

/// Momentum rate actually applied: beta for MSGAP/MSGP, 0 otherwise.
double effective_beta(const OptimizerSpec &spec) noexcept;

/// SGP, MSGP and SADDOPT always mix with 1/out-degree weights; SGAP/MSGAP use the configured method.
WeightingMethod effective_weighting(OptimizerKind kind, const WeightingMethod &configured);

struct OptimizerState {
    /// m_i, zero-initialized.
    std::vector<Vec> momentum;
    /// SADDOPT gradient trackers z_i and last sampled gradients.
    std::vector<Vec> tracking;
    std::vector<Vec> prev_grad;

    static OptimizerState zeros(std::size_t n, std::size_t d);
};

/// eps_i = -gamma g_i. One gradient per row.
Perturbation sgap_perturbation(const Matrix &grad, double gamma);

/// m_i <- beta m_i + g_i, eps_i = -gamma m_i.
Perturbation msgap_perturbation(OptimizerState &state, const Matrix &grad, double gamma, double beta);

/// One push-sum gradient-tracking round with uniform weights:
/// x <- W x - gamma z, a <- W a, y = x / a, z <- W z + g(y_new) - g(y_old).
/// Gradients are drawn with GradientKey{seed, network.round (after the update), i}.
WeightMatrix saddopt_round(OptimizerState &state, NetworkState &network, const Problem &problem, const EdgeSet &edges,
                           double gamma, std::uint64_t seed);

/// Scalars pushed over one edge in one round (self-loops are charged like any other edge).
std::size_t scalars_per_edge(OptimizerKind kind, const WeightingMethod &effective, std::size_t dim) noexcept;

struct MetricsRecord {
    std::uint64_t t = 0;
    double loss = 0.0;
    double grad_norm_sq = 0.0;
    double cons_l1_max = 0.0;
    double cons_l1_mean = 0.0;
    double cons_l2_mean = 0.0;
    double bound_l1 = 0.0;
    std::uint64_t scalars_sent = 0;
    double lemma5_resid = 0.0;
    double lemma10_resid = 0.0;

    bool operator==(const MetricsRecord &) const = default;
};

struct MetricsLog {
    static constexpr std::string_view kCsvHeader =
        "t,loss,grad_norm_sq,cons_l1_max,cons_l1_mean,cons_l2_mean,bound_l1,scalars_sent,lemma5_resid,lemma10_resid";

    std::vector<MetricsRecord> rows;

    /// Round-trip-exact decimal output (%.17g).
    void write_csv(std::ostream &os) const;
    bool operator==(const MetricsLog &) const = default;
};

struct StateDumpRow {
    std::uint64_t round = 0;
    std::size_t node = 0;
    double a = 0.0;
    double x_norm = 0.0;
    double cons_l1 = 0.0;
    double cons_l2 = 0.0;
};

void write_state_csv(std::ostream &os, const std::vector<StateDumpRow> &rows);

struct RunSummary {
    double final_loss = 0.0;
    double final_grad_norm_sq = 0.0;
    Vec final_average;
    std::uint64_t total_scalars_sent = 0;
    double mean_consensus_l1 = 0.0;
    double max_lemma5_resid = 0.0;
    double max_lemma10_resid = 0.0;
    double max_mass_resid = 0.0;
    double max_normalizer_resid = 0.0;
    double lemma6_lhs = 0.0;
    double lemma6_rhs = 0.0;
    double min_weight_entry = 0.0;
    BoundParams bounds;
    std::size_t max_out_degree = 0;
};

struct RunOptions {
    /// x0_i ~ N(0, init_scale^2 I), keyed by the run seed.
    double init_scale = 1.0;
    /// Keep W(t), edges and (X, a, Y, eps) per round for the verifiers.
    bool record_trace = false;
    bool dump_state = false;
    /// Forces eps = 0 (pure consensus on the same graph/weight sequence).
    bool zero_perturbation = false;
};

struct RunTrace {
    std::vector<EdgeSet> edges;
    std::vector<WeightMatrix> weights;
    Trajectory trajectory;
    /// Per-round |1^T X(t) - 1^T X(0) - sum 1^T eps| and |sum a - N|.
    std::vector<double> mass_resid;
    std::vector<double> normalizer_resid;
};

struct ExperimentResult {
    MetricsLog log;
    RunSummary summary;
    std::optional<RunTrace> trace;
    std::vector<StateDumpRow> state_rows;
};

/// Initial parameters used by run_experiment.
std::vector<Vec> initial_parameters(std::size_t n, std::size_t d, double scale, std::uint64_t seed);

/// Runs T-1 rounds and records T metric rows (t = 0 .. T-1).
/// Throws PreconditionError if the topology is not B-connected over the horizon, NumericError on NaN/Inf
/// metrics or normalizer underflow.
ExperimentResult run_experiment(const Problem &problem, const GraphSpec &graph, const OptimizerSpec &optimizer,
                                const WeightingMethod &weighting, std::uint64_t horizon_t, std::uint64_t seed,
                                const RunOptions &options = {});

} // namespace pushsum
