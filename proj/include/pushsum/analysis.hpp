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
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pushsum/matrix.hpp"
#include "pushsum/protocol.hpp"
#include "pushsum/weighting.hpp"

namespace pushsum {

/// Absolute slack granted to every bound check.
inline constexpr double kBoundSlack = 1e-9;

/// Constants of the consensus bounds for a given (delta, Delta, B).
struct BoundParams {
    double delta = 1.0;
    std::size_t diameter_delta = 1;
    std::size_t period_b = 1;
    /// delta^{Delta B}.
    double delta_pow = 1.0;
    /// C = 4 / delta^{Delta B}.
    double lemma_c = 4.0;
    /// lambda = (1 - delta^{Delta B})^{1/(Delta B)}; may round to 1.0 when delta^{Delta B} < 1e-16.
    double lambda = 0.0;
    /// log(lambda) computed via log1p, exact even when lambda rounds to 1.
    double log_lambda = 0.0;
    double lemma_k = 2.0;

    [[nodiscard]] std::size_t window() const noexcept { return diameter_delta * period_b; }
    /// lambda^n (n may be negative).
    [[nodiscard]] double lambda_pow(double n) const noexcept;
};

/// Throws PreconditionError for delta outside (0, 1], Delta or B of zero, or delta^{Delta B} underflowing to 0.
BoundParams compute_bound_params(double delta, std::size_t diameter_delta, std::size_t period_b);

struct VerificationReport {
    std::string check;
    bool passed = false;
    /// bound - observed at the most adverse point (negative means violated beyond slack when < -1e-9).
    double worst_margin = 0.0;
    std::uint64_t worst_round = 0;
    /// One value per round (the round's worst margin unless documented otherwise).
    std::vector<double> details;
    /// Auxiliary scalars (e.g. measured improvement factor).
    std::map<std::string, double> stats;
};

/// One recorded protocol round: state after the round and the perturbation applied in it.
struct TrajectoryRound {
    Matrix x;
    Vec a;
    Matrix y;
    Matrix eps;
};

struct Trajectory {
    Matrix x0;
    std::vector<TrajectoryRound> rounds;
};

/// Sparsity graph of a weight matrix: edge (j, i) whenever w(i, j) > 0.
EdgeSet support_graph(const WeightMatrix &w);

/// Geometric ergodicity check on brute-force backward products P(t,s) = W(t)...W(s).
/// phi(t) is estimated as the row means of P(t,1); asserts |P(t,s)_ij - phi_i(t)| <= 2 lambda^{t-s} for all s <= t.
/// Throws PreconditionError if a matrix breaks Definition 1 (with params.delta) or the sparsity graphs break
/// B-strong connectivity with diameter <= params.diameter_delta.
VerificationReport verify_lemma1(std::span<const WeightMatrix> w_sequence, const BoundParams &params);

/// Row-sum lower bound check: r(t) = min_i [W(t)...W(1) 1]_i >= delta^{Delta B} (t < Delta B) or N delta^{Delta B} (t >= Delta B).
/// stats["improvement_factor"] is min over t >= Delta B of r(t) / delta^{Delta B}.
VerificationReport verify_lemma2(std::span<const WeightMatrix> w_sequence, const BoundParams &params);

/// Per-round consensus bound of a recorded trajectory, L1 (entrywise matrix norms) or L2 (Frobenius).
VerificationReport verify_theorem1(const Trajectory &trajectory, const BoundParams &params, Norm norm);

/// Value of the consensus bound at round t given ||X0|| and the discounted perturbation sum
/// sum_{s<=t} lambda^{t-s} ||eps(s)||.
double consensus_bound(const BoundParams &params, std::size_t n_nodes, Norm norm, std::uint64_t t, double x0_norm,
                       double discounted_eps);

/// (C, C/N): the t >= Delta B coefficient without and with the row-sum improvement.
std::pair<double, double> compare_regimes(const BoundParams &params, std::size_t n_nodes);

} // namespace pushsum
