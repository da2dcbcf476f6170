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

#include <gtest/gtest.h>

#include <cmath>

#include "pushsum/analysis.hpp"
#include "pushsum/error.hpp"
#include "support.hpp"

namespace pushsum {
namespace {

using testing_support::graph;
using testing_support::record_sequence;

MoreauParams moreau(double k = 0.5) {
    MoreauParams p;
    p.v = 0.1;
    p.steepness_k = k;
    return p;
}

std::vector<WeightMatrix> constant_uniform(std::size_t n, std::size_t rounds) {
    const EdgeSet e = EdgeSet::complete(n);
    const std::vector<std::vector<Vec>> none;
    return std::vector<WeightMatrix>(rounds, build_weight_matrix(UniformOutDegree{}, e, none));
}

TEST(BoundParams, HalfDelta) {
    const BoundParams p = compute_bound_params(0.5, 1, 1);
    EXPECT_DOUBLE_EQ(p.lemma_c, 8.0);
    EXPECT_DOUBLE_EQ(p.lambda, 0.5);
    EXPECT_DOUBLE_EQ(p.lemma_k, 2.0);
}

TEST(BoundParams, UnitDeltaGivesExactConsensus) {
    const BoundParams p = compute_bound_params(1.0, 1, 1);
    EXPECT_EQ(p.lambda, 0.0);
    EXPECT_DOUBLE_EQ(p.lemma_c, 4.0);
    EXPECT_EQ(p.lambda_pow(3), 0.0);
    EXPECT_EQ(p.lambda_pow(0), 1.0);
}

TEST(BoundParams, OriginalProtocolConstants) {
    for (std::size_t n : {2u, 3u, 4u}) {
        for (std::size_t b : {1u, 2u}) {
            const double nb = static_cast<double>(n * b);
            const BoundParams p = compute_bound_params(1.0 / static_cast<double>(n), n, b);
            EXPECT_NEAR(p.lemma_c / (4 * std::pow(n, nb)), 1.0, 1e-12);
            EXPECT_NEAR(p.lambda, std::pow(1 - std::pow(n, -nb), 1 / nb), 1e-12);
        }
    }
}

TEST(BoundParams, TinyDeltaKeepsLogLambda) {
    const BoundParams p = compute_bound_params(1e-3, 4, 2);
    EXPECT_LT(p.log_lambda, 0.0);
    EXPECT_NEAR(p.log_lambda, std::log1p(-1e-24) / 8, 1e-40);
}

TEST(BoundParams, RejectsBadInput) {
    EXPECT_THROW(compute_bound_params(0.0, 1, 1), PreconditionError);
    EXPECT_THROW(compute_bound_params(1.5, 1, 1), PreconditionError);
    EXPECT_THROW(compute_bound_params(0.5, 0, 1), PreconditionError);
    EXPECT_THROW(compute_bound_params(0.5, 1, 0), PreconditionError);
    EXPECT_THROW(compute_bound_params(1e-10, 100, 100), PreconditionError);
}

TEST(CompareRegimes, RatioIsN) {
    const BoundParams p = compute_bound_params(0.05, 1, 1);
    const auto [c, c_over_n] = compare_regimes(p, 16);
    EXPECT_DOUBLE_EQ(c, 80.0);
    EXPECT_DOUBLE_EQ(c_over_n, 5.0);
    const auto six = compare_regimes(p, 6);
    EXPECT_DOUBLE_EQ(six.first / six.second, 6.0);
    const auto one = compare_regimes(p, 1);
    EXPECT_DOUBLE_EQ(one.first / one.second, 1.0);
}

TEST(ProductErgodicity, ConstantAveragingMatrix) {
    const BoundParams p = compute_bound_params(0.5, 1, 1);
    const auto r = verify_lemma1(constant_uniform(2, 8), p);
    EXPECT_TRUE(r.passed);
    ASSERT_EQ(r.details.size(), 8u);
    for (std::size_t t = 1; t <= 8; ++t) EXPECT_DOUBLE_EQ(r.details[t - 1], 2 * std::pow(0.5, t - 1.0));
}

TEST(ProductErgodicity, IdentitySequenceRejected) {
    const std::vector<WeightMatrix> ids(5, WeightMatrix::unchecked(Matrix::identity(3)));
    EXPECT_THROW(verify_lemma1(ids, compute_bound_params(1.0, 1, 1)), PreconditionError);
    EXPECT_THROW(verify_lemma2(ids, compute_bound_params(1.0, 1, 1)), PreconditionError);
}

TEST(ProductErgodicity, RandomMoreauSequences) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto seq = record_sequence(graph(GraphKind::Random, 4, 3, seed), moreau(), 30, 2, seed, 0.1);
        const auto r = verify_lemma1(seq.weights, seq.params);
        EXPECT_TRUE(r.passed) << "seed " << seed << " margin " << r.worst_margin;
    }
}

TEST(ProductErgodicity, ProductsStayColumnStochastic) {
    const auto seq = record_sequence(graph(GraphKind::Random, 5, 2, 3), moreau(), 40, 2, 3, 0.1);
    const auto r = verify_lemma1(seq.weights, seq.params);
    EXPECT_LE(r.stats.at("max_column_sum_error"), 1e-9);
}

TEST(RowSumBound, UniformFullIsTight) {
    const BoundParams p = compute_bound_params(1.0 / 3, 1, 1);
    const auto r = verify_lemma2(constant_uniform(3, 6), p);
    EXPECT_TRUE(r.passed);
    EXPECT_NEAR(r.stats.at("min_row_sum"), 1.0, 1e-15);
    for (double m : r.details) EXPECT_NEAR(m, 0.0, 1e-12);
}

TEST(RowSumBound, EarlyRoundsUseSmallerThreshold) {
    const BoundParams p = compute_bound_params(1.0 / 3, 1, 2);
    const auto r = verify_lemma2(constant_uniform(3, 4), p);
    ASSERT_EQ(r.details.size(), 4u);
    EXPECT_NEAR(r.details[0], 1.0 - 1.0 / 9, 1e-12);
    EXPECT_NEAR(r.details[1], 1.0 - 3.0 / 9, 1e-12);
}

TEST(RowSumBound, RandomMoreauSequences) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const std::size_t n = 3 + seed % 4;
        const auto seq = record_sequence(graph(GraphKind::Random, n, 2, seed), moreau(), 30, 2, seed, 0.1);
        const auto r = verify_lemma2(seq.weights, seq.params);
        EXPECT_TRUE(r.passed) << "seed " << seed;
        EXPECT_GT(r.worst_margin, 0.0);
        EXPECT_GE(r.stats.at("improvement_factor"), static_cast<double>(n));
    }
}

TEST(ConsensusBound, ZeroPerturbationFullUniform) {
    const auto seq = record_sequence(graph(GraphKind::Full, 4, 1), UniformOutDegree{}, 20, 3, 1, 0.0);
    for (Norm norm : {Norm::L1, Norm::L2}) {
        const auto r = verify_theorem1(seq.trajectory, seq.params, norm);
        EXPECT_TRUE(r.passed);
        EXPECT_NEAR(r.stats.at("max_distance_over_bound"), 0.0, 1e-12);
    }
}

TEST(ConsensusBound, ZeroPerturbationMoreauDecays) {
    const auto seq = record_sequence(graph(GraphKind::Random, 4, 2, 5), moreau(), 100, 2, 5, 0.0);
    EXPECT_TRUE(verify_theorem1(seq.trajectory, seq.params, Norm::L1).passed);
    EXPECT_TRUE(verify_theorem1(seq.trajectory, seq.params, Norm::L2).passed);
    auto spread = [](const TrajectoryRound &r) {
        const Vec xbar = row_mean(r.x);
        double worst = 0.0;
        for (std::size_t i = 0; i < r.y.rows(); ++i) worst = std::max(worst, std::abs(r.y(i, 0) - xbar[0]));
        return worst;
    };
    EXPECT_LT(spread(seq.trajectory.rounds.back()), 1e-2 * spread(seq.trajectory.rounds.front()));
}

TEST(ConsensusBound, PerturbedRunsAllTopologies) {
    for (auto kind : {GraphKind::Full, GraphKind::Divide, GraphKind::Exp, GraphKind::Random}) {
        for (const WeightingMethod &m : {WeightingMethod{UniformOutDegree{}}, WeightingMethod{moreau()}}) {
            const auto seq = record_sequence(graph(kind, 6, 2, 4), m, 200, 3, 4, 0.1);
            EXPECT_TRUE(verify_theorem1(seq.trajectory, seq.params, Norm::L1).passed) << to_string(kind);
            EXPECT_TRUE(verify_theorem1(seq.trajectory, seq.params, Norm::L2).passed) << to_string(kind);
        }
    }
}

TEST(ConsensusBound, BoundRegimes) {
    const BoundParams p = compute_bound_params(0.5, 2, 1);
    // t < Delta B: coefficient C; t >= Delta B: C / N.
    EXPECT_DOUBLE_EQ(consensus_bound(p, 4, Norm::L1, 1, 1.0, 0.0), p.lemma_c * p.lambda_pow(0));
    EXPECT_DOUBLE_EQ(consensus_bound(p, 4, Norm::L1, 2, 1.0, 0.0), p.lemma_c / 4 * p.lambda_pow(1));
    EXPECT_DOUBLE_EQ(consensus_bound(p, 4, Norm::L2, 1, 1.0, 0.0), p.lemma_c * 2 * p.lambda_pow(0));
    EXPECT_DOUBLE_EQ(consensus_bound(p, 4, Norm::L2, 2, 1.0, 0.0), p.lemma_c / 2 * p.lambda_pow(1));
}

TEST(Analysis, SupportGraph) {
    const auto w = WeightMatrix::unchecked(Matrix::from_rows({{0.5, 0.0}, {0.5, 1.0}}));
    const EdgeSet e = support_graph(w);
    EXPECT_TRUE(e.contains(0, 1));
    EXPECT_FALSE(e.contains(1, 0));
    EXPECT_TRUE(e.contains(0, 0));
}

} // namespace
} // namespace pushsum
