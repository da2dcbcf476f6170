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

#include <vector>

#include "pushsum/analysis.hpp"
#include "pushsum/protocol.hpp"
#include "pushsum/rng.hpp"
#include "pushsum/topology.hpp"
#include "pushsum/weighting.hpp"

namespace pushsum::testing_support {

inline std::vector<Vec> random_points(std::size_t n, std::size_t d, std::uint64_t seed, double scale = 1.0) {
    std::vector<Vec> out(n, Vec(d));
    const auto k = rng::key(rng::Stream::Init, {seed, 0x5eed});
    std::uint64_t c = 0;
    for (auto &v : out)
        for (double &x : v) x = scale * rng::normal(k, c++);
    return out;
}

inline GraphSpec graph(GraphKind kind, std::size_t n, std::size_t b, std::uint64_t seed = 0) {
    GraphSpec g;
    g.kind = kind;
    g.n_nodes = n;
    g.period_b = kind == GraphKind::Exp ? std::max(b, exp_cycle_length(n)) : b;
    g.seed = seed;
    g.cluster_split = ClusterSplit::halves(n);
    return g;
}

/// A recorded weight/trajectory sequence with bound constants derived from what it actually used.
struct RecordedSequence {
    std::vector<EdgeSet> edges;
    std::vector<WeightMatrix> weights;
    Trajectory trajectory;
    BoundParams params;
};

inline RecordedSequence record_sequence(const GraphSpec &g, const WeightingMethod &method, std::uint64_t rounds,
                                        std::size_t dim, std::uint64_t seed, double eps_scale) {
    RecordedSequence out;
    NetworkState s = init_network(random_points(g.n_nodes, dim, seed), g.period_b);
    out.trajectory.x0 = s.x_matrix();
    const auto k = rng::key(rng::Stream::GradientNoise, {seed, 0xe95});
    std::uint64_t c = 0;
    for (std::uint64_t t = 1; t <= rounds; ++t) {
        Matrix eps(g.n_nodes, dim);
        for (double &v : eps.data()) v = eps_scale * rng::normal(k, c++);
        out.edges.push_back(generate_edges(g, t));
        out.weights.push_back(protocol_round(s, eps, out.edges.back(), method));
        out.trajectory.rounds.push_back({s.x_matrix(), s.a_vector(), s.y_matrix(), eps});
    }
    const ConnectivityReport rep = check_windows(out.edges, g.period_b);
    const double delta = analytic_delta(method, rep.max_out_degree);
    out.params = compute_bound_params(delta, rep.diameter_delta.value_or(1), g.period_b);
    return out;
}

} // namespace pushsum::testing_support
