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

#include "pushsum/topology.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <queue>

#include "pushsum/error.hpp"
#include "pushsum/rng.hpp"

namespace pushsum {

std::string_view to_string(GraphKind kind) noexcept {
    switch (kind) {
    case GraphKind::Full: return "Full";
    case GraphKind::Divide: return "Divide";
    case GraphKind::Exp: return "Exp";
    case GraphKind::Random: return "Random";
    }
    return "?";
}

GraphKind parse_graph_kind(std::string_view name) {
    for (auto k : {GraphKind::Full, GraphKind::Divide, GraphKind::Exp, GraphKind::Random})
        if (to_string(k) == name) return k;
    throw ConfigError("unknown topology kind '" + std::string(name) + "' (expected Full, Divide, Exp or Random)");
}

// EdgeSet

EdgeSet EdgeSet::self_loops(std::size_t n) {
    EdgeSet e(n);
    for (std::size_t i = 0; i < n; ++i) e.insert(i, i);
    return e;
}

EdgeSet EdgeSet::complete(std::size_t n) {
    EdgeSet e(n);
    std::fill(e.adj_.begin(), e.adj_.end(), std::uint8_t{1});
    return e;
}

void EdgeSet::check_index(std::size_t i) const {
    if (i >= n_) throw ShapeError("node index " + std::to_string(i) + " out of range [0, " + std::to_string(n_) + ")");
}

void EdgeSet::insert(std::size_t from, std::size_t to) {
    check_index(from);
    check_index(to);
    adj_[from * n_ + to] = 1;
}

bool EdgeSet::contains(std::size_t from, std::size_t to) const {
    check_index(from);
    check_index(to);
    return adj_[from * n_ + to] != 0;
}

std::size_t EdgeSet::size() const noexcept {
    return static_cast<std::size_t>(std::count(adj_.begin(), adj_.end(), std::uint8_t{1}));
}

std::vector<std::pair<std::size_t, std::size_t>> EdgeSet::edges() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t j = 0; j < n_; ++j)
            if (adj_[i * n_ + j]) out.emplace_back(i, j);
    return out;
}

std::size_t EdgeSet::out_degree(std::size_t i) const {
    check_index(i);
    const auto *r = adj_.data() + i * n_;
    return static_cast<std::size_t>(std::count(r, r + n_, std::uint8_t{1}));
}

// GraphSpec

ClusterSplit ClusterSplit::halves(std::size_t n) {
    ClusterSplit s;
    for (std::size_t i = 0; i < n; ++i) (i < n / 2 ? s.cluster0 : s.cluster1).push_back(i);
    return s;
}

std::size_t exp_cycle_length(std::size_t n) noexcept {
    if (n <= 2) return 1;
    return static_cast<std::size_t>(std::bit_width(n - 1));
}

void GraphSpec::validate() const {
    if (n_nodes < 2) throw ConfigError("topology: n_nodes must be >= 2");
    if (period_b < 1) throw ConfigError("topology: period_b must be >= 1");
    if (!(p_inner >= 0.0 && p_inner <= 1.0) || !(p_inter >= 0.0 && p_inter <= 1.0))
        throw ConfigError("topology: probabilities must lie in [0, 1]");
    if (kind == GraphKind::Exp && period_b < exp_cycle_length(n_nodes))
        throw ConfigError("topology: Exp needs period_b >= ceil(log2 N) = " + std::to_string(exp_cycle_length(n_nodes)) +
                          " for every window to be strongly connected");
    if (kind == GraphKind::Divide || kind == GraphKind::Random) {
        std::vector<int> seen(n_nodes, 0);
        for (const auto *cluster : {&cluster_split.cluster0, &cluster_split.cluster1}) {
            if (cluster->empty()) throw ConfigError("topology: both clusters must be non-empty");
            for (std::size_t v : *cluster) {
                if (v >= n_nodes) throw ConfigError("topology: cluster_split index out of range");
                ++seen[v];
            }
        }
        if (std::any_of(seen.begin(), seen.end(), [](int c) { return c != 1; }))
            throw ConfigError("topology: cluster_split must cover every node exactly once");
    }
}

std::vector<int> GraphSpec::cluster_of() const {
    std::vector<int> c(n_nodes, 0);
    if (kind == GraphKind::Divide || kind == GraphKind::Random)
        for (std::size_t v : cluster_split.cluster1)
            if (v < n_nodes) c[v] = 1;
    return c;
}

EdgeSet generate_edges(const GraphSpec &spec, std::uint64_t t) {
    const std::size_t n = spec.n_nodes;
    switch (spec.kind) {
    case GraphKind::Full: return EdgeSet::complete(n);

    case GraphKind::Divide: {
        EdgeSet e = EdgeSet::self_loops(n);
        for (const auto *cluster : {&spec.cluster_split.cluster0, &spec.cluster_split.cluster1})
            for (std::size_t a : *cluster)
                for (std::size_t b : *cluster) e.insert(a, b);
        const std::size_t bridge0 =
            *std::min_element(spec.cluster_split.cluster0.begin(), spec.cluster_split.cluster0.end());
        const std::size_t bridge1 =
            *std::min_element(spec.cluster_split.cluster1.begin(), spec.cluster_split.cluster1.end());
        e.insert(bridge0, bridge1);
        e.insert(bridge1, bridge0);
        return e;
    }

    case GraphKind::Exp: {
        EdgeSet e = EdgeSet::self_loops(n);
        const std::uint64_t offset = std::uint64_t{1} << (t % exp_cycle_length(n));
        for (std::size_t i = 0; i < n; ++i) e.insert(i, static_cast<std::size_t>((i + offset) % n));
        return e;
    }

    case GraphKind::Random: {
        if (t % spec.period_b == 0) return EdgeSet::complete(n);
        EdgeSet e = EdgeSet::self_loops(n);
        const auto cluster = spec.cluster_of();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                if (i == j) continue;
                const double p = cluster[i] == cluster[j] ? spec.p_inner : spec.p_inter;
                const auto k = rng::key(rng::Stream::Topology, {spec.seed, t, i, j});
                if (rng::uniform(k, 0) < p) e.insert(i, j);
            }
        return e;
    }
    }
    return EdgeSet::self_loops(n);
}

EdgeSet aggregate_window(std::span<const EdgeSet> window) {
    if (window.empty()) throw ShapeError("aggregate_window: empty window");
    const std::size_t n = window.front().n_nodes();
    EdgeSet u(n);
    for (const auto &e : window) {
        if (e.n_nodes() != n) throw ShapeError("aggregate_window: edge sets disagree on N");
        for (const auto &[a, b] : e.edges()) u.insert(a, b);
    }
    return u;
}

std::vector<std::size_t> out_neighbors(const EdgeSet &e, std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t s = 0; s < e.n_nodes(); ++s)
        if (e.contains(i, s)) out.push_back(s);
    return out;
}

std::vector<std::size_t> in_neighbors(const EdgeSet &e, std::size_t i) {
    std::vector<std::size_t> in;
    for (std::size_t j = 0; j < e.n_nodes(); ++j)
        if (e.contains(j, i)) in.push_back(j);
    return in;
}

std::optional<std::size_t> directed_diameter(const EdgeSet &e) {
    const std::size_t n = e.n_nodes();
    constexpr auto unseen = std::numeric_limits<std::size_t>::max();
    std::size_t diameter = 0;
    std::vector<std::size_t> dist(n);
    for (std::size_t src = 0; src < n; ++src) {
        std::fill(dist.begin(), dist.end(), unseen);
        dist[src] = 0;
        std::queue<std::size_t> q;
        q.push(src);
        while (!q.empty()) {
            const std::size_t u = q.front();
            q.pop();
            for (std::size_t v = 0; v < n; ++v)
                if (dist[v] == unseen && e.contains(u, v)) {
                    dist[v] = dist[u] + 1;
                    q.push(v);
                }
        }
        for (std::size_t v = 0; v < n; ++v) {
            if (dist[v] == unseen) return std::nullopt;
            diameter = std::max(diameter, dist[v]);
        }
    }
    return std::max<std::size_t>(diameter, 1);
}

ConnectivityReport check_windows(std::span<const EdgeSet> rounds, std::size_t period_b) {
    if (period_b == 0) throw ShapeError("check_windows: period_b must be >= 1");
    if (rounds.size() < period_b) throw ShapeError("check_windows: horizon shorter than B");
    const std::size_t windows = rounds.size() - period_b + 1;

    std::vector<std::optional<std::size_t>> diam(windows);
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t w = 0; w < static_cast<std::ptrdiff_t>(windows); ++w) {
        const auto start = static_cast<std::size_t>(w);
        diam[start] = directed_diameter(aggregate_window(rounds.subspan(start, period_b)));
    }

    ConnectivityReport report;
    // Every round needs all self-loops; the first window holding a deficient round fails.
    for (std::size_t k = 0; k < rounds.size(); ++k)
        for (std::size_t i = 0; i < rounds[k].n_nodes(); ++i)
            if (!rounds[k].contains(i, i)) {
                report.first_violating_window = k + 1 >= period_b ? k + 2 - period_b : 1;
                return report;
            }
    for (const auto &e : rounds)
        for (std::size_t i = 0; i < e.n_nodes(); ++i) report.max_out_degree = std::max(report.max_out_degree, e.out_degree(i));

    std::size_t delta = 0;
    for (std::size_t w = 0; w < windows; ++w) {
        if (!diam[w]) {
            report.first_violating_window = w + 1;
            return report;
        }
        delta = std::max(delta, *diam[w]);
    }
    report.is_b_strongly_connected = true;
    report.diameter_delta = delta;
    return report;
}

ConnectivityReport validate_assumption1(const GraphSpec &spec, std::uint64_t horizon) {
    spec.validate();
    if (horizon < spec.period_b) throw ShapeError("validate_assumption1: horizon T must be >= B");
    std::vector<EdgeSet> rounds;
    rounds.reserve(horizon);
    for (std::uint64_t t = 1; t <= horizon; ++t) rounds.push_back(generate_edges(spec, t));
    return check_windows(rounds, spec.period_b);
}

} // namespace pushsum
