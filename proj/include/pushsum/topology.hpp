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

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace pushsum {

enum class GraphKind { Full, Divide, Exp, Random };

std::string_view to_string(GraphKind kind) noexcept;
/// Throws ConfigError for unknown names.
GraphKind parse_graph_kind(std::string_view name);

/// Directed edge set of one round. (i, j) means i can send to j.
class EdgeSet {
  public:
    EdgeSet() = default;
    /// Empty edge set on n nodes (no self-loops yet).
    explicit EdgeSet(std::size_t n) : n_(n), adj_(n * n, 0) {}

    /// Self-loops on every node and nothing else.
    static EdgeSet self_loops(std::size_t n);
    static EdgeSet complete(std::size_t n);

    [[nodiscard]] std::size_t n_nodes() const noexcept { return n_; }

    void insert(std::size_t from, std::size_t to);
    [[nodiscard]] bool contains(std::size_t from, std::size_t to) const;

    [[nodiscard]] std::size_t size() const noexcept;
    [[nodiscard]] std::vector<std::pair<std::size_t, std::size_t>> edges() const;

    /// Number of (i, s) edges, self-loop included.
    [[nodiscard]] std::size_t out_degree(std::size_t i) const;

    bool operator==(const EdgeSet &) const = default;

  private:
    void check_index(std::size_t i) const;

    std::size_t n_ = 0;
    std::vector<std::uint8_t> adj_;
};

struct ClusterSplit {
    std::vector<std::size_t> cluster0;
    std::vector<std::size_t> cluster1;

    /// First floor(n/2) nodes in cluster 0, the rest in cluster 1.
    static ClusterSplit halves(std::size_t n);

    bool operator==(const ClusterSplit &) const = default;
};

struct GraphSpec {
    GraphKind kind = GraphKind::Full;
    std::size_t n_nodes = 2;
    std::size_t period_b = 1;
    double p_inner = 0.5;
    double p_inter = 0.25;
    ClusterSplit cluster_split;
    std::uint64_t seed = 0;

    /// Throws ConfigError if any invariant is violated.
    void validate() const;

    /// 0 or 1 for each node (Divide/Random); all zeros for other kinds.
    [[nodiscard]] std::vector<int> cluster_of() const;

    bool operator==(const GraphSpec &) const = default;
};

/// Number of distinct Exp offsets, ceil(log2 N) (at least 1).
std::size_t exp_cycle_length(std::size_t n) noexcept;

/// Edges of round t (t >= 1). Deterministic in (spec, t).
EdgeSet generate_edges(const GraphSpec &spec, std::uint64_t t);

/// Union of the given edge sets. Throws ShapeError on mismatched N or empty input.
EdgeSet aggregate_window(std::span<const EdgeSet> window);

/// {s : (i, s) in e}; always contains i for generated edge sets.
std::vector<std::size_t> out_neighbors(const EdgeSet &e, std::size_t i);
/// {j : (j, i) in e}.
std::vector<std::size_t> in_neighbors(const EdgeSet &e, std::size_t i);

/// Directed diameter (max shortest-path hop count over ordered pairs),
/// or nullopt if the graph is not strongly connected.
std::optional<std::size_t> directed_diameter(const EdgeSet &e);

struct ConnectivityReport {
    bool is_b_strongly_connected = false;
    std::optional<std::size_t> diameter_delta;
    std::optional<std::uint64_t> first_violating_window;
    /// Largest out-degree (self-loop included) seen over the horizon.
    std::size_t max_out_degree = 0;
};

/// Checks every window [t, t+B-1], t in [1, T-B+1]. Requires T >= B.
ConnectivityReport validate_assumption1(const GraphSpec &spec, std::uint64_t horizon);

/// Same check on an explicit edge sequence (element k is round k+1).
ConnectivityReport check_windows(std::span<const EdgeSet> rounds, std::size_t period_b);

} // namespace pushsum
