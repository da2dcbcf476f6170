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
#include <vector>
#include <vector>

#include "pushsum/matrix.hpp"
#include "pushsum/topology.hpp"
#include "pushsum/weighting.hpp"

namespace pushsum {

/// Normalizers at or below this abort the run.
inline constexpr double kNormalizerFloor = 1e-300;

struct NodeState {
    Vec x;
    double a = 1.0;
    Vec y;
    /// buffer[j]: this node's last-known copy of node j's parameter.
    std::vector<Vec> buffer;
};

struct NetworkState {
    std::vector<NodeState> nodes;
    std::uint64_t round = 0;
    std::size_t period_b = 1;
    /// Edge sets of the last period_b rounds, oldest first.
    std::vector<EdgeSet> link_history;

    [[nodiscard]] std::size_t n_nodes() const noexcept { return nodes.size(); }
    [[nodiscard]] std::size_t dim() const noexcept { return nodes.empty() ? 0 : nodes.front().x.size(); }

    [[nodiscard]] Matrix x_matrix() const;
    [[nodiscard]] Matrix y_matrix() const;
    [[nodiscard]] Vec a_vector() const;
    /// Network average parameter (1/N) sum_i x_i.
    [[nodiscard]] Vec average() const;
};

/// Per-node perturbations, one row per node.
using Perturbation = Matrix;

/// x_i = y_i = x0_i, a_i = 1, every buffer entry = x0_i, round 0. Throws ShapeError on ragged input.
NetworkState init_network(const std::vector<Vec> &x0, std::size_t period_b = 1);

/// Advances one synchronous round in place and returns the weight matrix it used:
/// half step x + eps, weight columns from the pre-update buffers, buffer refresh,
/// mixing of x and a, then y = x / a. Throws NumericError if a normalizer underflows.
WeightMatrix protocol_round(NetworkState &state, const Perturbation &eps, const EdgeSet &edges,
                            const WeightingMethod &method);

struct MatrixFormState {
    Matrix x;
    Vec a;
    Matrix y;
};

/// Oracle: X <- W (X + eps), a <- W a, Y_i = X_i / a_i, via the serial reference kernels.
MatrixFormState matrix_form_round(const Matrix &x, std::span<const double> a, const Matrix &eps, const WeightMatrix &w);

enum class Norm { L1, L2 };

/// ||y_i - xbar|| per node.
Vec consensus_distance(const NetworkState &state, Norm norm);

} // namespace pushsum
