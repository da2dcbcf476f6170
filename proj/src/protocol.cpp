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

#include "pushsum/protocol.hpp"

#include <cmath>
#include <string>

#include "pushsum/error.hpp"
#include "pushsum/kernels.hpp"

namespace pushsum {

Matrix NetworkState::x_matrix() const {
    Matrix m(n_nodes(), dim());
    for (std::size_t i = 0; i < n_nodes(); ++i) std::copy(nodes[i].x.begin(), nodes[i].x.end(), m.row(i).begin());
    return m;
}

Matrix NetworkState::y_matrix() const {
    Matrix m(n_nodes(), dim());
    for (std::size_t i = 0; i < n_nodes(); ++i) std::copy(nodes[i].y.begin(), nodes[i].y.end(), m.row(i).begin());
    return m;
}

Vec NetworkState::a_vector() const {
    Vec a(n_nodes());
    for (std::size_t i = 0; i < n_nodes(); ++i) a[i] = nodes[i].a;
    return a;
}

Vec NetworkState::average() const {
    Vec s(dim(), 0.0);
    for (const auto &node : nodes)
        for (std::size_t k = 0; k < s.size(); ++k) s[k] += node.x[k];
    const double inv = nodes.empty() ? 0.0 : 1.0 / static_cast<double>(nodes.size());
    for (double &v : s) v *= inv;
    return s;
}

NetworkState init_network(const std::vector<Vec> &x0, std::size_t period_b) {
    if (period_b == 0) throw ShapeError("init_network: period_b must be >= 1");
    NetworkState s;
    s.period_b = period_b;
    const std::size_t n = x0.size();
    if (n == 0) throw ShapeError("init_network: need at least one node");
    const std::size_t d = x0.front().size();
    s.nodes.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (x0[i].size() != d) throw ShapeError("init_network: all initial vectors must have the same length");
        auto &node = s.nodes[i];
        node.x = x0[i];
        node.a = 1.0;
        node.y = x0[i];
        node.buffer.assign(n, x0[i]);
    }
    return s;
}

WeightMatrix protocol_round(NetworkState &state, const Perturbation &eps, const EdgeSet &edges,
                            const WeightingMethod &method) {
    const std::size_t n = state.n_nodes();
    const std::size_t d = state.dim();
    if (eps.rows() != n || eps.cols() != d) throw ShapeError("protocol_round: perturbation must be N x d");
    if (edges.n_nodes() != n) throw ShapeError("protocol_round: edge set size differs from N");

    // Half step.
    for (std::size_t i = 0; i < n; ++i) {
        const auto e = eps.row(i);
        for (std::size_t k = 0; k < d; ++k) state.nodes[i].x[k] += e[k];
    }

    // Weights come from the buffers as they stood before this round's refresh.
    std::vector<std::vector<Vec>> buffers;
    if (is_moreau(method)) {
        buffers.reserve(n);
        for (const auto &node : state.nodes) buffers.push_back(node.buffer);
    }
    WeightMatrix w = build_weight_matrix(method, edges, buffers);

    state.link_history.push_back(edges);
    while (state.link_history.size() > state.period_b) state.link_history.erase(state.link_history.begin());
    const EdgeSet recent = aggregate_window(state.link_history);

    for (std::size_t i = 0; i < n; ++i) {
        auto &buf = state.nodes[i].buffer;
        for (std::size_t j = 0; j < n; ++j) {
            if (edges.contains(j, i))
                buf[j] = state.nodes[j].x;
            else if (!recent.contains(j, i))
                buf[j] = state.nodes[i].x;
        }
    }

    // Node i combines what it received: x_i = sum_j w(i,j) x_j^{half}, a_i likewise.
    std::vector<Vec> new_x(n, Vec(d, 0.0));
    Vec new_a(n, 0.0);
#pragma omp parallel for schedule(static) if (n * n * d >= 16384)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        auto &xi = new_x[i];
        double ai = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double wij = w(i, j);
            if (wij == 0.0) continue;
            const auto &xj = state.nodes[j].x;
            for (std::size_t k = 0; k < d; ++k) xi[k] += wij * xj[k];
            ai += wij * state.nodes[j].a;
        }
        new_a[i] = ai;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!(new_a[i] > kNormalizerFloor))
            throw NumericError("protocol_round: normalizer of node " + std::to_string(i) + " underflowed at round " +
                               std::to_string(state.round + 1));
        auto &node = state.nodes[i];
        node.x = std::move(new_x[i]);
        node.a = new_a[i];
        node.y.resize(d);
        for (std::size_t k = 0; k < d; ++k) node.y[k] = node.x[k] / node.a;
    }
    ++state.round;
    return w;
}

MatrixFormState matrix_form_round(const Matrix &x, std::span<const double> a, const Matrix &eps, const WeightMatrix &w) {
    if (x.rows() != eps.rows() || x.cols() != eps.cols()) throw ShapeError("matrix_form_round: X and eps differ in shape");
    if (x.rows() != a.size() || w.n_nodes() != x.rows()) throw ShapeError("matrix_form_round: N mismatch");
    Matrix half = x;
    for (std::size_t idx = 0; idx < half.data().size(); ++idx) half.data()[idx] += eps.data()[idx];

    MatrixFormState out;
    out.x = kernels::serial::matmul(w.matrix(), half);
    out.a = kernels::serial::matvec(w.matrix(), a);
    out.y = out.x;
    for (std::size_t i = 0; i < out.y.rows(); ++i)
        for (double &v : out.y.row(i)) v /= out.a[i];
    return out;
}

Vec consensus_distance(const NetworkState &state, Norm norm) {
    const Vec xbar = state.average();
    Vec out(state.n_nodes());
    Vec diff(state.dim());
    for (std::size_t i = 0; i < state.n_nodes(); ++i) {
        for (std::size_t k = 0; k < diff.size(); ++k) diff[k] = state.nodes[i].y[k] - xbar[k];
        out[i] = norm == Norm::L1 ? norm_l1(diff) : norm_l2(diff);
    }
    return out;
}

} // namespace pushsum
