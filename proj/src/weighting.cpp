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

#include "pushsum/weighting.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <string>

#include "pushsum/error.hpp"

namespace pushsum {

void MoreauParams::validate() const {
    if (!(v > 0.0 && v < 1.0)) throw ConfigError("weighting: Moreau v must lie in (0, 1)");
    if (!(steepness_k > 0.0)) throw ConfigError("weighting: Moreau k must be > 0");
    if (!(step_gamma > 0.0)) throw ConfigError("weighting: Moreau step_gamma must be > 0");
}

double WeightMatrix::min_nonzero() const noexcept {
    double m = std::numeric_limits<double>::infinity();
    for (double x : m_.data())
        if (x > 0.0) m = std::min(m, x);
    return m;
}

double c_prime(double dist_sq, const MoreauParams &p) noexcept {
    const double scale = (1.0 - p.v) / (2.0 * p.step_gamma * (1.0 + p.v));
    return scale * (1.0 + p.v - std::exp(-p.steepness_k * dist_sq));
}

Vec moreau_column(const EdgeSet &edges, std::size_t i, std::span<const Vec> buffer_row, const MoreauParams &p) {
    const std::size_t n = edges.n_nodes();
    if (buffer_row.size() != n) throw ShapeError("moreau_column: buffer row must hold N vectors");
    if (!edges.contains(i, i)) throw PreconditionError("moreau_column: node lacks its self-loop");

    Vec col(n, 0.0);
    const auto k_i = static_cast<double>(edges.out_degree(i));
    double given = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (j == i || !edges.contains(i, j)) continue;
        const double w = 2.0 * p.step_gamma / k_i * c_prime(squared_distance(buffer_row[i], buffer_row[j]), p);
        col[j] = w;
        given += w;
    }
    col[i] = 1.0 - given;
    // Each neighbor term is < (1-v)/K_i, so the self weight stays >= (1 + (K_i-1) v)/K_i > v.
    assert(col[i] > 0.0);
    return col;
}

Vec uniform_column(const EdgeSet &edges, std::size_t i) {
    if (!edges.contains(i, i)) throw PreconditionError("uniform_column: node lacks its self-loop");
    const std::size_t n = edges.n_nodes();
    Vec col(n, 0.0);
    const double w = 1.0 / static_cast<double>(edges.out_degree(i));
    for (std::size_t j = 0; j < n; ++j)
        if (edges.contains(i, j)) col[j] = w;
    return col;
}

WeightMatrix assemble_matrix(std::span<const Vec> columns, const EdgeSet &edges) {
    const std::size_t n = edges.n_nodes();
    if (columns.size() != n) throw ShapeError("assemble_matrix: expected N columns");
    Matrix m(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        if (columns[j].size() != n) throw ShapeError("assemble_matrix: column length must be N");
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = columns[j][i];
            if (!(w >= 0.0) || !std::isfinite(w))
                throw PreconditionError("assemble_matrix: negative or non-finite weight in column " + std::to_string(j));
            if (w > 0.0 && !edges.contains(j, i))
                throw PreconditionError("assemble_matrix: weight on missing edge (" + std::to_string(j) + "," +
                                        std::to_string(i) + ")");
            m(i, j) = w;
            sum += w;
        }
        if (std::abs(sum - 1.0) > kColumnSumTolerance)
            throw PreconditionError("assemble_matrix: column " + std::to_string(j) + " sums to " + std::to_string(sum));
        if (!(m(j, j) > 0.0)) throw PreconditionError("assemble_matrix: zero self weight in column " + std::to_string(j));
    }
    return WeightMatrix(std::move(m));
}

bool check_definition1(const WeightMatrix &w, const EdgeSet &edges, double delta) {
    const std::size_t n = w.n_nodes();
    if (n != edges.n_nodes() || !(delta > 0.0)) return false;
    for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double x = w(i, j);
            if (x < 0.0) return false;
            if ((x > 0.0) != edges.contains(j, i)) return false;
            if (x > 0.0 && x < delta) return false;
            sum += x;
        }
        if (std::abs(sum - 1.0) > kColumnSumTolerance) return false;
    }
    return true;
}

double analytic_delta(const WeightingMethod &method, std::size_t k_max) {
    if (k_max == 0) throw ShapeError("analytic_delta: k_max must be >= 1");
    const auto k = static_cast<double>(k_max);
    if (const auto *p = std::get_if<MoreauParams>(&method)) return std::min(p->v, (1.0 - p->v) * p->v / ((1.0 + p->v) * k));
    return 1.0 / k;
}

WeightMatrix build_weight_matrix(const WeightingMethod &method, const EdgeSet &edges,
                                 std::span<const std::vector<Vec>> buffers) {
    const std::size_t n = edges.n_nodes();
    std::vector<Vec> columns(n);
    if (const auto *p = std::get_if<MoreauParams>(&method)) {
        if (buffers.size() != n) throw ShapeError("build_weight_matrix: need one buffer row per node");
        for (std::size_t i = 0; i < n; ++i) columns[i] = moreau_column(edges, i, buffers[i], *p);
    } else {
        for (std::size_t i = 0; i < n; ++i) columns[i] = uniform_column(edges, i);
    }
    return assemble_matrix(columns, edges);
}

} // namespace pushsum
