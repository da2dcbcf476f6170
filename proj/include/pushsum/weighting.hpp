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

#include <span>
#include <variant>
#include <vector>

#include "pushsum/matrix.hpp"
#include "pushsum/topology.hpp"

namespace pushsum {

/// Hyperparameters of the Moreau weighting rule.
struct MoreauParams {
    double v = 0.1;
    double steepness_k = 0.01;
    /// Step size gamma. It cancels in the weights (2*gamma multiplies C', which carries 1/(2*gamma)).
    double step_gamma = 1.0;

    void validate() const;
    bool operator==(const MoreauParams &) const = default;
};

/// Original Push-SUM rule: 1/out-degree to every out-neighbor, self included.
struct UniformOutDegree {
    bool operator==(const UniformOutDegree &) const = default;
};

using WeightingMethod = std::variant<UniformOutDegree, MoreauParams>;

[[nodiscard]] inline bool is_moreau(const WeightingMethod &m) noexcept { return std::holds_alternative<MoreauParams>(m); }

/// Column tolerance for stochasticity checks.
inline constexpr double kColumnSumTolerance = 1e-12;

/// N x N mixing matrix; entry (i, j) is the weight node j applies to what it sends toward i.
/// Only assemble_matrix() produces one, so every instance is column stochastic and
/// respects the sparsity of the edges it was built for.
class WeightMatrix {
  public:
    WeightMatrix() = default;

    [[nodiscard]] std::size_t n_nodes() const noexcept { return m_.rows(); }
    [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }
    [[nodiscard]] const Matrix &matrix() const noexcept { return m_; }

    /// Smallest strictly positive entry.
    [[nodiscard]] double min_nonzero() const noexcept;

    /// Wraps a raw matrix without validation. Test hooks use this to build
    /// deliberately non-compliant inputs for the verifiers.
    static WeightMatrix unchecked(Matrix m) { return WeightMatrix(std::move(m)); }

  private:
    explicit WeightMatrix(Matrix m) : m_(std::move(m)) {}
    friend WeightMatrix assemble_matrix(std::span<const Vec> columns, const EdgeSet &edges);

    Matrix m_;
};

/// C'(dist_sq) = (1-v)/(2 gamma (1+v)) * (1 + v - exp(-k dist_sq)).
double c_prime(double dist_sq, const MoreauParams &p) noexcept;

/// Weight column of node i from its own buffer row (buffer_row[j] is i's copy of x_j).
Vec moreau_column(const EdgeSet &edges, std::size_t i, std::span<const Vec> buffer_row, const MoreauParams &p);

Vec uniform_column(const EdgeSet &edges, std::size_t i);

/// Stacks columns into a WeightMatrix and checks column sums (1e-12) and sparsity against the edges.
/// Throws PreconditionError on violation.
WeightMatrix assemble_matrix(std::span<const Vec> columns, const EdgeSet &edges);

/// Definition 1 compliance: column stochastic, w(i,j) > 0 iff (j,i) is an edge, nonzero entries >= delta.
bool check_definition1(const WeightMatrix &w, const EdgeSet &edges, double delta);

/// Lower bound on every nonzero entry a method can produce with out-degrees <= k_max.
/// Uniform: 1/k_max. Moreau: min(v, (1-v) v / ((1+v) k_max)).
double analytic_delta(const WeightingMethod &method, std::size_t k_max);

/// Full weight matrix for one round. buffers[i] is node i's buffer row (ignored for uniform).
WeightMatrix build_weight_matrix(const WeightingMethod &method, const EdgeSet &edges,
                                 std::span<const std::vector<Vec>> buffers);

} // namespace pushsum
