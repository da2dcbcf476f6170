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
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "pushsum/matrix.hpp"

namespace pushsum {

enum class ProblemKind { Quadratic, Logistic };

std::string_view to_string(ProblemKind kind) noexcept;
ProblemKind parse_problem_kind(std::string_view name);

struct ProblemSpec {
    ProblemKind kind = ProblemKind::Quadratic;
    std::size_t dim_d = 10;
    std::size_t n_nodes = 2;
    /// Quadratic: spread of the local centers. Logistic: label separation across the two clusters, in [0, 1].
    double heterogeneity = 1.0;
    /// Quadratic only: gradient noise with E||g - grad f_i||^2 = sigma^2.
    double noise_sigma = 0.0;
    std::uint64_t seed = 0;
    /// Quadratic: every node shares one curvature matrix.
    bool shared_curvature = false;
    /// Logistic: samples held by each node and minibatch size (batch >= samples means full batch).
    std::size_t samples_per_node = 64;
    std::size_t batch_size = 8;

    void validate() const;
    bool operator==(const ProblemSpec &) const = default;
};

/// Identifies one stochastic-gradient draw; the same key always yields the same gradient.
struct GradientKey {
    std::uint64_t seed = 0;
    std::uint64_t round = 0;
    std::uint64_t node = 0;
};

/// Finite-sum objective f(x) = (1/N) sum_i f_i(x). Immutable after construction.
class Problem {
  public:
    virtual ~Problem() = default;

    [[nodiscard]] virtual std::size_t n_nodes() const noexcept = 0;
    [[nodiscard]] virtual std::size_t dim() const noexcept = 0;

    [[nodiscard]] virtual double local_loss(std::size_t i, std::span<const double> x) const = 0;
    [[nodiscard]] virtual Vec local_gradient(std::size_t i, std::span<const double> x) const = 0;
    [[nodiscard]] virtual Vec stochastic_gradient(std::size_t i, std::span<const double> x, GradientKey key) const = 0;
    /// Lipschitz constant shared by every grad f_i.
    [[nodiscard]] virtual double smoothness() const noexcept = 0;

    [[nodiscard]] double global_loss(std::span<const double> x) const;
    [[nodiscard]] Vec global_gradient(std::span<const double> x) const;

    /// Optional CSV dump of the synthetic data.
    virtual void write_csv(std::ostream &os) const = 0;
};

/// f_i(x) = 1/2 (x - c_i)^T A_i (x - c_i).
class QuadraticProblem final : public Problem {
  public:
    QuadraticProblem(std::vector<Matrix> curvature, std::vector<Vec> centers, double noise_sigma,
                     double smoothness_bound);

    [[nodiscard]] std::size_t n_nodes() const noexcept override { return centers_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept override { return dim_; }
    [[nodiscard]] double local_loss(std::size_t i, std::span<const double> x) const override;
    [[nodiscard]] Vec local_gradient(std::size_t i, std::span<const double> x) const override;
    [[nodiscard]] Vec stochastic_gradient(std::size_t i, std::span<const double> x, GradientKey key) const override;
    [[nodiscard]] double smoothness() const noexcept override { return smoothness_; }
    void write_csv(std::ostream &os) const override;

    /// Solves (sum A_i) x = sum A_i c_i.
    [[nodiscard]] Vec minimizer() const;
    [[nodiscard]] const Vec &center(std::size_t i) const { return centers_.at(i); }
    [[nodiscard]] const Matrix &curvature(std::size_t i) const { return curvature_.at(i); }

  private:
    std::vector<Matrix> curvature_;
    std::vector<Vec> centers_;
    std::size_t dim_;
    double sigma_;
    double smoothness_;
};

/// Binary classification over two-cluster, label-skewed Gaussian data with l2 regularization.
class LogisticProblem final : public Problem {
  public:
    static constexpr double kRegularizer = 1e-3;

    /// features[i] is node i's sample matrix (rows = samples); labels[i][s] in {-1, +1}.
    LogisticProblem(std::vector<Matrix> features, std::vector<std::vector<double>> labels, std::size_t batch_size,
                    std::uint64_t seed);

    [[nodiscard]] std::size_t n_nodes() const noexcept override { return features_.size(); }
    [[nodiscard]] std::size_t dim() const noexcept override { return dim_; }
    [[nodiscard]] double local_loss(std::size_t i, std::span<const double> x) const override;
    [[nodiscard]] Vec local_gradient(std::size_t i, std::span<const double> x) const override;
    [[nodiscard]] Vec stochastic_gradient(std::size_t i, std::span<const double> x, GradientKey key) const override;
    [[nodiscard]] double smoothness() const noexcept override { return smoothness_; }
    void write_csv(std::ostream &os) const override;

    [[nodiscard]] std::size_t samples(std::size_t i) const { return features_.at(i).rows(); }
    [[nodiscard]] std::size_t batch_size() const noexcept { return batch_; }

  private:
    std::vector<Matrix> features_;
    std::vector<std::vector<double>> labels_;
    std::size_t dim_;
    std::size_t batch_;
    std::uint64_t seed_;
    double smoothness_;
};

std::unique_ptr<QuadraticProblem> make_quadratic(const ProblemSpec &spec);
/// Two Gaussian classes per node with a label split set by heterogeneity; the last feature is a constant intercept.
std::unique_ptr<LogisticProblem> make_logistic(const ProblemSpec &spec);
std::unique_ptr<Problem> make_problem(const ProblemSpec &spec);

/// Draws one stochastic gradient of node i at x.
Vec stochastic_gradient(const Problem &problem, std::size_t i, std::span<const double> x, GradientKey key);

struct DiversityReport {
    double kappa_sq = 0.0;
    double sigma_sq = 0.0;
    double smoothness_l = 0.0;
};

/// kappa_sq: max over the points of (1/N) sum_i ||grad f_i - grad f||^2.
/// sigma_sq: mean over points and nodes of the empirical ||g - grad f_i||^2 over `draws` samples.
DiversityReport measure_diversity(const Problem &problem, std::span<const Vec> reference_points,
                                  std::size_t draws = 256, std::uint64_t seed = 0);

} // namespace pushsum
