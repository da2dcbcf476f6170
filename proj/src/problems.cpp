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

#include "pushsum/problems.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "pushsum/error.hpp"
#include "pushsum/rng.hpp"

namespace pushsum {

namespace {

// Quadratic curvature eigenvalues are drawn from [1, kMaxCurvature].
constexpr double kMaxCurvature = 4.0;

void check_dim(std::span<const double> x, std::size_t d, const char *what) {
    if (x.size() != d) throw ShapeError(std::string(what) + ": x has length " + std::to_string(x.size()) + ", expected " +
                                        std::to_string(d));
}

Vec gaussian_vector(std::uint64_t key, std::size_t d) {
    Vec v(d);
    for (std::size_t k = 0; k < d; ++k) v[k] = rng::normal(key, k);
    return v;
}

/// Random orthogonal matrix from Gram-Schmidt on Gaussian columns.
Matrix random_orthogonal(std::uint64_t key, std::size_t d) {
    std::vector<Vec> basis;
    std::uint64_t counter = 0;
    while (basis.size() < d) {
        Vec v = gaussian_vector(rng::mix64(key ^ counter++), d);
        for (const auto &b : basis) {
            double dot = 0.0;
            for (std::size_t k = 0; k < d; ++k) dot += v[k] * b[k];
            for (std::size_t k = 0; k < d; ++k) v[k] -= dot * b[k];
        }
        const double nrm = norm_l2(v);
        if (nrm < 1e-8) continue;
        for (double &x : v) x /= nrm;
        basis.push_back(std::move(v));
    }
    Matrix q(d, d);
    for (std::size_t c = 0; c < d; ++c)
        for (std::size_t r = 0; r < d; ++r) q(r, c) = basis[c][r];
    return q;
}

/// Solves S x = b for symmetric positive-definite S by Cholesky.
Vec cholesky_solve(Matrix s, Vec b) {
    const std::size_t n = s.rows();
    for (std::size_t j = 0; j < n; ++j) {
        double diag = s(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= s(j, k) * s(j, k);
        if (!(diag > 0.0)) throw NumericError("cholesky_solve: matrix is not positive definite");
        s(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double v = s(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= s(i, k) * s(j, k);
            s(i, j) = v / s(j, j);
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < i; ++k) b[i] -= s(i, k) * b[k];
        b[i] /= s(i, i);
    }
    for (std::size_t ii = n; ii-- > 0;) {
        for (std::size_t k = ii + 1; k < n; ++k) b[ii] -= s(k, ii) * b[k];
        b[ii] /= s(ii, ii);
    }
    return b;
}

double softplus(double z) noexcept { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double sigmoid(double z) noexcept {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

} // namespace

std::string_view to_string(ProblemKind kind) noexcept {
    return kind == ProblemKind::Quadratic ? "Quadratic" : "Logistic";
}

ProblemKind parse_problem_kind(std::string_view name) {
    if (name == "Quadratic") return ProblemKind::Quadratic;
    if (name == "Logistic") return ProblemKind::Logistic;
    throw ConfigError("unknown problem kind '" + std::string(name) + "' (expected Quadratic or Logistic)");
}

void ProblemSpec::validate() const {
    if (dim_d < 1) throw ConfigError("problem: dim_d must be >= 1");
    if (n_nodes < 1) throw ConfigError("problem: n_nodes must be >= 1");
    if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) throw ConfigError("problem: noise_sigma must be >= 0");
    if (!(heterogeneity >= 0.0) || !std::isfinite(heterogeneity)) throw ConfigError("problem: heterogeneity must be >= 0");
    if (kind == ProblemKind::Logistic) {
        if (heterogeneity > 1.0) throw ConfigError("problem: logistic heterogeneity must lie in [0, 1]");
        if (n_nodes < 2) throw ConfigError("problem: logistic needs n_nodes >= 2 (two clusters)");
        if (samples_per_node < 1 || batch_size < 1) throw ConfigError("problem: samples_per_node and batch_size must be >= 1");
    }
}

double Problem::global_loss(std::span<const double> x) const {
    double s = 0.0;
    for (std::size_t i = 0; i < n_nodes(); ++i) s += local_loss(i, x);
    return s / static_cast<double>(n_nodes());
}

Vec Problem::global_gradient(std::span<const double> x) const {
    Vec g(dim(), 0.0);
    for (std::size_t i = 0; i < n_nodes(); ++i) {
        const Vec gi = local_gradient(i, x);
        for (std::size_t k = 0; k < g.size(); ++k) g[k] += gi[k];
    }
    const double inv = 1.0 / static_cast<double>(n_nodes());
    for (double &v : g) v *= inv;
    return g;
}

Vec stochastic_gradient(const Problem &problem, std::size_t i, std::span<const double> x, GradientKey key) {
    return problem.stochastic_gradient(i, x, key);
}

// QuadraticProblem

QuadraticProblem::QuadraticProblem(std::vector<Matrix> curvature, std::vector<Vec> centers, double noise_sigma,
                                   double smoothness_bound)
    : curvature_(std::move(curvature)), centers_(std::move(centers)), dim_(centers_.empty() ? 0 : centers_.front().size()),
      sigma_(noise_sigma), smoothness_(smoothness_bound) {
    if (centers_.empty() || curvature_.size() != centers_.size()) throw ShapeError("QuadraticProblem: need one A_i per c_i");
    for (std::size_t i = 0; i < centers_.size(); ++i)
        if (centers_[i].size() != dim_ || curvature_[i].rows() != dim_ || curvature_[i].cols() != dim_)
            throw ShapeError("QuadraticProblem: inconsistent dimensions");
}

double QuadraticProblem::local_loss(std::size_t i, std::span<const double> x) const {
    check_dim(x, dim_, "QuadraticProblem::local_loss");
    const auto &a = curvature_.at(i);
    const auto &c = centers_[i];
    double s = 0.0;
    for (std::size_t r = 0; r < dim_; ++r) {
        double ar = 0.0;
        for (std::size_t k = 0; k < dim_; ++k) ar += a(r, k) * (x[k] - c[k]);
        s += (x[r] - c[r]) * ar;
    }
    return 0.5 * s;
}

Vec QuadraticProblem::local_gradient(std::size_t i, std::span<const double> x) const {
    check_dim(x, dim_, "QuadraticProblem::local_gradient");
    const auto &a = curvature_.at(i);
    const auto &c = centers_[i];
    Vec g(dim_, 0.0);
    for (std::size_t r = 0; r < dim_; ++r)
        for (std::size_t k = 0; k < dim_; ++k) g[r] += a(r, k) * (x[k] - c[k]);
    return g;
}

Vec QuadraticProblem::stochastic_gradient(std::size_t i, std::span<const double> x, GradientKey key) const {
    Vec g = local_gradient(i, x);
    if (sigma_ == 0.0) return g;
    const double scale = sigma_ / std::sqrt(static_cast<double>(dim_));
    const auto k = rng::key(rng::Stream::GradientNoise, {key.seed, key.round, key.node});
    for (std::size_t r = 0; r < dim_; ++r) g[r] += scale * rng::normal(k, r);
    return g;
}

Vec QuadraticProblem::minimizer() const {
    Matrix s(dim_, dim_);
    Vec b(dim_, 0.0);
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        const auto &a = curvature_[i];
        for (std::size_t r = 0; r < dim_; ++r)
            for (std::size_t k = 0; k < dim_; ++k) {
                s(r, k) += a(r, k);
                b[r] += a(r, k) * centers_[i][k];
            }
    }
    return cholesky_solve(std::move(s), std::move(b));
}

void QuadraticProblem::write_csv(std::ostream &os) const {
    os << "node,kind,row";
    for (std::size_t k = 0; k < dim_; ++k) os << ",v" << k;
    os << '\n';
    for (std::size_t i = 0; i < centers_.size(); ++i) {
        os << i << ",center,0";
        for (double v : centers_[i]) os << ',' << v;
        os << '\n';
        for (std::size_t r = 0; r < dim_; ++r) {
            os << i << ",curvature," << r;
            for (double v : curvature_[i].row(r)) os << ',' << v;
            os << '\n';
        }
    }
}

std::unique_ptr<QuadraticProblem> make_quadratic(const ProblemSpec &spec) {
    spec.validate();
    const std::size_t d = spec.dim_d;
    const std::size_t n = spec.n_nodes;

    auto curvature_for = [&](std::uint64_t node, double &max_eig) {
        const auto k = rng::key(rng::Stream::ProblemData, {spec.seed, 1, node});
        const Matrix q = random_orthogonal(k, d);
        Vec eig(d);
        for (std::size_t r = 0; r < d; ++r) {
            eig[r] = 1.0 + (kMaxCurvature - 1.0) * rng::uniform(rng::mix64(k), r);
            max_eig = std::max(max_eig, eig[r]);
        }
        Matrix a(d, d);
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = 0; c < d; ++c) {
                double s = 0.0;
                for (std::size_t m = 0; m < d; ++m) s += q(r, m) * eig[m] * q(c, m);
                a(r, c) = s;
            }
        // Exact symmetry.
        for (std::size_t r = 0; r < d; ++r)
            for (std::size_t c = r + 1; c < d; ++c) a(c, r) = a(r, c);
        return a;
    };

    double max_eig = 1.0;
    std::vector<Matrix> curvature;
    curvature.reserve(n);
    if (spec.shared_curvature) {
        const Matrix a = curvature_for(0, max_eig);
        curvature.assign(n, a);
    } else {
        for (std::size_t i = 0; i < n; ++i) curvature.push_back(curvature_for(i, max_eig));
    }

    const Vec common = gaussian_vector(rng::key(rng::Stream::ProblemData, {spec.seed, 2}), d);
    std::vector<Vec> centers(n, common);
    for (std::size_t i = 0; i < n; ++i) {
        const Vec z = gaussian_vector(rng::key(rng::Stream::ProblemData, {spec.seed, 3, i}), d);
        for (std::size_t k = 0; k < d; ++k) centers[i][k] += spec.heterogeneity * z[k];
    }
    return std::make_unique<QuadraticProblem>(std::move(curvature), std::move(centers), spec.noise_sigma, max_eig);
}

// LogisticProblem

LogisticProblem::LogisticProblem(std::vector<Matrix> features, std::vector<std::vector<double>> labels,
                                 std::size_t batch_size, std::uint64_t seed)
    : features_(std::move(features)), labels_(std::move(labels)), dim_(features_.empty() ? 0 : features_.front().cols()),
      batch_(batch_size), seed_(seed), smoothness_(0.0) {
    if (features_.empty() || labels_.size() != features_.size()) throw ShapeError("LogisticProblem: need labels per node");
    if (batch_ == 0) throw ShapeError("LogisticProblem: batch_size must be >= 1");
    for (std::size_t i = 0; i < features_.size(); ++i) {
        const auto &f = features_[i];
        if (f.cols() != dim_ || f.rows() != labels_[i].size() || f.rows() == 0)
            throw ShapeError("LogisticProblem: inconsistent sample shapes");
        // Hessian of the mean logistic term is bounded by (1/4m) sum a a^T <= (1/4m) sum ||a||^2 I.
        double trace = 0.0;
        for (std::size_t s = 0; s < f.rows(); ++s) trace += squared_norm(f.row(s));
        smoothness_ = std::max(smoothness_, trace / (4.0 * static_cast<double>(f.rows())) + kRegularizer);
    }
}

double LogisticProblem::local_loss(std::size_t i, std::span<const double> x) const {
    check_dim(x, dim_, "LogisticProblem::local_loss");
    const auto &f = features_.at(i);
    double s = 0.0;
    for (std::size_t r = 0; r < f.rows(); ++r) {
        double z = 0.0;
        const auto a = f.row(r);
        for (std::size_t k = 0; k < dim_; ++k) z += a[k] * x[k];
        s += softplus(-labels_[i][r] * z);
    }
    return s / static_cast<double>(f.rows()) + 0.5 * kRegularizer * squared_norm(x);
}

namespace {

void accumulate_sample(std::span<const double> a, double label, std::span<const double> x, double weight, Vec &g) {
    double z = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) z += a[k] * x[k];
    const double coef = -label * sigmoid(-label * z) * weight;
    for (std::size_t k = 0; k < x.size(); ++k) g[k] += coef * a[k];
}

} // namespace

Vec LogisticProblem::local_gradient(std::size_t i, std::span<const double> x) const {
    check_dim(x, dim_, "LogisticProblem::local_gradient");
    const auto &f = features_.at(i);
    Vec g(dim_, 0.0);
    const double w = 1.0 / static_cast<double>(f.rows());
    for (std::size_t r = 0; r < f.rows(); ++r) accumulate_sample(f.row(r), labels_[i][r], x, w, g);
    for (std::size_t k = 0; k < dim_; ++k) g[k] += kRegularizer * x[k];
    return g;
}

Vec LogisticProblem::stochastic_gradient(std::size_t i, std::span<const double> x, GradientKey key) const {
    const auto &f = features_.at(i);
    if (batch_ >= f.rows()) return local_gradient(i, x);
    check_dim(x, dim_, "LogisticProblem::stochastic_gradient");
    // Uniform sampling with replacement keeps the minibatch mean unbiased.
    const auto k = rng::key(rng::Stream::Batch, {seed_, key.seed, key.round, key.node});
    Vec g(dim_, 0.0);
    const double w = 1.0 / static_cast<double>(batch_);
    for (std::size_t b = 0; b < batch_; ++b) {
        const auto r = static_cast<std::size_t>(rng::below(k, b, f.rows()));
        accumulate_sample(f.row(r), labels_[i][r], x, w, g);
    }
    for (std::size_t c = 0; c < dim_; ++c) g[c] += kRegularizer * x[c];
    return g;
}

void LogisticProblem::write_csv(std::ostream &os) const {
    os << "node,label";
    for (std::size_t k = 0; k < dim_; ++k) os << ",f" << k;
    os << '\n';
    for (std::size_t i = 0; i < features_.size(); ++i)
        for (std::size_t r = 0; r < features_[i].rows(); ++r) {
            os << i << ',' << labels_[i][r];
            for (double v : features_[i].row(r)) os << ',' << v;
            os << '\n';
        }
}

std::unique_ptr<LogisticProblem> make_logistic(const ProblemSpec &spec) {
    spec.validate();
    const std::size_t d = spec.dim_d;
    const std::size_t n = spec.n_nodes;
    const std::size_t m = spec.samples_per_node;

    // The last coordinate is a constant intercept feature (when d >= 2); the class means +/- mu live in the
    // others with ||mu|| = 1 along the all-ones direction. The intercept makes label skew visible in the gradient.
    const std::size_t signal = d >= 2 ? d - 1 : d;
    const double mu = 1.0 / std::sqrt(static_cast<double>(signal));
    // Cluster 0 (first half of the nodes) is mostly label -1, cluster 1 mostly +1.
    const auto minority = static_cast<std::size_t>(std::llround(static_cast<double>(m) * (1.0 - spec.heterogeneity) / 2.0));

    std::vector<Matrix> features;
    std::vector<std::vector<double>> labels;
    features.reserve(n);
    labels.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double majority_label = i < n / 2 ? -1.0 : 1.0;
        Matrix f(m, d);
        std::vector<double> y(m);
        const auto k = rng::key(rng::Stream::ProblemData, {spec.seed, 4, i});
        for (std::size_t s = 0; s < m; ++s) {
            y[s] = s < minority ? -majority_label : majority_label;
            for (std::size_t c = 0; c < signal; ++c) f(s, c) = y[s] * mu + rng::normal(k, s * d + c);
            if (signal < d) f(s, d - 1) = 1.0;
        }
        features.push_back(std::move(f));
        labels.push_back(std::move(y));
    }
    return std::make_unique<LogisticProblem>(std::move(features), std::move(labels), spec.batch_size, spec.seed);
}

std::unique_ptr<Problem> make_problem(const ProblemSpec &spec) {
    if (spec.kind == ProblemKind::Quadratic) return make_quadratic(spec);
    return make_logistic(spec);
}

DiversityReport measure_diversity(const Problem &problem, std::span<const Vec> reference_points, std::size_t draws,
                                  std::uint64_t seed) {
    if (reference_points.empty()) throw ShapeError("measure_diversity: need at least one reference point");
    DiversityReport report;
    report.smoothness_l = problem.smoothness();
    const std::size_t n = problem.n_nodes();
    double sigma_total = 0.0;
    for (std::size_t p = 0; p < reference_points.size(); ++p) {
        const auto &x = reference_points[p];
        const Vec g = problem.global_gradient(x);
        double spread = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Vec gi = problem.local_gradient(i, x);
            spread += squared_distance(gi, g);
            for (std::size_t r = 0; r < draws; ++r) {
                const Vec sample = problem.stochastic_gradient(i, x, GradientKey{seed, p * draws + r, i});
                sigma_total += squared_distance(sample, gi);
            }
        }
        report.kappa_sq = std::max(report.kappa_sq, spread / static_cast<double>(n));
    }
    if (draws > 0) report.sigma_sq = sigma_total / static_cast<double>(reference_points.size() * n * draws);
    return report;
}

} // namespace pushsum
