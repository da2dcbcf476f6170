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

// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "pushsum/algorithms.hpp"
#include "pushsum/analysis.hpp"
#include "pushsum/cli.hpp"
#include "pushsum/config.hpp"
#include "pushsum/error.hpp"
#include "support.hpp"

namespace {

using namespace pushsum;
using testing_support::graph;
using testing_support::record_sequence;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool passed = false;
    std::string detail;
};

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char *f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

MoreauParams moreau(double k = 0.5) {
    MoreauParams p;
    p.v = 0.1;
    p.steepness_k = k;
    return p;
}

const std::vector<GraphKind> kKinds{GraphKind::Full, GraphKind::Divide, GraphKind::Exp, GraphKind::Random};

std::unique_ptr<Problem> quadratic(std::size_t n, std::size_t d, double sigma, std::uint64_t seed) {
    ProblemSpec s;
    s.kind = ProblemKind::Quadratic;
    s.n_nodes = n;
    s.dim_d = d;
    s.heterogeneity = 1.0;
    s.noise_sigma = sigma;
    s.seed = seed;
    return make_problem(s);
}

OptimizerSpec opt(OptimizerKind kind, double gamma, double beta = 0.0) {
    OptimizerSpec o;
    o.kind = kind;
    o.gamma = gamma;
    o.beta = beta;
    return o;
}

// Definition 1 compliance over random rounds with the method's analytic delta.
Outcome c1() {
    const auto start = Clock::now();
    std::size_t rounds = 0, failures = 0;
    std::uint64_t seed = 0;
    while (rounds < 500) {
        for (GraphKind kind : kKinds) {
            for (const WeightingMethod &m : {WeightingMethod{UniformOutDegree{}}, WeightingMethod{moreau()}}) {
                const std::size_t n = 3 + seed % 6;
                const auto seq = record_sequence(graph(kind, n, 3, seed), m, 12, 3, seed, 0.5);
                for (std::size_t k = 0; k < seq.weights.size(); ++k) {
                    ++rounds;
                    if (!check_definition1(seq.weights[k], seq.edges[k], seq.params.delta)) ++failures;
                }
                ++seed;
            }
        }
    }
    const double secs = seconds_since(start);
    return {failures == 0 && secs < 10.0,
            std::to_string(rounds) + " rounds, " + std::to_string(failures) + " violations, " + fmt("%.2fs", secs)};
}

struct LemmaSequences {
    std::vector<testing_support::RecordedSequence> seqs;
};

const LemmaSequences &lemma_sequences() {
    static const LemmaSequences cache = [] {
        LemmaSequences out;
        for (std::uint64_t s = 0; s < 20; ++s) {
            const std::size_t n = 3 + s % 4;
            const WeightingMethod m = s % 2 ? WeightingMethod{UniformOutDegree{}} : WeightingMethod{moreau()};
            out.seqs.push_back(record_sequence(graph(kKinds[s % 4], n, 2 + s % 2, 100 + s), m, 60, 2, 100 + s, 0.2));
        }
        return out;
    }();
    return cache;
}

// Product convergence on brute-force products.
Outcome c2() {
    const auto start = Clock::now();
    double worst = INFINITY;
    std::size_t failed = 0;
    for (const auto &seq : lemma_sequences().seqs) {
        const auto r = verify_lemma1(seq.weights, seq.params);
        worst = std::min(worst, r.worst_margin);
        if (!r.passed) ++failed;
    }
    const double secs = seconds_since(start);
    return {failed == 0 && worst >= -kBoundSlack && secs < 30.0,
            "20 sequences, failed=" + std::to_string(failed) + ", worst margin " + fmt("%.3g", worst) + ", " +
                fmt("%.2fs", secs)};
}

// Row-sum regimes and the factor-N improvement.
Outcome c3() {
    std::size_t failed = 0;
    double min_ratio = INFINITY;
    for (const auto &seq : lemma_sequences().seqs) {
        const auto r = verify_lemma2(seq.weights, seq.params);
        const double n = static_cast<double>(seq.weights.front().n_nodes());
        const double factor = r.stats.count("improvement_factor") ? r.stats.at("improvement_factor") : 0.0;
        min_ratio = std::min(min_ratio, factor / n);
        if (!r.passed || factor < n) ++failed;
    }
    return {failed == 0, "failed=" + std::to_string(failed) + ", min improvement/N " + fmt("%.3g", min_ratio)};
}

// Consensus bounds along optimizer trajectories; zero-perturbation decay on Full.
Outcome c4() {
    const auto problem = quadratic(6, 5, 0.1, 4);
    std::size_t checks = 0, failed = 0;
    RunOptions traced;
    traced.record_trace = true;
    for (GraphKind kind : kKinds) {
        for (const OptimizerSpec &o : {opt(OptimizerKind::SGAP, 0.05), opt(OptimizerKind::MSGAP, 0.05, 0.5)}) {
            const auto r = run_experiment(*problem, graph(kind, 6, 3, 8), o, moreau(), 200, 8, traced);
            for (Norm norm : {Norm::L1, Norm::L2}) {
                ++checks;
                if (!verify_theorem1(r.trace->trajectory, r.summary.bounds, norm).passed) ++failed;
            }
        }
    }
    RunOptions zero = traced;
    zero.zero_perturbation = true;
    const auto z = run_experiment(*problem, graph(GraphKind::Full, 6, 1), opt(OptimizerKind::SGAP, 0.05), moreau(), 200, 8, zero);
    const double final_distance = z.log.rows.back().cons_l1_max;
    const bool zero_ok = verify_theorem1(z.trace->trajectory, z.summary.bounds, Norm::L1).passed && final_distance < 1e-6;
    return {failed == 0 && zero_ok, std::to_string(checks) + " bound checks, failed=" + std::to_string(failed) +
                                        ", zero-perturbation final distance " + fmt("%.3g", final_distance)};
}

// 1/N scaling of the t >= Delta B bound on Full with Moreau weights and fixed perturbations.
Outcome c5() {
    std::vector<BoundParams> params;
    for (std::size_t n : {4u, 8u, 16u}) {
        const auto seq = record_sequence(graph(GraphKind::Full, n, 1), moreau(), 4, 2, n, 0.1);
        params.push_back(seq.params);
    }
    bool exact = true;
    for (std::size_t k = 0; k < 3; ++k) {
        const std::size_t n = 4u << k;
        const auto [c, c_n] = compare_regimes(params[k], n);
        exact = exact && c_n == c / static_cast<double>(n);
    }
    // Common constants (the smallest delta is valid for every N) and common perturbation norms.
    const BoundParams &common = params.back();
    std::vector<double> b;
    for (std::size_t n : {4u, 8u, 16u}) b.push_back(consensus_bound(common, n, Norm::L1, 5, 3.0, 0.7));
    exact = exact && b[0] == 2 * b[1] && b[1] == 2 * b[2];
    return {exact, "bounds " + fmt("%.6g", b[0]) + " : " + fmt("%.6g", b[1]) + " : " + fmt("%.6g", b[2]) +
                       " (ratio " + fmt("%.17g", b[0] / b[2]) + ":" + fmt("%.17g", b[1] / b[2]) + ":1)"};
}

// Exact identities of momentum runs.
Outcome c6() {
    double resid = 0.0, slack = INFINITY;
    std::size_t runs = 0;
    for (GraphKind kind : kKinds) {
        for (double beta : {0.3, 0.6, 0.9}) {
            const auto problem = quadratic(6, 4, 0.1, runs);
            const auto r = run_experiment(*problem, graph(kind, 6, 3, runs), opt(OptimizerKind::MSGAP, 0.02, beta), moreau(),
                                          300, runs);
            const auto &s = r.summary;
            resid = std::max({resid, s.max_lemma5_resid, s.max_lemma10_resid, s.max_mass_resid, s.max_normalizer_resid});
            slack = std::min(slack, s.lemma6_rhs - s.lemma6_lhs);
            ++runs;
        }
    }
    return {resid <= 1e-10 && slack >= 0.0, std::to_string(runs) + " MSGAP runs, max residual " + fmt("%.3g", resid) +
                                               ", min Lemma-6 slack " + fmt("%.3g", slack)};
}

// Optimizer correctness.
Outcome c7() {
    const QuadraticProblem two({Matrix::identity(1), Matrix::identity(1)}, {{-1.0}, {1.0}}, 0.0, 1.0);
    const auto conv =
        run_experiment(two, graph(GraphKind::Full, 2, 1), opt(OptimizerKind::SGAP, 0.1), UniformOutDegree{}, 500, 1);
    const double gn = conv.log.rows.back().grad_norm_sq;

    const auto problem = quadratic(6, 4, 0.1, 2);
    bool identical = true;
    for (GraphKind kind : kKinds) {
        const auto a = run_experiment(*problem, graph(kind, 6, 3, 2), opt(OptimizerKind::SGAP, 0.05), moreau(), 100, 5);
        const auto b = run_experiment(*problem, graph(kind, 6, 3, 2), opt(OptimizerKind::MSGAP, 0.05, 0.0), moreau(), 100, 5);
        identical = identical && a.log == b.log && a.summary.final_average == b.summary.final_average;
    }

    double oracle_err = 0.0;
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + trial % 7, d = 1 + trial % 3;
        const auto g = graph(kKinds[trial % 4], n, 3, trial);
        NetworkState s = init_network(testing_support::random_points(n, d, trial), g.period_b);
        for (std::uint64_t t = 1; t <= 1 + trial % 4; ++t) {
            const Matrix x = s.x_matrix();
            const Vec a = s.a_vector();
            const Matrix eps = Matrix::from_rows(testing_support::random_points(n, d, 1000 * trial + t, 0.3));
            const WeightingMethod m = trial % 2 ? WeightingMethod{moreau()} : WeightingMethod{UniformOutDegree{}};
            const WeightMatrix w = protocol_round(s, eps, generate_edges(g, t), m);
            const MatrixFormState o = matrix_form_round(x, a, eps, w);
            for (std::size_t i = 0; i < n; ++i) {
                oracle_err = std::max(oracle_err, std::abs(s.nodes[i].a - o.a[i]));
                for (std::size_t k = 0; k < d; ++k)
                    oracle_err = std::max({oracle_err, std::abs(s.nodes[i].x[k] - o.x(i, k)),
                                           std::abs(s.nodes[i].y[k] - o.y(i, k))});
            }
        }
    }
    return {gn <= 1e-8 && identical && oracle_err <= 1e-12,
            "final grad norm^2 " + fmt("%.3g", gn) + ", beta=0 bit-identical " + (identical ? "yes" : "no") +
                ", oracle max error " + fmt("%.3g", oracle_err)};
}

// Directional trend on heterogeneous logistic regression. Step sizes are tuned per algorithm on a held-out
// seed; the Moreau steepness k is tuned per topology on the same seed (v fixed at 0.1).
Outcome c8() {
    const auto start = Clock::now();
    constexpr std::uint64_t kHorizon = 1000;
    constexpr std::uint64_t kTuneSeed = 999;
    const std::vector<double> gamma_grid{0.01, 0.03, 0.1, 0.3, 1.0, 3.0};
    const std::vector<double> k_grid{0.01, 0.1, 1.0, 10.0, 100.0};
    constexpr double kBeta = 0.8;

    auto final_loss = [&](OptimizerKind kind, double gamma, double k, GraphKind g, std::uint64_t seed) {
        ProblemSpec s;
        s.kind = ProblemKind::Logistic;
        s.n_nodes = 6;
        s.dim_d = 10;
        s.heterogeneity = 1.0;
        s.seed = seed;
        const auto problem = make_problem(s);
        try {
            const auto r = run_experiment(*problem, graph(g, 6, g == GraphKind::Random ? 4 : 3, seed),
                                          opt(kind, gamma, kBeta), moreau(k), kHorizon, seed);
            return r.summary.final_loss;
        } catch (const NumericError &) {
            return std::numeric_limits<double>::infinity();
        }
    };

    struct Tuned {
        double gamma = 0.0;
        std::map<GraphKind, double> k;
    };
    auto tune = [&](OptimizerKind kind, bool adaptive) {
        Tuned best;
        double best_total = std::numeric_limits<double>::infinity();
        for (double gamma : gamma_grid) {
            double total = 0.0;
            std::map<GraphKind, double> ks;
            for (GraphKind g : kKinds) {
                double best_k_loss = std::numeric_limits<double>::infinity();
                for (double k : adaptive ? k_grid : std::vector<double>{1.0}) {
                    const double loss = final_loss(kind, gamma, k, g, kTuneSeed);
                    if (loss < best_k_loss) {
                        best_k_loss = loss;
                        ks[g] = k;
                    }
                }
                total += best_k_loss;
            }
            if (total < best_total) {
                best_total = total;
                best = {gamma, ks};
            }
        }
        return best;
    };
    auto median_loss = [&](OptimizerKind kind, const Tuned &t, GraphKind g) {
        std::vector<double> v;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) v.push_back(final_loss(kind, t.gamma, t.k.at(g), g, seed));
        std::nth_element(v.begin(), v.begin() + 2, v.end());
        return v[2];
    };

    const Tuned sgap = tune(OptimizerKind::SGAP, true), sgp = tune(OptimizerKind::SGP, false);
    const Tuned msgap = tune(OptimizerKind::MSGAP, true), msgp = tune(OptimizerKind::MSGP, false);
    int plain_wins = 0, momentum_wins = 0;
    std::ostringstream table;
    for (GraphKind g : kKinds) {
        const double a = median_loss(OptimizerKind::SGAP, sgap, g), b = median_loss(OptimizerKind::SGP, sgp, g);
        const double c = median_loss(OptimizerKind::MSGAP, msgap, g), d = median_loss(OptimizerKind::MSGP, msgp, g);
        plain_wins += a <= b;
        momentum_wins += c <= d;
        table << ' ' << to_string(g) << "[" << fmt("%.6f", a) << "/" << fmt("%.6f", b) << " " << fmt("%.6f", c) << "/"
              << fmt("%.6f", d) << "]";
    }
    const double secs = seconds_since(start);
    std::ostringstream detail;
    detail << "SGAP<=SGP on " << plain_wins << "/4, MSGAP<=MSGP on " << momentum_wins << "/4; gamma SGAP=" << sgap.gamma
           << " SGP=" << sgp.gamma << " MSGAP=" << msgap.gamma << " MSGP=" << msgp.gamma << "; median loss"
           << " adaptive/uniform:" << table.str() << "; " << fmt("%.1fs", secs);
    return {plain_wins >= 3 && momentum_wins >= 3 && secs < 300.0, detail.str()};
}

// Payload of the gradient-tracking baseline relative to SGP.
Outcome c9() {
    const auto problem = quadratic(6, 100, 0.0, 1);
    const auto g = graph(GraphKind::Full, 6, 1);
    const auto tracking = run_experiment(*problem, g, opt(OptimizerKind::SADDOPT, 0.01), UniformOutDegree{}, 3, 1);
    const auto sgp = run_experiment(*problem, g, opt(OptimizerKind::SGP, 0.01), UniformOutDegree{}, 3, 1);
    const double ratio =
        static_cast<double>(tracking.log.rows[1].scalars_sent) / static_cast<double>(sgp.log.rows[1].scalars_sent);
    return {ratio >= 1.8 && ratio <= 2.2, "ratio " + fmt("%.4f", ratio) + " (" +
                                              std::to_string(tracking.log.rows[1].scalars_sent) + " vs " +
                                              std::to_string(sgp.log.rows[1].scalars_sent) + " scalars/round)"};
}

// Byte-identical metrics.csv across invocations.
Outcome c10() {
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / ("pushsum_acceptance_" + std::to_string(::getpid()));
    fs::create_directories(root);
    auto slurp = [](const fs::path &p) {
        std::ifstream in(p, std::ios::binary);
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    std::size_t compared = 0, identical = 0;
    const std::vector<std::string> kinds{"SGAP", "MSGAP", "SGP", "MSGP", "SADDOPT"};
    for (std::size_t k = 0; k < kinds.size(); ++k) {
        nlohmann::json j;
        j["topology"] = {{"kind", to_string(kKinds[k % 4])}, {"n_nodes", 6}, {"period_b", 3}};
        j["problem"] = {{"kind", k % 2 ? "Logistic" : "Quadratic"}, {"dim_d", 5}, {"n_nodes", 6}, {"noise_sigma", 0.1}};
        j["optimizer"] = {{"kind", kinds[k]}, {"gamma", 0.05}, {"beta", 0.5}};
        j["horizon_t"] = 150;
        j["seed"] = 1234 + k;
        const fs::path cfg = root / ("c" + std::to_string(k) + ".json");
        std::ofstream(cfg) << j.dump();
        const fs::path a = root / ("a" + std::to_string(k)), b = root / ("b" + std::to_string(k));
        if (cli::cmd_run(cfg, a) != 0 || cli::cmd_run(cfg, b) != 0) continue;
        ++compared;
        if (slurp(a / "metrics.csv") == slurp(b / "metrics.csv")) ++identical;
    }
    fs::remove_all(root);
    return {compared == kinds.size() && identical == compared,
            std::to_string(identical) + "/" + std::to_string(kinds.size()) + " configs byte-identical"};
}

} // namespace

int main(int argc, char **argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"C1", c1}, {"C2", c2}, {"C3", c3}, {"C4", c4}, {"C5", c5},
        {"C6", c6}, {"C7", c7}, {"C8", c8}, {"C9", c9}, {"C10", c10}};
    // With arguments, run only the named criteria.
    const std::vector<std::string> selected(argv + 1, argv + argc);
    int failures = 0;
    for (const auto &[name, check] : criteria) {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), name) == selected.end()) continue;
        Outcome o;
        try {
            o = check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.passed;
        std::printf("%s %s  %s\n", o.passed ? "PASS" : "FAIL", name.c_str(), o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
