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

#include <benchmark/benchmark.h>

#include "pushsum/analysis.hpp"
#include "pushsum/kernels.hpp"
#include "pushsum/protocol.hpp"
#include "pushsum/rng.hpp"
#include "pushsum/topology.hpp"

namespace {

using namespace pushsum;

Matrix random_matrix(std::size_t r, std::size_t c, std::uint64_t seed) {
    Matrix m(r, c);
    const auto k = rng::key(rng::Stream::Init, {seed});
    for (std::size_t i = 0; i < m.data().size(); ++i) m.data()[i] = rng::normal(k, i);
    return m;
}

void BM_MatmulSerial(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    const Matrix w = random_matrix(n, n, 1), x = random_matrix(n, d, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::matmul(w, x));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * d));
}

void BM_MatmulParallel(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    const Matrix w = random_matrix(n, n, 1), x = random_matrix(n, d, 2);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::matmul(w, x));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n * d));
}

void BM_MatvecSerial(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix w = random_matrix(n, n, 1);
    const Vec a = random_matrix(n, 1, 3).column(0);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::serial::matvec(w, a));
}

void BM_MatvecParallel(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const Matrix w = random_matrix(n, n, 1);
    const Vec a = random_matrix(n, 1, 3).column(0);
    for (auto _ : state) benchmark::DoNotOptimize(kernels::parallel::matvec(w, a));
}

// Brute-force product check over a recorded push-sum sequence.
void BM_Lemma1Products(benchmark::State &state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto rounds = static_cast<std::size_t>(state.range(1));
    GraphSpec g;
    g.kind = GraphKind::Random;
    g.n_nodes = n;
    g.period_b = 3;
    g.cluster_split = ClusterSplit::halves(n);
    MoreauParams p;
    p.steepness_k = 0.5;
    std::vector<Vec> x0(n, Vec(2));
    for (std::size_t i = 0; i < n; ++i) x0[i] = {static_cast<double>(i), -static_cast<double>(i)};
    NetworkState s = init_network(x0, g.period_b);
    std::vector<WeightMatrix> ws;
    std::vector<EdgeSet> edges;
    for (std::uint64_t t = 1; t <= rounds; ++t) {
        edges.push_back(generate_edges(g, t));
        ws.push_back(protocol_round(s, Matrix(n, 2), edges.back(), p));
    }
    const auto conn = check_windows(edges, g.period_b);
    const BoundParams params = compute_bound_params(analytic_delta(p, conn.max_out_degree), *conn.diameter_delta, 3);
    for (auto _ : state) benchmark::DoNotOptimize(verify_lemma1(ws, params));
}

} // namespace

BENCHMARK(BM_MatmulSerial)->Args({8, 10})->Args({64, 256})->Args({256, 1024});
BENCHMARK(BM_MatmulParallel)->Args({8, 10})->Args({64, 256})->Args({256, 1024});
BENCHMARK(BM_MatvecSerial)->Arg(64)->Arg(1024);
BENCHMARK(BM_MatvecParallel)->Arg(64)->Arg(1024);
BENCHMARK(BM_Lemma1Products)->Args({6, 60})->Args({16, 200});

BENCHMARK_MAIN();
