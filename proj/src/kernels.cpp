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

#include "pushsum/kernels.hpp"

#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "pushsum/error.hpp"

namespace pushsum::kernels {

namespace {

// Below this many multiply-adds the fork/join costs more than the loop.
constexpr std::size_t kParallelWork = 1U << 14;

void check_inner(const Matrix &w, std::size_t inner, const char *what) {
    if (w.cols() != inner)
        throw ShapeError(std::string(what) + ": inner dimensions differ (" + std::to_string(w.cols()) + " vs " +
                         std::to_string(inner) + ")");
}

inline void row_times(const Matrix &w, const Matrix &x, std::size_t i, std::span<double> out) {
    for (std::size_t j = 0; j < w.cols(); ++j) {
        const double wij = w(i, j);
        if (wij == 0.0) continue;
        const auto xr = x.row(j);
        for (std::size_t k = 0; k < out.size(); ++k) out[k] += wij * xr[k];
    }
}

inline double row_dot(const Matrix &w, std::span<const double> a, std::size_t i) {
    double s = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) s += w(i, j) * a[j];
    return s;
}

} // namespace

namespace serial {

Matrix matmul(const Matrix &w, const Matrix &x) {
    check_inner(w, x.rows(), "serial::matmul");
    Matrix out(w.rows(), x.cols());
    for (std::size_t i = 0; i < w.rows(); ++i) row_times(w, x, i, out.row(i));
    return out;
}

Vec matvec(const Matrix &w, std::span<const double> a) {
    check_inner(w, a.size(), "serial::matvec");
    Vec out(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) out[i] = row_dot(w, a, i);
    return out;
}

} // namespace serial

namespace parallel {

Matrix matmul(const Matrix &w, const Matrix &x) {
    check_inner(w, x.rows(), "parallel::matmul");
    Matrix out(w.rows(), x.cols());
    const auto rows = static_cast<std::ptrdiff_t>(w.rows());
    [[maybe_unused]] const bool big = w.rows() * w.cols() * x.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
    for (std::ptrdiff_t i = 0; i < rows; ++i) {
        const auto r = static_cast<std::size_t>(i);
        row_times(w, x, r, out.row(r));
    }
    return out;
}

Vec matvec(const Matrix &w, std::span<const double> a) {
    check_inner(w, a.size(), "parallel::matvec");
    Vec out(w.rows());
    const auto rows = static_cast<std::ptrdiff_t>(w.rows());
    [[maybe_unused]] const bool big = w.rows() * w.cols() >= kParallelWork;
#pragma omp parallel for schedule(static) if (big)
    for (std::ptrdiff_t i = 0; i < rows; ++i) out[static_cast<std::size_t>(i)] = row_dot(w, a, static_cast<std::size_t>(i));
    return out;
}

} // namespace parallel

int max_threads() noexcept {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

} // namespace pushsum::kernels
