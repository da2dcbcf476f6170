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

#include "pushsum/matrix.hpp"

#include <cmath>

#include "pushsum/error.hpp"

namespace pushsum {

Matrix Matrix::from_rows(const std::vector<Vec> &rows) {
    if (rows.empty()) return {};
    const std::size_t cols = rows.front().size();
    Matrix m(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) throw ShapeError("Matrix::from_rows: ragged rows");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = rows[i][j];
    }
    return m;
}

Vec Matrix::column(std::size_t j) const {
    Vec out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) out[i] = (*this)(i, j);
    return out;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double norm_l1(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s += std::abs(x);
    return s;
}

double squared_norm(std::span<const double> v) noexcept {
    double s = 0.0;
    for (double x : v) s += x * x;
    return s;
}

double norm_l2(std::span<const double> v) noexcept { return std::sqrt(squared_norm(v)); }

double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

double entrywise_l1(const Matrix &m) noexcept { return norm_l1(m.data()); }

double frobenius(const Matrix &m) noexcept { return norm_l2(m.data()); }

Vec row_sum(const Matrix &m) {
    Vec s(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        for (std::size_t k = 0; k < m.cols(); ++k) s[k] += r[k];
    }
    return s;
}

Vec row_mean(const Matrix &m) {
    Vec s = row_sum(m);
    if (m.rows() == 0) return s;
    for (double &x : s) x /= static_cast<double>(m.rows());
    return s;
}

} // namespace pushsum
