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

#include <cassert>
#include <cstddef>
#include <span>
#include <vector>

namespace pushsum {

using Vec = std::vector<double>;

/// Dense row-major matrix. Node-indexed quantities put one node per row.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    static Matrix from_rows(const std::vector<Vec> &rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

    double &operator()(std::size_t i, std::size_t j) noexcept {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }
    double operator()(std::size_t i, std::size_t j) const noexcept {
        assert(i < rows_ && j < cols_);
        return data_[i * cols_ + j];
    }

    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] Vec column(std::size_t j) const;
    [[nodiscard]] Matrix transposed() const;

    bool operator==(const Matrix &) const = default;

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

double norm_l1(std::span<const double> v) noexcept;
double norm_l2(std::span<const double> v) noexcept;
double squared_norm(std::span<const double> v) noexcept;
double squared_distance(std::span<const double> a, std::span<const double> b) noexcept;

/// Entrywise L1 norm: sum of absolute values of all entries.
double entrywise_l1(const Matrix &m) noexcept;
double frobenius(const Matrix &m) noexcept;

/// Mean of the rows, i.e. (1/N) 1^T M.
Vec row_mean(const Matrix &m);
Vec row_sum(const Matrix &m);

} // namespace pushsum
