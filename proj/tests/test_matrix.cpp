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

#include <gtest/gtest.h>

#include "pushsum/error.hpp"
#include "pushsum/matrix.hpp"
#include "pushsum/rng.hpp"

namespace pushsum {
namespace {

TEST(Matrix, FromRowsAndAccessors) {
    const Matrix m = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    EXPECT_EQ(m.rows(), 2u);
    EXPECT_EQ(m.cols(), 3u);
    EXPECT_EQ(m(1, 2), 6.0);
    EXPECT_EQ(m.column(1), (Vec{2, 5}));
    EXPECT_EQ(m.transposed()(2, 0), 3.0);
}

TEST(Matrix, RaggedRowsRejected) { EXPECT_THROW(Matrix::from_rows({{1, 2}, {3}}), ShapeError); }

TEST(Matrix, Norms) {
    const Matrix m = Matrix::from_rows({{3, -4}, {0, 0}});
    EXPECT_DOUBLE_EQ(entrywise_l1(m), 7.0);
    EXPECT_DOUBLE_EQ(frobenius(m), 5.0);
    const Vec v{3, -4};
    EXPECT_DOUBLE_EQ(norm_l1(v), 7.0);
    EXPECT_DOUBLE_EQ(norm_l2(v), 5.0);
    EXPECT_DOUBLE_EQ(squared_norm(v), 25.0);
    EXPECT_DOUBLE_EQ(squared_distance(v, Vec{0, 0}), 25.0);
}

TEST(Matrix, RowMeanAndSum) {
    const Matrix m = Matrix::from_rows({{0, 1}, {2, 3}});
    EXPECT_EQ(row_mean(m), (Vec{1, 2}));
    EXPECT_EQ(row_sum(m), (Vec{2, 4}));
}

TEST(Rng, KeysAreOrderSensitiveAndStreamSeparated) {
    using rng::Stream;
    EXPECT_NE(rng::key(Stream::Init, {1, 2}), rng::key(Stream::Init, {2, 1}));
    EXPECT_NE(rng::key(Stream::Init, {1, 2}), rng::key(Stream::Batch, {1, 2}));
    EXPECT_EQ(rng::key(Stream::Init, {1, 2}), rng::key(Stream::Init, {1, 2}));
}

TEST(Rng, NormalMoments) {
    const auto k = rng::key(rng::Stream::GradientNoise, {7});
    double sum = 0.0, sq = 0.0;
    constexpr int n = 200000;
    for (int c = 0; c < n; ++c) {
        const double z = rng::normal(k, static_cast<std::uint64_t>(c));
        sum += z;
        sq += z * z;
    }
    EXPECT_NEAR(sum / n, 0.0, 0.01);
    EXPECT_NEAR(sq / n, 1.0, 0.02);
}

TEST(Rng, BelowStaysInRange) {
    const auto k = rng::key(rng::Stream::Batch, {3});
    for (std::uint64_t c = 0; c < 1000; ++c) EXPECT_LT(rng::below(k, c, 7), 7u);
}

} // namespace
} // namespace pushsum
