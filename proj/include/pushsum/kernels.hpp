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

#include "pushsum/matrix.hpp"

// Dense kernels behind the mixing step and the product oracles.
//
// `serial` is the reference implementation and is what the independent
// oracles (matrix-form protocol, brute-force products) are built on.
// `parallel` splits the outer (row) loop across OpenMP threads; each row keeps
// the serial summation order, so both paths return bit-identical results.
namespace pushsum::kernels {

namespace serial {

/// out = W * X.
Matrix matmul(const Matrix &w, const Matrix &x);
/// out = W * a.
Vec matvec(const Matrix &w, std::span<const double> a);

} // namespace serial

namespace parallel {

Matrix matmul(const Matrix &w, const Matrix &x);
Vec matvec(const Matrix &w, std::span<const double> a);

} // namespace parallel

/// Number of OpenMP threads the parallel kernels would use (1 without OpenMP).
int max_threads() noexcept;

} // namespace pushsum::kernels
