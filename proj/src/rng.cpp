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

#include "pushsum/rng.hpp"

#include <cmath>
#include <numbers>

namespace pushsum::rng {

double normal(std::uint64_t k, std::uint64_t counter) noexcept {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform(k, 2 * counter);
    const double u2 = uniform(k, 2 * counter + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t below(std::uint64_t k, std::uint64_t counter, std::uint64_t n) noexcept {
    const auto v = static_cast<std::uint64_t>(uniform(k, counter) * static_cast<double>(n));
    return v < n ? v : n - 1;
}

} // namespace pushsum::rng
