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
#include <initializer_list>

namespace pushsum::rng {

/// Independent streams; folded into every key so draws for different purposes never collide.
enum class Stream : std::uint64_t {
    Topology = 0x746f706fULL,
    GradientNoise = 0x6e6f6973ULL,
    Batch = 0x62617463ULL,
    Init = 0x696e6974ULL,
    ProblemData = 0x64617461ULL,
};

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Counter-based key: a pure function of its words and their order.
constexpr std::uint64_t key(Stream stream, std::initializer_list<std::uint64_t> words) noexcept {
    std::uint64_t h = mix64(static_cast<std::uint64_t>(stream));
    for (std::uint64_t w : words) h = mix64(h ^ mix64(w));
    return h;
}

/// Uniform in [0, 1) with 53 random bits.
constexpr double uniform01(std::uint64_t bits) noexcept {
    return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// The counter-th uniform draw under a key.
constexpr double uniform(std::uint64_t k, std::uint64_t counter) noexcept {
    return uniform01(mix64(k ^ mix64(counter + 0x632be59bd9b4e019ULL)));
}

/// The counter-th standard normal draw under a key (Box-Muller on two uniforms).
double normal(std::uint64_t k, std::uint64_t counter) noexcept;

/// Uniform integer in [0, n).
std::uint64_t below(std::uint64_t k, std::uint64_t counter, std::uint64_t n) noexcept;

} // namespace pushsum::rng
