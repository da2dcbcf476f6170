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
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "pushsum/algorithms.hpp"
#include "pushsum/problems.hpp"
#include "pushsum/topology.hpp"
#include "pushsum/weighting.hpp"

namespace pushsum {

/// Environment variable that, when set, replaces the configured run seed.
inline constexpr const char *kSeedEnvVar = "PUSHSUM_LAB_SEED";

struct ExperimentConfig {
    GraphSpec topology;
    ProblemSpec problem;
    OptimizerSpec optimizer;
    WeightingMethod weighting = MoreauParams{};
    std::uint64_t horizon_t = 100;
    std::uint64_t seed = 0;
    std::string output_path = "out";
    double init_scale = 1.0;
    bool dump_state = false;

    /// Field invariants plus cross-field consistency. Throws ConfigError.
    void validate() const;
    bool operator==(const ExperimentConfig &) const = default;
};

/// Parses and validates. Unknown enum names, missing required fields and type errors become ConfigError.
ExperimentConfig parse_config(const nlohmann::json &j);
nlohmann::json to_json(const ExperimentConfig &config);

/// Reads a JSON config file; applies PUSHSUM_LAB_SEED when set.
ExperimentConfig load_config(const std::filesystem::path &path);

/// Applies PUSHSUM_LAB_SEED to a seed, if set. Throws ConfigError on a malformed value.
std::uint64_t seed_from_env(std::uint64_t configured);

struct SweepAxis {
    /// "n_nodes" (sets topology and problem together) or a dotted path such as "topology.kind".
    std::string name;
    std::vector<nlohmann::json> values;
};

struct SweepConfig {
    nlohmann::json base;
    /// Taken from a JSON object, so axes are ordered by name.
    std::vector<SweepAxis> axes;
    std::vector<std::uint64_t> seeds;
    std::string output_path = "sweep_out";
};

/// Largest cartesian product (including seeds) a sweep may expand to.
inline constexpr std::size_t kMaxSweepRuns = 10000;

SweepConfig parse_sweep(const nlohmann::json &j);
SweepConfig load_sweep(const std::filesystem::path &path);

struct SweepRun {
    ExperimentConfig config;
    /// Axis values of this run, in axis order, rendered as text.
    std::vector<std::string> labels;
};

/// Expands axes x seeds in row-major order (last axis fastest, seeds innermost).
std::vector<SweepRun> expand_sweep(const SweepConfig &sweep);

} // namespace pushsum
