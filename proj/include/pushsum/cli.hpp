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

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "pushsum/algorithms.hpp"
#include "pushsum/analysis.hpp"
#include "pushsum/config.hpp"

namespace pushsum::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kConfigError = 2, kNumericFailure = 3 };

/// Checks accepted by cmd_verify.
inline const std::vector<std::string> kAllChecks = {"lemma1", "lemma2", "theorem1", "identities"};

/// Tolerance of the per-round identity residuals checked by `identities`.
inline constexpr double kIdentityTolerance = 1e-10;

struct VerifyHooks {
    /// Called on the recorded weight sequence before the verifiers run.
    std::function<void(std::vector<WeightMatrix> &)> mutate_weights;
};

nlohmann::json summary_json(const ExperimentConfig &config, const ExperimentResult &result);
nlohmann::json report_json(const VerificationReport &report);

/// Builds the problem and runs one configured experiment.
ExperimentResult execute(const ExperimentConfig &config, bool record_trace = false);

/// Writes metrics.csv, summary.json (and state.csv when requested) into `dir`.
void write_run_outputs(const std::filesystem::path &dir, const ExperimentConfig &config, const ExperimentResult &result);

/// Verifiers over a finished, traced run. Throws ConfigError for theorem1 on SADDOPT (no push-sum form).
std::vector<VerificationReport> run_checks(const ExperimentConfig &config, ExperimentResult &result,
                                           const std::vector<std::string> &checks, const VerifyHooks &hooks = {});

int cmd_run(const std::filesystem::path &config_path, const std::optional<std::filesystem::path> &out = std::nullopt);

int cmd_verify(const std::filesystem::path &config_path, const std::vector<std::string> &checks,
               const std::optional<std::filesystem::path> &out = std::nullopt, const VerifyHooks &hooks = {});

/// jobs == 0 uses the available parallelism.
int cmd_sweep(const std::filesystem::path &sweep_path, std::size_t jobs = 0,
              const std::optional<std::filesystem::path> &out = std::nullopt);

/// Aggregate CSV header for a sweep with the given axis names.
std::string sweep_header(const std::vector<SweepAxis> &axes);

} // namespace pushsum::cli
