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

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pushsum/cli.hpp"

int main(int argc, char **argv) {
    CLI::App app{"Push-sum consensus and decentralized optimization lab"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::vector<std::string> checks;
    std::size_t jobs = 0;

    auto *run = app.add_subcommand("run", "Run one experiment and write metrics.csv and summary.json");
    run->add_option("config", config_path, "Experiment config (JSON)")->required();
    run->add_option("--out", out_dir, "Output directory (overrides output_path)");

    auto *verify = app.add_subcommand("verify", "Run an experiment and check the consensus lemmas and identities");
    verify->add_option("config", config_path, "Experiment config (JSON)")->required();
    verify->add_option("--checks", checks, "Comma-separated subset of lemma1,lemma2,theorem1,identities")
        ->delimiter(',')
        ->check(CLI::IsMember(pushsum::cli::kAllChecks));
    verify->add_option("--out", out_dir, "Output directory (overrides output_path)");

    auto *sweep = app.add_subcommand("sweep", "Run a cartesian grid of experiments concurrently");
    sweep->add_option("sweep", config_path, "Sweep config (JSON)")->required();
    sweep->add_option("--jobs", jobs, "Concurrent runs (default: available parallelism)");
    sweep->add_option("--out", out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : pushsum::cli::kConfigError;
    }

    const std::optional<std::filesystem::path> out =
        out_dir.empty() ? std::nullopt : std::optional<std::filesystem::path>(out_dir);
    if (*run) return pushsum::cli::cmd_run(config_path, out);
    if (*verify) return pushsum::cli::cmd_verify(config_path, checks, out);
    return pushsum::cli::cmd_sweep(config_path, jobs, out);
}
