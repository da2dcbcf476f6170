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

#include "pushsum/cli.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <omp.h>

#include "pushsum/error.hpp"

namespace pushsum::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <typename F> int guarded(F &&body) {
    try {
        return body();
    } catch (const NumericError &e) {
        std::cerr << "numeric failure: " << e.what() << '\n';
        return kNumericFailure;
    } catch (const std::invalid_argument &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const json::exception &e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::ios_base::failure &e) {
        std::cerr << "io error: " << e.what() << '\n';
        return kConfigError;
    }
}

std::ofstream open_out(const fs::path &path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + path.string() + "'");
    return os;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

VerificationReport identities_report(const RunSummary &s) {
    VerificationReport r;
    r.check = "identities";
    r.stats = {{"max_lemma5_resid", s.max_lemma5_resid},
               {"max_lemma10_resid", s.max_lemma10_resid},
               {"max_mass_resid", s.max_mass_resid},
               {"max_normalizer_resid", s.max_normalizer_resid},
               {"lemma6_lhs", s.lemma6_lhs},
               {"lemma6_rhs", s.lemma6_rhs}};
    const double worst_resid =
        std::max({s.max_lemma5_resid, s.max_lemma10_resid, s.max_mass_resid, s.max_normalizer_resid});
    const double lemma6_slack = s.lemma6_rhs - s.lemma6_lhs + kBoundSlack;
    r.worst_margin = std::min(kIdentityTolerance - worst_resid, lemma6_slack);
    r.passed = worst_resid <= kIdentityTolerance && lemma6_slack >= 0.0;
    return r;
}

VerificationReport failed_precondition(const std::string &check, const std::string &why) {
    VerificationReport r;
    r.check = check;
    r.passed = false;
    r.worst_margin = -std::numeric_limits<double>::infinity();
    r.stats["precondition_failed"] = 1.0;
    std::cerr << check << ": precondition failed: " << why << '\n';
    return r;
}

} // namespace

json report_json(const VerificationReport &r) {
    json j;
    j["check"] = r.check;
    j["passed"] = r.passed;
    j["worst_margin"] = std::isfinite(r.worst_margin) ? json(r.worst_margin) : json(nullptr);
    j["worst_round"] = r.worst_round;
    j["details"] = r.details;
    j["stats"] = r.stats;
    return j;
}

json summary_json(const ExperimentConfig &config, const ExperimentResult &result) {
    const RunSummary &s = result.summary;
    json j;
    j["config"] = to_json(config);
    j["seed"] = config.seed;
    j["final"] = {{"loss", s.final_loss},
                  {"grad_norm_sq", s.final_grad_norm_sq},
                  {"average", s.final_average},
                  {"mean_consensus_l1", s.mean_consensus_l1},
                  {"total_scalars_sent", s.total_scalars_sent}};
    j["bounds"] = {{"delta", s.bounds.delta},
                   {"diameter_delta", s.bounds.diameter_delta},
                   {"period_b", s.bounds.period_b},
                   {"C", s.bounds.lemma_c},
                   {"lambda", s.bounds.lambda},
                   {"log_lambda", s.bounds.log_lambda}};
    j["identities"] = {{"max_lemma5_resid", s.max_lemma5_resid},   {"max_lemma10_resid", s.max_lemma10_resid},
                       {"max_mass_resid", s.max_mass_resid},       {"max_normalizer_resid", s.max_normalizer_resid},
                       {"lemma6_lhs", s.lemma6_lhs},               {"lemma6_rhs", s.lemma6_rhs}};
    j["min_weight_entry"] = s.min_weight_entry;
    j["max_out_degree"] = s.max_out_degree;
    return j;
}

ExperimentResult execute(const ExperimentConfig &config, bool record_trace) {
    config.validate();
    const auto problem = make_problem(config.problem);
    RunOptions opts;
    opts.init_scale = config.init_scale;
    opts.dump_state = config.dump_state;
    opts.record_trace = record_trace;
    return run_experiment(*problem, config.topology, config.optimizer, config.weighting, config.horizon_t, config.seed,
                          opts);
}

void write_run_outputs(const fs::path &dir, const ExperimentConfig &config, const ExperimentResult &result) {
    fs::create_directories(dir);
    {
        auto os = open_out(dir / "metrics.csv");
        result.log.write_csv(os);
    }
    {
        auto os = open_out(dir / "summary.json");
        os << summary_json(config, result).dump(2) << '\n';
    }
    if (config.dump_state) {
        auto os = open_out(dir / "state.csv");
        write_state_csv(os, result.state_rows);
    }
}

std::vector<VerificationReport> run_checks(const ExperimentConfig &config, ExperimentResult &result,
                                           const std::vector<std::string> &checks, const VerifyHooks &hooks) {
    for (const auto &c : checks)
        if (std::find(kAllChecks.begin(), kAllChecks.end(), c) == kAllChecks.end())
            throw ConfigError("unknown check '" + c + "' (expected lemma1, lemma2, theorem1, identities)");
    if (!result.trace) throw PreconditionError("run_checks needs a traced run");
    RunTrace &trace = *result.trace;
    if (hooks.mutate_weights) hooks.mutate_weights(trace.weights);
    const BoundParams &params = result.summary.bounds;

    std::vector<VerificationReport> reports;
    for (const auto &check : checks) {
        if (check == "lemma1" || check == "lemma2") {
            try {
                reports.push_back(check == "lemma1" ? verify_lemma1(trace.weights, params)
                                                    : verify_lemma2(trace.weights, params));
            } catch (const PreconditionError &e) {
                reports.push_back(failed_precondition(check, e.what()));
            }
        } else if (check == "theorem1") {
            if (config.optimizer.kind == OptimizerKind::SADDOPT)
                throw ConfigError("theorem1 applies to push-sum perturbation runs, not SADDOPT");
            reports.push_back(verify_theorem1(trace.trajectory, params, Norm::L1));
            reports.push_back(verify_theorem1(trace.trajectory, params, Norm::L2));
        } else {
            reports.push_back(identities_report(result.summary));
        }
    }
    return reports;
}

int cmd_run(const fs::path &config_path, const std::optional<fs::path> &out) {
    return guarded([&] {
        ExperimentConfig config = load_config(config_path);
        if (out) config.output_path = out->string();
        const ExperimentResult result = execute(config);
        write_run_outputs(config.output_path, config, result);
        return int{kOk};
    });
}

int cmd_verify(const fs::path &config_path, const std::vector<std::string> &checks, const std::optional<fs::path> &out,
               const VerifyHooks &hooks) {
    return guarded([&] {
        ExperimentConfig config = load_config(config_path);
        if (out) config.output_path = out->string();
        const std::vector<std::string> &requested = checks.empty() ? kAllChecks : checks;
        ExperimentResult result = execute(config, true);
        const auto reports = run_checks(config, result, requested, hooks);

        bool all_passed = true;
        json j;
        j["config"] = to_json(config);
        j["seed"] = config.seed;
        j["reports"] = json::array();
        for (const auto &r : reports) {
            all_passed = all_passed && r.passed;
            j["reports"].push_back(report_json(r));
            std::cout << (r.passed ? "PASS " : "FAIL ") << r.check << " worst_margin=" << fmt(r.worst_margin) << '\n';
        }
        j["passed"] = all_passed;
        fs::create_directories(config.output_path);
        auto os = open_out(fs::path(config.output_path) / "verification.json");
        os << j.dump(2) << '\n';
        return all_passed ? int{kOk} : int{kVerificationFailed};
    });
}

std::string sweep_header(const std::vector<SweepAxis> &axes) {
    std::string h = "run";
    for (const auto &a : axes) h += "," + csv_escape(a.name);
    h += ",seed,status,final_loss,final_grad_norm_sq,mean_consensus_l1,total_scalars_sent,error";
    return h;
}

int cmd_sweep(const fs::path &sweep_path, std::size_t jobs, const std::optional<fs::path> &out) {
    return guarded([&] {
        SweepConfig sweep = load_sweep(sweep_path);
        if (out) sweep.output_path = out->string();
        const std::vector<SweepRun> runs = expand_sweep(sweep);
        const fs::path root = sweep.output_path;
        fs::create_directories(root / "runs");

        struct Outcome {
            int code = kOk;
            RunSummary summary;
            std::string error;
        };
        std::vector<Outcome> outcomes(runs.size());
        const int threads = jobs == 0 ? omp_get_max_threads() : static_cast<int>(jobs);
        const auto count = static_cast<std::ptrdiff_t>(runs.size());

#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (std::ptrdiff_t k = 0; k < count; ++k) {
            ExperimentConfig config = runs[static_cast<std::size_t>(k)].config;
            config.output_path = (root / "runs" / std::to_string(k)).string();
            Outcome &o = outcomes[static_cast<std::size_t>(k)];
            try {
                const ExperimentResult result = execute(config);
                write_run_outputs(config.output_path, config, result);
                o.summary = result.summary;
            } catch (const NumericError &e) {
                o.code = kNumericFailure;
                o.error = e.what();
            } catch (const std::exception &e) {
                o.code = kConfigError;
                o.error = e.what();
            }
        }

        auto os = open_out(root / "sweep.csv");
        os << sweep_header(sweep.axes) << '\n';
        int worst = kOk;
        for (std::size_t k = 0; k < runs.size(); ++k) {
            const Outcome &o = outcomes[k];
            os << k;
            for (const auto &label : runs[k].labels) os << ',' << csv_escape(label);
            os << ',' << runs[k].config.seed << ',' << (o.code == kOk ? "ok" : "failed");
            if (o.code == kOk) {
                os << ',' << fmt(o.summary.final_loss) << ',' << fmt(o.summary.final_grad_norm_sq) << ','
                   << fmt(o.summary.mean_consensus_l1) << ',' << o.summary.total_scalars_sent << ",\n";
            } else {
                os << ",,,,," << csv_escape(o.error) << '\n';
                std::cerr << "run " << k << " failed: " << o.error << '\n';
                worst = std::max(worst, o.code);
            }
        }
        return worst;
    });
}

} // namespace pushsum::cli
