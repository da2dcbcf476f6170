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

#include "pushsum/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pushsum/error.hpp"

namespace pushsum {

using nlohmann::json;

namespace {

template <typename T> T get_or(const json &j, const char *key, T fallback) {
    if (!j.contains(key)) return fallback;
    return j.at(key).get<T>();
}

const json &require(const json &j, const char *key, const char *where) {
    if (!j.is_object() || !j.contains(key))
        throw ConfigError(std::string(where) + ": missing required field '" + key + "'");
    return j.at(key);
}

GraphSpec parse_topology(const json &j) {
    GraphSpec g;
    g.kind = parse_graph_kind(require(j, "kind", "topology").get<std::string>());
    g.n_nodes = require(j, "n_nodes", "topology").get<std::size_t>();
    g.period_b = get_or<std::size_t>(j, "period_b", 1);
    g.p_inner = get_or(j, "p_inner", 0.5);
    g.p_inter = get_or(j, "p_inter", 0.25);
    g.seed = get_or<std::uint64_t>(j, "seed", 0);
    if (j.contains("cluster_split")) {
        const auto &cs = j.at("cluster_split");
        if (!cs.is_array() || cs.size() != 2) throw ConfigError("topology: cluster_split must be a pair of index lists");
        g.cluster_split.cluster0 = cs.at(0).get<std::vector<std::size_t>>();
        g.cluster_split.cluster1 = cs.at(1).get<std::vector<std::size_t>>();
    } else {
        g.cluster_split = ClusterSplit::halves(g.n_nodes);
    }
    return g;
}

ProblemSpec parse_problem(const json &j) {
    ProblemSpec p;
    p.kind = parse_problem_kind(require(j, "kind", "problem").get<std::string>());
    p.dim_d = require(j, "dim_d", "problem").get<std::size_t>();
    p.n_nodes = require(j, "n_nodes", "problem").get<std::size_t>();
    p.heterogeneity = get_or(j, "heterogeneity", 1.0);
    p.noise_sigma = get_or(j, "noise_sigma", 0.0);
    p.seed = get_or<std::uint64_t>(j, "seed", 0);
    p.shared_curvature = get_or(j, "shared_curvature", false);
    p.samples_per_node = get_or<std::size_t>(j, "samples_per_node", 64);
    p.batch_size = get_or<std::size_t>(j, "batch_size", 8);
    return p;
}

OptimizerSpec parse_optimizer(const json &j) {
    OptimizerSpec o;
    o.kind = parse_optimizer_kind(require(j, "kind", "optimizer").get<std::string>());
    o.gamma = require(j, "gamma", "optimizer").get<double>();
    o.beta = get_or(j, "beta", 0.0);
    return o;
}

WeightingMethod parse_weighting(const json &j, double gamma) {
    const auto method = get_or<std::string>(j, "method", "Moreau");
    if (method == "UniformOutDegree") return UniformOutDegree{};
    if (method != "Moreau") throw ConfigError("weighting: unknown method '" + method + "' (expected Moreau or UniformOutDegree)");
    MoreauParams p;
    p.v = get_or(j, "v", 0.1);
    p.steepness_k = get_or(j, "k", 0.01);
    p.step_gamma = get_or(j, "step_gamma", gamma);
    return p;
}

json read_json_file(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path.string() + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::exception &e) {
        throw ConfigError("'" + path.string() + "' is not valid JSON: " + e.what());
    }
}

} // namespace

void ExperimentConfig::validate() const {
    topology.validate();
    problem.validate();
    optimizer.validate();
    if (const auto *p = std::get_if<MoreauParams>(&weighting)) p->validate();
    if (topology.n_nodes != problem.n_nodes)
        throw ConfigError("config: topology.n_nodes (" + std::to_string(topology.n_nodes) + ") and problem.n_nodes (" +
                          std::to_string(problem.n_nodes) + ") differ");
    if (horizon_t < 2) throw ConfigError("config: horizon_t must be >= 2");
    if (!(init_scale >= 0.0) || !std::isfinite(init_scale)) throw ConfigError("config: init_scale must be >= 0");
}

ExperimentConfig parse_config(const json &j) {
    if (!j.is_object()) throw ConfigError("config: top level must be a JSON object");
    try {
        ExperimentConfig c;
        c.topology = parse_topology(require(j, "topology", "config"));
        c.problem = parse_problem(require(j, "problem", "config"));
        c.optimizer = parse_optimizer(require(j, "optimizer", "config"));
        c.weighting = parse_weighting(j.contains("weighting") ? j.at("weighting") : json::object(), c.optimizer.gamma);
        c.horizon_t = require(j, "horizon_t", "config").get<std::uint64_t>();
        c.seed = get_or<std::uint64_t>(j, "seed", 0);
        c.output_path = get_or<std::string>(j, "output_path", "out");
        c.init_scale = get_or(j, "init_scale", 1.0);
        c.dump_state = get_or(j, "dump_state", false);
        c.validate();
        return c;
    } catch (const json::exception &e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
}

json to_json(const ExperimentConfig &c) {
    json j;
    j["topology"] = {{"kind", std::string(to_string(c.topology.kind))},
                     {"n_nodes", c.topology.n_nodes},
                     {"period_b", c.topology.period_b},
                     {"p_inner", c.topology.p_inner},
                     {"p_inter", c.topology.p_inter},
                     {"cluster_split", json::array({c.topology.cluster_split.cluster0, c.topology.cluster_split.cluster1})},
                     {"seed", c.topology.seed}};
    j["problem"] = {{"kind", std::string(to_string(c.problem.kind))},
                    {"dim_d", c.problem.dim_d},
                    {"n_nodes", c.problem.n_nodes},
                    {"heterogeneity", c.problem.heterogeneity},
                    {"noise_sigma", c.problem.noise_sigma},
                    {"seed", c.problem.seed},
                    {"shared_curvature", c.problem.shared_curvature},
                    {"samples_per_node", c.problem.samples_per_node},
                    {"batch_size", c.problem.batch_size}};
    j["optimizer"] = {{"kind", std::string(to_string(c.optimizer.kind))}, {"gamma", c.optimizer.gamma}, {"beta", c.optimizer.beta}};
    if (const auto *p = std::get_if<MoreauParams>(&c.weighting))
        j["weighting"] = {{"method", "Moreau"}, {"v", p->v}, {"k", p->steepness_k}, {"step_gamma", p->step_gamma}};
    else
        j["weighting"] = {{"method", "UniformOutDegree"}};
    j["horizon_t"] = c.horizon_t;
    j["seed"] = c.seed;
    j["output_path"] = c.output_path;
    j["init_scale"] = c.init_scale;
    j["dump_state"] = c.dump_state;
    return j;
}

std::uint64_t seed_from_env(std::uint64_t configured) {
    const char *raw = std::getenv(kSeedEnvVar);
    if (raw == nullptr || *raw == '\0') return configured;
    char *end = nullptr;
    errno = 0;
    const unsigned long long v = std::strtoull(raw, &end, 10);
    if (errno != 0 || end == raw || *end != '\0' || raw[0] == '-')
        throw ConfigError(std::string(kSeedEnvVar) + " must be an unsigned 64-bit decimal integer");
    return v;
}

ExperimentConfig load_config(const std::filesystem::path &path) {
    ExperimentConfig c = parse_config(read_json_file(path));
    c.seed = seed_from_env(c.seed);
    return c;
}

SweepConfig parse_sweep(const json &j) {
    if (!j.is_object()) throw ConfigError("sweep: top level must be a JSON object");
    try {
        SweepConfig s;
        s.base = require(j, "base", "sweep");
        if (j.contains("axes")) {
            const auto &axes = j.at("axes");
            if (!axes.is_object()) throw ConfigError("sweep: axes must be an object of name -> list");
            for (const auto &[name, values] : axes.items()) {
                if (!values.is_array() || values.empty())
                    throw ConfigError("sweep: axis '" + name + "' must be a non-empty list");
                s.axes.push_back({name, values.get<std::vector<json>>()});
            }
        }
        s.seeds = get_or<std::vector<std::uint64_t>>(j, "seeds", {});
        s.output_path = get_or<std::string>(j, "output_path", get_or<std::string>(s.base, "output_path", "sweep_out"));
        return s;
    } catch (const json::exception &e) {
        throw ConfigError(std::string("sweep: ") + e.what());
    }
}

SweepConfig load_sweep(const std::filesystem::path &path) { return parse_sweep(read_json_file(path)); }

std::vector<SweepRun> expand_sweep(const SweepConfig &sweep) {
    std::vector<std::uint64_t> seeds = sweep.seeds;
    if (seeds.empty()) seeds.push_back(get_or<std::uint64_t>(sweep.base, "seed", 0));
    if (std::getenv(kSeedEnvVar) != nullptr) seeds = {seed_from_env(0)};

    std::size_t total = seeds.size();
    for (const auto &axis : sweep.axes) {
        total *= axis.values.size();
        if (total > kMaxSweepRuns)
            throw ConfigError("sweep: cartesian product exceeds " + std::to_string(kMaxSweepRuns) + " runs");
    }

    std::vector<SweepRun> runs;
    runs.reserve(total);
    std::vector<std::size_t> idx(sweep.axes.size(), 0);
    const std::size_t combos = total / seeds.size();
    for (std::size_t c = 0; c < combos; ++c) {
        // Decode c into per-axis indices, last axis fastest.
        std::size_t rem = c;
        for (std::size_t a = sweep.axes.size(); a-- > 0;) {
            idx[a] = rem % sweep.axes[a].values.size();
            rem /= sweep.axes[a].values.size();
        }
        json j = sweep.base;
        std::vector<std::string> labels;
        for (std::size_t a = 0; a < sweep.axes.size(); ++a) {
            const auto &axis = sweep.axes[a];
            const json &value = axis.values[idx[a]];
            labels.push_back(value.is_string() ? value.get<std::string>() : value.dump());
            if (axis.name == "n_nodes") {
                j["topology"]["n_nodes"] = value;
                j["problem"]["n_nodes"] = value;
                j["topology"].erase("cluster_split");
                continue;
            }
            std::string pointer = "/" + axis.name;
            for (char &ch : pointer)
                if (ch == '.') ch = '/';
            try {
                j[json::json_pointer(pointer)] = value;
            } catch (const json::exception &e) {
                throw ConfigError("sweep: bad axis path '" + axis.name + "': " + e.what());
            }
        }
        for (std::uint64_t seed : seeds) {
            json js = j;
            js["seed"] = seed;
            runs.push_back({parse_config(js), labels});
        }
    }
    return runs;
}

} // namespace pushsum
