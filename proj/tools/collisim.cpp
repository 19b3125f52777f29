// Copyright 2026 The collisim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "collisim/acceptance.hpp"
#include "collisim/config.hpp"
#include "collisim/errors.hpp"
#include "collisim/experiments.hpp"

namespace {

collisim::Config load_or_preset(const std::string& arg) {
    if (std::filesystem::exists(arg)) return collisim::Config::load(arg);
    // Bare registry ids run with their defaults.
    collisim::find_experiment(arg);
    collisim::Config c;
    c.set("experiment", arg);
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"collisim: dissipative quantum collisional classifier"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned threads = 1;

    auto* run_cmd = app.add_subcommand("run", "run an experiment config (or a registry id)");
    std::string config_path;
    run_cmd->add_option("config", config_path, "config file or experiment id")->required();
    run_cmd->add_option("--seed", seed, "seed (default: COLLISIM_SEED or built-in)");
    run_cmd->add_option("--out", out, "output CSV path");
    run_cmd->add_option("--threads", threads, "worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 256u));

    auto* verify_cmd = app.add_subcommand("verify", "run the acceptance criteria");
    verify_cmd->add_option("--seed", seed, "seed (default: COLLISIM_SEED or built-in)");
    verify_cmd->add_option("--out", out, "write the JSON-lines report here instead of stdout");
    verify_cmd->add_option("--threads", threads, "worker threads; results do not depend on it")
        ->check(CLI::Range(1u, 256u));

    app.add_subcommand("list", "list registered experiments");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list")) {
            for (const auto& e : collisim::experiment_registry()) {
                std::printf("%-7s %s\n", e.id.c_str(), e.description.c_str());
            }
            return 0;
        }
        if (app.got_subcommand("run")) {
            const collisim::Config cfg = load_or_preset(config_path);
            std::optional<std::filesystem::path> path;
            if (!out.empty()) path = out;
            const auto summary = collisim::run(cfg, path, seed, threads);
            std::printf("wrote %s (%zu rows, config_hash %s)\n", summary.path.string().c_str(),
                        summary.rows, summary.config_hash.c_str());
            return 0;
        }
        collisim::VerifyOptions opts;
        opts.seed = seed.value_or(collisim::default_seed());
        opts.threads = threads;
        const auto results = collisim::verify(opts);
        const std::string report = collisim::report_jsonl(results);
        if (out.empty()) {
            std::cout << report;
        } else {
            collisim::write_atomic(out, report);
        }
        bool ok = true;
        for (const auto& r : results) {
            std::fprintf(stderr, "%s %s\n", r.pass() ? "PASS" : "FAIL", r.id.c_str());
            ok = ok && r.pass();
        }
        return ok ? 0 : 1;
    } catch (const collisim::ConfigError& e) {
        std::fprintf(stderr, "invalid config: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
