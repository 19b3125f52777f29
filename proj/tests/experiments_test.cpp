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

#include "collisim/experiments.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "collisim/acceptance.hpp"
#include "collisim/config.hpp"
#include "collisim/errors.hpp"

using namespace collisim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "collisim_experiments_test";
    fs::create_directories(dir);
    return dir / name;
}

std::vector<std::string> data_lines(const std::string& csv) {
    std::vector<std::string> out;
    std::istringstream in(csv);
    for (std::string line; std::getline(in, line);) {
        if (!line.empty() && line[0] != '#') out.push_back(line);
    }
    return out;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    for (std::string cell; std::getline(in, cell, ',');) out.push_back(cell);
    return out;
}

Config cfg(const std::string& text) { return Config::parse(text); }

}  // namespace

TEST(Config, ParsesCommentsAndExpressions) {
    const Config c = cfg("# header\nexperiment = fig2a  # trailing\nreservoir.1.theta = pi/2\n"
                         "noise.gamma_theta = 1/2e-5\nlist = 1, 2.5, -pi\n");
    EXPECT_EQ(c.get("experiment"), "fig2a");
    EXPECT_DOUBLE_EQ(c.get_double("reservoir.1.theta"), std::numbers::pi / 2);
    EXPECT_DOUBLE_EQ(c.get_double("noise.gamma_theta"), 5e4);
    EXPECT_EQ(c.get_doubles("list"), (std::vector<double>{1.0, 2.5, -std::numbers::pi}));
}

TEST(Config, RejectsMalformedInput) {
    EXPECT_THROW(cfg("experiment fig2a\n"), ConfigError);
    EXPECT_THROW(cfg("a = 1\na = 2\n"), ConfigError);
    EXPECT_THROW(cfg("bad key = 1\n"), ConfigError);
    EXPECT_THROW(cfg("x = abc\n").get_double("x"), ConfigError);
    EXPECT_THROW(cfg("x = 1\n").get("y"), ConfigError);
}

TEST(Config, HashIsStable) {
    EXPECT_EQ(fnv1a_hex(""), "cbf29ce484222325");
    EXPECT_EQ(fnv1a_hex("a"), "af63dc4c8601ec8c");
}

TEST(Experiments, RegistryListsEveryFigure) {
    std::vector<std::string> ids;
    for (const auto& e : experiment_registry()) ids.push_back(e.id);
    const std::vector<std::string> expected{"fig2a", "fig2b", "fig2e", "fig2f", "fig2g", "fig3",
                                            "fig4a", "fig4b", "fig4c", "fig4d", "fig4e", "fig4f",
                                            "fig5",  "fig6",  "fig7",  "fig8",  "custom"};
    EXPECT_EQ(ids, expected);
    EXPECT_THROW(find_experiment("fig9"), ConfigError);
}

TEST(Experiments, UnknownKeysAreRejected) {
    EXPECT_THROW(effective_config(cfg("experiment = fig2a\nschedule.typo = 3\n")), ConfigError);
    EXPECT_THROW(effective_config(cfg("schedule.tau = 3\n")), ConfigError);
    EXPECT_NO_THROW(effective_config(cfg("experiment = fig2a\nschedule.tau = 2\n")));
}

TEST(Experiments, CustomWithoutReservoirsIsInvalid) {
    const Config eff = effective_config(cfg("experiment = custom\nreservoir.count = 0\n"));
    EXPECT_THROW(run_experiment(eff), ConfigError);
}

TEST(Experiments, Fig2aCsvLayout) {
    const fs::path out = scratch("fig2a.csv");
    const auto summary = run(cfg("experiment = fig2a\n"), out, 11);
    const std::string csv = slurp(out);
    EXPECT_EQ(csv.rfind("# collisim 1.0.0\n# experiment = fig2a\n# seed = 11\n", 0), 0u);
    EXPECT_NE(csv.find("# config_hash = " + summary.config_hash + "\n"), std::string::npos);
    EXPECT_NE(csv.find("# config schedule.k_mean = 18000\n"), std::string::npos);
    EXPECT_FALSE(fs::exists(out.string() + ".tmp"));
    const auto lines = data_lines(csv);
    ASSERT_EQ(lines.size(), 18001u);
    EXPECT_EQ(lines[0], "slot,time,collided,sx,sy,sz");
    EXPECT_EQ(summary.rows, 18000u);
    const auto last = split(lines.back());
    ASSERT_EQ(last.size(), 6u);
    EXPECT_NEAR(std::stod(last[5]), 1.0, 0.02);
}

TEST(Experiments, DoublesUseSeventeenDigits) {
    EXPECT_EQ(format_double(0.1), "0.10000000000000001");
    EXPECT_EQ(format_double(1.0), "1");
    EXPECT_EQ(std::stod(format_double(1.0 / 3.0)), 1.0 / 3.0);
}

TEST(Experiments, ReproducibleAcrossRunsAndThreads) {
    const Config user = cfg("experiment = fig4c\npoints = 6\nschedule.k_mean = 3000\n");
    const Config eff = effective_config(user, 5);
    const std::string a = render_csv(eff, run_experiment(eff, 1));
    const std::string b = render_csv(eff, run_experiment(eff, 1));
    const std::string c = render_csv(eff, run_experiment(eff, 3));
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, c);
    const Config other = effective_config(user, 6);
    EXPECT_NE(data_lines(a), data_lines(render_csv(other, run_experiment(other, 1))));
}

TEST(Experiments, SeedFromEnvironment) {
    ::setenv("COLLISIM_SEED", "4242", 1);
    EXPECT_EQ(effective_config(cfg("experiment = fig8\n")).get("seed"), "4242");
    EXPECT_EQ(effective_config(cfg("experiment = fig8\n"), 7).get("seed"), "7");
    ::unsetenv("COLLISIM_SEED");
    EXPECT_EQ(effective_config(cfg("experiment = fig8\n")).get_uint64("seed"), kDefaultSeed);
}

TEST(Experiments, Fig7TracesConverge) {
    const Config eff = effective_config(cfg("experiment = fig7\n"));
    const ExperimentOutput out = run_experiment(eff);
    ASSERT_EQ(out.notes.size(), 3u);
    for (const auto& n : out.notes) EXPECT_NE(n.find("converged=true"), std::string::npos) << n;
    EXPECT_EQ(out.table.columns()[0], "eta");
}

TEST(Experiments, Fig3ReportsBothRuns) {
    const Config eff =
        effective_config(cfg("experiment = fig3\nschedule.k_mean = 4000\n"));
    const ExperimentOutput out = run_experiment(eff);
    bool residual = false;
    for (const auto& n : out.notes) residual |= n.find("paper-inconsistent input") != std::string::npos;
    EXPECT_TRUE(residual);
}

TEST(Experiments, EveryPresetRunsWhenShrunk) {
    // Small overrides keep each preset quick; this only checks the plumbing.
    const std::vector<std::pair<std::string, std::string>> shrink{
        {"fig2b", "schedule.k_mean = 500\n"},
        {"fig2e", "k_values = 100, 200\nschedule.total_time = 1000\n"},
        {"fig2f", "sweep.points = 5\n"},
        {"fig2g", "sweep.points = 5\n"},
        {"fig4a", "grid.size = 3\nschedule.k_mean = 300\n"},
        {"fig4b", "grid.size = 3\nk_values = 100, 200\nschedule.total_time = 1000\n"},
        {"fig4d", "sweep.points = 3\nschedule.total_time = 3000\nschedule.k_mean = 500\n"},
        {"fig4e", "sweep.points = 3\nschedule.total_time = 3000\nschedule.k_mean = 500\n"},
        {"fig4f", "points = 3\nschedule.k_mean = 300\n"},
        {"fig5", ""},
        {"fig6", ""},
        {"fig8", "surface.points = 5\n"},
        {"custom", "reservoir.count = 3\nschedule.k_mean = 200\n"},
    };
    for (const auto& [id, extra] : shrink) {
        SCOPED_TRACE(id);
        const Config eff = effective_config(cfg("experiment = " + id + "\n" + extra));
        const ExperimentOutput out = run_experiment(eff);
        EXPECT_GT(out.table.size(), 0u);
    }
}

TEST(Verify, ToleranceOverrideMakesACriterionFail) {
    VerifyOptions opt;
    opt.only = {"statistics"};
    auto res = verify(opt);
    ASSERT_EQ(res.size(), 1u);
    EXPECT_TRUE(res[0].pass());
    opt.tolerance_overrides["statistics.p_relation"] = -1.0;
    res = verify(opt);
    EXPECT_FALSE(res[0].pass());
    opt.only = {"nonsense"};
    EXPECT_THROW(verify(opt), InvalidArgument);
}

TEST(Verify, ReportIsJsonLines) {
    VerifyOptions opt;
    opt.only = {"statistics", "qfi_consistency"};
    const std::string a = report_jsonl(verify(opt));
    EXPECT_EQ(a, report_jsonl(verify(opt)));
    std::istringstream in(a);
    int lines = 0;
    for (std::string line; std::getline(in, line); ++lines) {
        EXPECT_EQ(line.front(), '{');
        EXPECT_NE(line.find("\"pass\":"), std::string::npos);
        EXPECT_NE(line.find("\"tolerance\":"), std::string::npos);
    }
    EXPECT_EQ(lines, 2);
}

#ifdef COLLISIM_CLI_PATH
namespace {
int sh(const std::string& args) {
    const std::string cmd = std::string(COLLISIM_CLI_PATH) + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}
}  // namespace

TEST(Cli, ListRunAndErrors) {
    EXPECT_EQ(sh("list"), 0);
    const fs::path cfg_path = scratch("cli.cfg");
    {
        std::ofstream f(cfg_path);
        f << "experiment = fig8\nsurface.points = 4\n";
    }
    const fs::path out = scratch("cli.csv");
    fs::remove(out);
    EXPECT_EQ(sh("run " + cfg_path.string() + " --out " + out.string() + " --seed 3"), 0);
    EXPECT_TRUE(fs::exists(out));
    EXPECT_EQ(data_lines(slurp(out)).size(), 17u);
    {
        std::ofstream f(cfg_path);
        f << "experiment = fig8\nsurface.bogus = 4\n";
    }
    EXPECT_NE(sh("run " + cfg_path.string() + " --out " + out.string()), 0);
    EXPECT_NE(sh("run fig99"), 0);
    EXPECT_NE(sh("frobnicate"), 0);
}
#endif
