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

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "collisim/classifier.hpp"
#include "collisim/collision.hpp"
#include "collisim/errors.hpp"
#include "collisim/master_equation.hpp"
#include "collisim/parallel.hpp"
#include "collisim/qfi.hpp"
#include "collisim/trainer.hpp"

namespace collisim {

namespace {

constexpr double kPi = std::numbers::pi;

using Defaults = std::vector<std::pair<std::string, std::string>>;

Defaults concat(std::initializer_list<Defaults> parts) {
    Defaults out;
    for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

Defaults reservoir(int i, const std::string& theta, const std::string& phi,
                   const std::string& coupling) {
    const std::string p = "reservoir." + std::to_string(i) + ".";
    return {{p + "theta", theta}, {p + "phi", phi}, {p + "coupling", coupling}};
}

Defaults simulation(const std::string& mode, const std::string& k_mean,
                    const std::string& total_time, const std::string& gamma_theta,
                    const std::string& gamma_phi, const std::string& probe_theta) {
    return {{"probe.theta", probe_theta},
            {"probe.phi", "0"},
            {"schedule.mode", mode},
            {"schedule.tau", "3"},
            {"schedule.tau0", "0"},
            {"schedule.k_mean", k_mean},
            {"schedule.total_time", total_time},
            {"schedule.overflow", "error"},
            {"schedule.collision", "simultaneous"},
            {"noise.gamma_theta", gamma_theta},
            {"noise.gamma_phi", gamma_phi},
            {"steady.window", "1000"},
            {"steady.tol", "0.01"}};
}

Defaults set(Defaults d, const std::string& key, const std::string& value) {
    for (auto& [k, v] : d) {
        if (k == key) {
            v = value;
            return d;
        }
    }
    d.emplace_back(key, value);
    return d;
}

std::vector<ExperimentInfo> build_registry() {
    const Defaults quiet18k = simulation("regular", "18000", "0", "0", "0", "pi/2");
    const Defaults fig4de =
        concat({simulation("stochastic", "18000", "1/9.09e-6", "9.09e-6", "7.41e-6", "0"),
                {{"rate", "0.16"},
                 {"coupling.total", "0.01"},
                 {"sweep.points", "21"},
                 {"sweep.min", "-0.5"},
                 {"sweep.max", "0.5"}}});
    std::vector<ExperimentInfo> r;
    r.push_back({"fig2a", "single reservoir theta=0: probe trajectory homogenizing to |e>",
                 concat({{{"reservoir.count", "1"}}, reservoir(1, "0", "0", "0.01"), quiet18k,
                         {{"output.stride", "1"}}})});
    r.push_back({"fig2b", "single reservoir theta=pi: probe trajectory homogenizing to |g>",
                 concat({{{"reservoir.count", "1"}}, reservoir(1, "pi", "0", "0.01"), quiet18k,
                         {{"output.stride", "1"}}})});
    r.push_back(
        {"fig2e", "noisy equilibration for several mean interaction numbers",
         concat({{{"reservoir.count", "1"}}, reservoir(1, "0", "0", "0.01"),
                 set(simulation("stochastic", "18000", "1/2e-5", "2e-5", "0", "pi/2"),
                     "schedule.overflow", "regular"),
                 {{"k_values", "10000, 12000, 18000"}, {"output.stride", "10"}}})});
    r.push_back({"fig2f", "single reservoir steady state against theta (phi=0)",
                 concat({{{"coupling", "0.01"}, {"phi", "0"}, {"rate", "1/3"}}, quiet18k,
                         {{"sweep.points", "37"}}})});
    r.push_back({"fig2g", "single reservoir steady state against phi for fixed theta values",
                 concat({{{"coupling", "0.01"}, {"thetas", "pi/3, 2*pi/3"}, {"rate", "1/3"}},
                         quiet18k, {{"sweep.points", "37"}}})});
    r.push_back(
        {"fig3", "two reservoirs theta=(0,pi) with unequal couplings under energy dissipation",
         concat({{{"reservoir.count", "2"}},
                 reservoir(1, "0", "0", "0.00737"),
                 reservoir(2, "pi", "0", "0.00263"),
                 set(simulation("regular", "18000", "0", "2e-5", "0", "pi/2"), "rate", "1/3"),
                 {{"runs.j1", "0.00737, 0.0036"},
                  {"runs.j2", "0.00263, 0.00631"},
                  {"output.stride", "10"}}})});
    r.push_back({"fig4a", "19x19 theta grid of steady magnetizations, equal couplings",
                 concat({{{"coupling", "0.01"}, {"phi", "0"}, {"rate", "1/3"}, {"grid.size", "19"}},
                         simulation("regular", "16000", "0", "0", "0", "pi/2")})});
    r.push_back(
        {"fig4b", "theta grid magnetization for several mean interaction numbers with noise",
         concat({{{"coupling", "0.01"}, {"phi", "0"}, {"rate", "1/3"}, {"grid.size", "19"},
                  {"k_values", "10000, 12000, 18000"}},
                 set(simulation("stochastic", "18000", "1/2e-5", "2e-5", "0", "pi/2"),
                     "schedule.overflow", "regular")})});
    r.push_back({"fig4c", "32 random theta pairs labelled by simulation and closed form",
                 concat({{{"coupling", "0.01"},
                          {"phi", "0"},
                          {"rate", "1/3"},
                          {"points", "32"},
                          {"classifier.engine", "simulate"}},
                         quiet18k})});
    r.push_back({"fig4d", "coupling imbalance sweep, theta=2pi/3, phi=(pi/2, 3pi/2)",
                 concat({{{"theta", "2*pi/3"}, {"phi1", "pi/2"}, {"phi2", "3*pi/2"}}, fig4de})});
    r.push_back({"fig4e", "coupling imbalance sweep, theta=pi/3, phi=(pi/2, 3pi/2)",
                 concat({{{"theta", "pi/3"}, {"phi1", "pi/2"}, {"phi2", "3*pi/2"}}, fig4de})});
    r.push_back({"fig4f", "32 random phi pairs at theta=pi/3 labelled by the phi rule",
                 concat({{{"coupling", "0.01"},
                          {"theta", "pi/3"},
                          {"rate", "0.16"},
                          {"points", "32"},
                          {"classifier.engine", "simulate"},
                          {"classifier.quadrature", "y"}},
                         set(quiet18k, "probe.theta", "0")})});
    r.push_back({"fig5", "QFI of a common theta shift across three trial layouts",
                 {{"coupling", "0.01"},
                  {"rate", "0.2"},
                  {"tau", "3"},
                  {"fixed.second", "11*pi/12"},
                  {"fixed.first", "pi/12"},
                  {"fd_step", "1e-6"}}});
    r.push_back({"fig6", "QFI of a common phi shift across three trial layouts",
                 {{"coupling", "0.01"},
                  {"theta", "pi/6"},
                  {"rate", "0.2"},
                  {"tau", "3"},
                  {"fixed.second", "0"},
                  {"fixed.first", "pi"},
                  {"fd_step", "1e-6"}}});
    r.push_back({"fig7", "gradient descent on the couplings for three learning rates",
                 {{"train.eta", "2.6e-5, 1.3e-5, 5.2e-5"},
                  {"train.target", "0.42"},
                  {"train.sz1", "0.94"},
                  {"train.sz2", "-0.10"},
                  {"train.j1", "0.002"},
                  {"train.j2", "0.05"},
                  {"train.max_iters", "100000"},
                  {"train.cost_tol", "1e-8"},
                  {"train.forward", "analytic"},
                  {"train.sim_slots", "18000"},
                  {"output.stride", "1"}}});
    r.push_back({"fig8", "cost surface over the coupling plane",
                 {{"train.target", "0.42"},
                  {"train.sz1", "0.94"},
                  {"train.sz2", "-0.10"},
                  {"surface.max", "0.06"},
                  {"surface.points", "61"}}});
    Defaults custom = concat({{{"reservoir.count", "1"}, {"rate", "1/3"}, {"output.stride", "1"}},
                              simulation("regular", "18000", "0", "0", "0", "pi/2")});
    for (int i = 1; i <= 4; ++i) {
        const Defaults res = reservoir(i, "0", "0", "0.01");
        custom.insert(custom.end(), res.begin(), res.end());
    }
    r.push_back({"custom", "user-defined reservoirs: trajectory plus closed-form summary", custom});
    return r;
}

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index) {
    // splitmix64 finalizer
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::string label_name(Label l) { return l == Label::class1 ? "class1" : "class2"; }

struct SimSetup {
    DensityMatrix probe;
    NoiseParams noise;
    SimulationOptions options;
};

SimSetup sim_setup(const Config& c) {
    SimSetup s{pure_state(BlochParams(c.get_double("probe.theta"), c.get_double("probe.phi"))),
               {c.get_double("noise.gamma_theta"), c.get_double("noise.gamma_phi")},
               {}};
    s.noise.validate();
    const std::string& mode = c.get("schedule.collision");
    if (mode == "mixture") {
        s.options.mode = CollisionMode::mixture;
    } else if (mode != "simultaneous") {
        throw ConfigError("schedule.collision must be 'simultaneous' or 'mixture'");
    }
    const auto window = c.get_int("steady.window");
    if (window <= 0) throw ConfigError("steady.window must be positive");
    s.options.window = static_cast<std::size_t>(window);
    s.options.tol = c.get_double("steady.tol");
    return s;
}

CollisionSchedule schedule_for(const Config& c, double k_mean, std::uint64_t seed) {
    const std::string& mode_name = c.get("schedule.mode");
    StatisticsMode mode;
    if (mode_name == "regular") {
        mode = StatisticsMode::regular;
    } else if (mode_name == "stochastic") {
        mode = StatisticsMode::stochastic;
    } else {
        throw ConfigError("schedule.mode must be 'regular' or 'stochastic'");
    }
    const double tau = c.get_double("schedule.tau");
    const double total = c.get_double("schedule.total_time");
    if (!(k_mean >= 1.0)) throw ConfigError("schedule.k_mean must be at least 1");
    if (total <= 0.0) {
        if (mode == StatisticsMode::stochastic) {
            throw ConfigError("stochastic statistics need schedule.total_time > 0");
        }
        CollisionSchedule s = CollisionSchedule::regular(
            static_cast<std::size_t>(std::llround(k_mean)), tau, c.get_double("schedule.tau0"));
        s.seed = seed;
        return s;
    }
    if (k_mean * tau > total) {
        const std::string& overflow = c.get("schedule.overflow");
        if (overflow == "regular") {
            CollisionSchedule s =
                CollisionSchedule::regular(static_cast<std::size_t>(std::llround(k_mean)), tau, 0.0);
            s.seed = seed;
            return s;
        }
        if (overflow != "error") throw ConfigError("schedule.overflow must be 'error' or 'regular'");
    }
    try {
        return CollisionSchedule::from_budget(total, k_mean, tau, mode, seed);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
}

std::vector<ReservoirSpec> reservoirs_from(const Config& c) {
    const auto n = c.get_int("reservoir.count");
    if (n < 1 || n > static_cast<std::int64_t>(kMaxReservoirs)) {
        throw ConfigError("reservoir.count must be between 1 and 4, got " + std::to_string(n));
    }
    std::vector<ReservoirSpec> specs;
    for (int i = 1; i <= n; ++i) {
        const std::string p = "reservoir." + std::to_string(i) + ".";
        const double theta = c.get_double(p + "theta");
        if (theta < -1e-12 || theta > kPi + 1e-12) throw ConfigError(p + "theta outside [0, pi]");
        specs.push_back({BlochParams(theta, c.get_double(p + "phi")), c.get_double(p + "coupling")});
    }
    try {
        validate_specs(specs);
    } catch (const InvalidArgument& e) {
        throw ConfigError(e.what());
    }
    return specs;
}

std::size_t stride_of(const Config& c) {
    const auto s = c.get_int("output.stride");
    if (s < 1) throw ConfigError("output.stride must be >= 1");
    return static_cast<std::size_t>(s);
}

std::size_t positive_count(const Config& c, const std::string& key) {
    const auto n = c.get_int(key);
    if (n < 1) throw ConfigError(key + " must be >= 1");
    return static_cast<std::size_t>(n);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        out[k] = n == 1 ? lo : lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(n - 1);
    }
    return out;
}

std::string schedule_note(const CollisionSchedule& s) {
    std::ostringstream o;
    o << "schedule: mode=" << (s.mode == StatisticsMode::regular ? "regular" : "stochastic")
      << " slots=" << s.slots << " p=" << format_double(s.p) << " tau=" << format_double(s.tau)
      << " tau0=" << format_double(s.tau0);
    return o.str();
}

void add_trajectory(CsvTable& t, const std::vector<Cell>& prefix, const TrajectoryRecord& rec,
                    std::size_t stride) {
    for (std::size_t k = 0; k < rec.bloch.size(); ++k) {
        if ((k + 1) % stride != 0 && k + 1 != rec.bloch.size()) continue;
        std::vector<Cell> row = prefix;
        row.insert(row.end(), {static_cast<std::int64_t>(k + 1), rec.slot_times[k],
                               static_cast<std::int64_t>(rec.collided[k] ? 1 : 0), rec.bloch[k].x,
                               rec.bloch[k].y, rec.bloch[k].z});
        t.add(std::move(row));
    }
}

std::string steady_note(const std::string& tag, const TrajectoryRecord& rec) {
    return "steady" + (tag.empty() ? std::string() : " " + tag) +
           ": sx=" + format_double(rec.steady.x) + " sy=" + format_double(rec.steady.y) +
           " sz=" + format_double(rec.steady.z) +
           " converged=" + (rec.converged ? "true" : "false");
}

ExperimentOutput run_trajectory(const Config& c, std::uint64_t seed) {
    const auto specs = reservoirs_from(c);
    const SimSetup s = sim_setup(c);
    const CollisionSchedule sched = schedule_for(c, c.get_double("schedule.k_mean"), seed);
    const TrajectoryRecord rec = simulate(s.probe, specs, sched, s.noise, s.options);
    ExperimentOutput out{CsvTable({"slot", "time", "collided", "sx", "sy", "sz"}), {}};
    add_trajectory(out.table, {}, rec, stride_of(c));
    out.notes.push_back(schedule_note(sched));
    out.notes.push_back(steady_note("", rec));
    if (c.has("rate")) {
        try {
            const auto cf = closed_form_steady_state(specs, c.get_double("rate"), sched.tau);
            out.notes.push_back("closed form: sx=" + format_double(cf.bloch.x) +
                                " sy=" + format_double(cf.bloch.y) +
                                " sz=" + format_double(cf.bloch.z));
        } catch (const DomainOfValidity& e) {
            out.notes.push_back(std::string("closed form unavailable: ") + e.what());
        }
    }
    return out;
}

ExperimentOutput run_fig2e(const Config& c, std::uint64_t seed, unsigned threads) {
    const auto specs = reservoirs_from(c);
    const SimSetup s = sim_setup(c);
    const auto ks = c.get_doubles("k_values");
    std::vector<CollisionSchedule> scheds;
    for (std::size_t i = 0; i < ks.size(); ++i) scheds.push_back(schedule_for(c, ks[i], mix_seed(seed, i)));
    std::vector<TrajectoryRecord> recs(ks.size());
    parallel_for(ks.size(), threads, [&](std::size_t i) {
        recs[i] = simulate(s.probe, specs, scheds[i], s.noise, s.options);
    });
    ExperimentOutput out{CsvTable({"k_mean", "mode", "p", "slot", "time", "collided", "sx", "sy", "sz"}), {}};
    for (std::size_t i = 0; i < ks.size(); ++i) {
        const std::string mode = scheds[i].mode == StatisticsMode::regular ? "regular" : "stochastic";
        add_trajectory(out.table, {ks[i], mode, scheds[i].p}, recs[i], stride_of(c));
        out.notes.push_back("k_mean=" + format_double(ks[i]) + " " + schedule_note(scheds[i]));
        out.notes.push_back(steady_note("k_mean=" + format_double(ks[i]), recs[i]));
    }
    return out;
}

ExperimentOutput run_single_sweep(const Config& c, std::uint64_t seed, unsigned threads,
                                  bool over_phi) {
    const SimSetup s = sim_setup(c);
    const double j = c.get_double("coupling");
    const double rate = c.get_double("rate");
    const std::size_t n = positive_count(c, "sweep.points");
    std::vector<std::pair<double, double>> pts;
    if (over_phi) {
        for (double th : c.get_doubles("thetas")) {
            for (double ph : linspace(0.0, 2 * kPi, n)) pts.emplace_back(th, ph);
        }
    } else {
        for (double th : linspace(0.0, kPi, n)) pts.emplace_back(th, c.get_double("phi"));
    }
    const CollisionSchedule sched = schedule_for(c, c.get_double("schedule.k_mean"), seed);
    struct Point {
        BlochVector cf, sim;
        bool converged;
    };
    std::vector<Point> res(pts.size());
    parallel_for(pts.size(), threads, [&](std::size_t i) {
        const std::vector<ReservoirSpec> specs{{BlochParams(pts[i].first, pts[i].second), j}};
        CollisionSchedule sc = sched;
        sc.seed = mix_seed(seed, i);
        const auto rec = simulate(s.probe, specs, sc, s.noise, s.options);
        res[i] = {closed_form_steady_state(specs, rate, sched.tau).bloch, rec.steady, rec.converged};
    });
    ExperimentOutput out{CsvTable({"theta", "phi", "sx_closed", "sy_closed", "sz_closed", "sx_sim",
                                   "sy_sim", "sz_sim", "converged"}),
                         {schedule_note(sched)}};
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& r = res[i];
        out.table.add({pts[i].first, pts[i].second, r.cf.x, r.cf.y, r.cf.z, r.sim.x, r.sim.y,
                       r.sim.z, static_cast<std::int64_t>(r.converged)});
    }
    return out;
}

ExperimentOutput run_fig3(const Config& c, std::uint64_t seed, unsigned threads) {
    const auto base = reservoirs_from(c);
    if (base.size() != 2) throw ConfigError("fig3 expects reservoir.count = 2");
    const SimSetup s = sim_setup(c);
    const auto j1 = c.get_doubles("runs.j1");
    const auto j2 = c.get_doubles("runs.j2");
    if (j1.size() != j2.size() || j1.empty()) throw ConfigError("runs.j1 and runs.j2 must pair up");
    const CollisionSchedule sched = schedule_for(c, c.get_double("schedule.k_mean"), seed);
    const double rate = c.get_double("rate");
    std::vector<TrajectoryRecord> recs(j1.size());
    std::vector<double> closed(j1.size());
    parallel_for(j1.size(), threads, [&](std::size_t i) {
        auto specs = base;
        specs[0].coupling = j1[i];
        specs[1].coupling = j2[i];
        CollisionSchedule sc = sched;
        sc.seed = mix_seed(seed, i);
        recs[i] = simulate(s.probe, specs, sc, s.noise, s.options);
        closed[i] = closed_form_steady_state(specs, rate, sched.tau).bloch.z;
    });
    ExperimentOutput out{CsvTable({"run", "j1", "j2", "sz_closed", "slot", "time", "collided", "sx",
                                   "sy", "sz"}),
                         {schedule_note(sched)}};
    for (std::size_t i = 0; i < j1.size(); ++i) {
        add_trajectory(out.table,
                       {static_cast<std::int64_t>(i), j1[i], j2[i], closed[i]}, recs[i],
                       stride_of(c));
        out.notes.push_back("run " + std::to_string(i) + ": closed form sz=" +
                            format_double(closed[i]) + "; " + steady_note("", recs[i]));
    }
    if (j1.size() > 1) {
        out.notes.push_back("run 1 target -0.492 is a paper-inconsistent input; residual " +
                            format_double(closed[1] + 0.492));
    }
    return out;
}

ExperimentOutput run_theta_grid(const Config& c, std::uint64_t seed, unsigned threads,
                                const std::vector<double>& ks) {
    const SimSetup s = sim_setup(c);
    const double j = c.get_double("coupling");
    const double phi = c.get_double("phi");
    const double rate = c.get_double("rate");
    const std::size_t n = positive_count(c, "grid.size");
    const auto grid = linspace(0.0, kPi, n);
    std::vector<CollisionSchedule> scheds;
    for (std::size_t q = 0; q < ks.size(); ++q) scheds.push_back(schedule_for(c, ks[q], seed));
    const std::size_t per = n * n;
    struct Point {
        double cf, sim;
        bool converged;
    };
    std::vector<Point> res(per * ks.size());
    parallel_for(res.size(), threads, [&](std::size_t idx) {
        const std::size_t q = idx / per;
        const std::size_t a = (idx % per) / n;
        const std::size_t b = idx % n;
        const std::vector<ReservoirSpec> specs{{BlochParams(grid[a], phi), j},
                                               {BlochParams(grid[b], phi), j}};
        CollisionSchedule sc = scheds[q];
        sc.seed = mix_seed(seed, idx);
        const auto rec = simulate(s.probe, specs, sc, s.noise, s.options);
        res[idx] = {closed_form_steady_state(specs, rate, sc.tau).bloch.z, rec.steady.z,
                    rec.converged};
    });
    ExperimentOutput out{CsvTable({"k_mean", "theta1", "theta2", "Theta", "sz_closed",
                                   "label_closed", "sz_sim", "label_sim", "converged"}),
                         {}};
    for (std::size_t q = 0; q < ks.size(); ++q) {
        out.notes.push_back("k_mean=" + format_double(ks[q]) + " " + schedule_note(scheds[q]));
        std::vector<std::vector<double>> sim(n, std::vector<double>(n));
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = 0; b < n; ++b) {
                const Point& p = res[q * per + a * n + b];
                sim[a][b] = p.sim;
                out.table.add({ks[q], grid[a], grid[b], kPi - grid[a] - grid[b], p.cf,
                               label_name(decide_theta(p.cf).label), p.sim,
                               label_name(decide_theta(p.sim).label),
                               static_cast<std::int64_t>(p.converged)});
            }
        }
        if (n >= 2) {
            out.notes.push_back("k_mean=" + format_double(ks[q]) +
                                " boundary max |theta1+theta2-pi| = " +
                                format_double(theta_boundary(grid, sim).max_offset));
        }
    }
    return out;
}

PatternConfig pattern_config(const Config& c, std::uint64_t seed, unsigned threads, bool phi) {
    PatternConfig p;
    p.space = phi ? ScanSpace::phi : ScanSpace::theta;
    const auto n = positive_count(c, "points");
    p.points = phi ? random_points(n, seed, 0.0, kPi, kPi, 2 * kPi)
                   : random_points(n, seed, 0.0, kPi, 0.0, kPi);
    if (phi) {
        p.fixed_theta = c.get_double("theta");
    } else {
        p.fixed_phi = c.get_double("phi");
    }
    p.j1 = p.j2 = c.get_double("coupling");
    p.rate = c.get_double("rate");
    const std::string& engine = c.get("classifier.engine");
    if (engine == "simulate") {
        p.engine = Engine::simulate;
    } else if (engine != "closed_form") {
        throw ConfigError("classifier.engine must be 'closed_form' or 'simulate'");
    }
    if (phi) {
        const std::string& q = c.get("classifier.quadrature");
        if (q == "x") {
            p.quadrature = Quadrature::x;
        } else if (q != "y") {
            throw ConfigError("classifier.quadrature must be 'x' or 'y'");
        }
    }
    const SimSetup s = sim_setup(c);
    p.schedule = schedule_for(c, c.get_double("schedule.k_mean"), seed);
    p.noise = s.noise;
    p.options = s.options;
    p.probe = BlochParams(c.get_double("probe.theta"), c.get_double("probe.phi"));
    p.threads = threads;
    return p;
}

ExperimentOutput run_pattern(const Config& c, std::uint64_t seed, unsigned threads, bool phi) {
    const PatternConfig p = pattern_config(c, seed, threads, phi);
    const PatternResult res = pattern_scan(p);
    const std::string a = phi ? "phi1" : "theta1";
    const std::string b = phi ? "phi2" : "theta2";
    const std::string q = phi ? (p.quadrature == Quadrature::y ? "sy" : "sx") : "sz";
    // the phi rule also reads sz, so it gets its own column there
    std::vector<std::string> cols{"index", a, b, q + "_closed", "label_closed", q + "_sim"};
    if (phi) cols.push_back("sz_sim");
    for (const char* col : {"label_sim", "boundary_distance", "converged"}) cols.push_back(col);
    ExperimentOutput out{CsvTable(cols), {}};
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
        const PatternRow& r = res.rows[i];
        const bool sim = r.simulated.has_value();
        const double q_sim = !sim ? NAN
                             : phi ? (p.quadrature == Quadrature::y ? r.simulated->y : r.simulated->x)
                                   : r.simulated->z;
        std::vector<Cell> row{static_cast<std::int64_t>(i), r.first, r.second,
                              r.closed_decision.observable_value,
                              label_name(r.closed_decision.label), q_sim};
        if (phi) row.push_back(sim ? r.simulated->z : NAN);
        row.push_back(sim ? label_name(r.simulated_decision->label) : std::string("none"));
        row.push_back(r.boundary_distance);
        row.push_back(static_cast<std::int64_t>(r.converged));
        out.table.add(std::move(row));
    }
    out.notes.push_back(schedule_note(p.schedule));
    out.notes.push_back("agreement=" + format_double(res.agreement) +
                        " far_points=" + std::to_string(res.far_points) +
                        " far_disagreements=" + std::to_string(res.far_disagreements));
    return out;
}

ExperimentOutput run_coupling_sweep(const Config& c, std::uint64_t seed, unsigned threads) {
    const SimSetup s = sim_setup(c);
    const double theta = c.get_double("theta");
    const double phi1 = c.get_double("phi1");
    const double phi2 = c.get_double("phi2");
    const double total = c.get_double("coupling.total");
    const double rate = c.get_double("rate");
    const auto fr = linspace(c.get_double("sweep.min"), c.get_double("sweep.max"),
                             positive_count(c, "sweep.points"));
    const CollisionSchedule sched = schedule_for(c, c.get_double("schedule.k_mean"), seed);
    struct Point {
        BlochVector cf, sim;
        bool converged;
    };
    std::vector<Point> res(fr.size());
    parallel_for(fr.size(), threads, [&](std::size_t i) {
        const double dj = fr[i] * total;
        const double j1 = total / 2 + dj;
        const double j2 = total / 2 - dj;
        if (j1 < 0.0 || j2 < 0.0) throw ConfigError("coupling sweep produces a negative coupling");
        const std::vector<ReservoirSpec> specs{{BlochParams(theta, phi1), j1},
                                               {BlochParams(theta, phi2), j2}};
        CollisionSchedule sc = sched;
        sc.seed = mix_seed(seed, i);
        const auto rec = simulate(s.probe, specs, sc, s.noise, s.options);
        res[i] = {closed_form_steady_state(specs, rate, sc.tau).bloch, rec.steady, rec.converged};
    });
    ExperimentOutput out{CsvTable({"delta_j", "j1", "j2", "sx_closed", "sy_closed", "sz_closed",
                                   "sx_sim", "sy_sim", "sz_sim", "converged"}),
                         {schedule_note(sched)}};
    for (std::size_t i = 0; i < fr.size(); ++i) {
        const double dj = fr[i] * total;
        const auto& r = res[i];
        out.table.add({dj, total / 2 + dj, total / 2 - dj, r.cf.x, r.cf.y, r.cf.z, r.sim.x,
                       r.sim.y, r.sim.z, static_cast<std::int64_t>(r.converged)});
    }
    return out;
}

ExperimentOutput run_qfi(const Config& c, unsigned threads, bool phi) {
    (void)threads;
    const double j = c.get_double("coupling");
    QfiScanConfig base;
    base.parameter = phi ? QfiParameter::phi : QfiParameter::theta;
    base.rate = c.get_double("rate");
    base.tau = c.get_double("tau");
    base.fd_step = c.get_double("fd_step");
    base.grid = phi ? default_phi_grid() : default_theta_grid();
    const double fixed_first = c.get_double("fixed.first");
    const double fixed_second = c.get_double("fixed.second");
    auto specs = [&](double a, double b) {
        if (phi) {
            const double th = c.get_double("theta");
            return std::vector<ReservoirSpec>{{BlochParams(th, a), j}, {BlochParams(th, b), j}};
        }
        return std::vector<ReservoirSpec>{{BlochParams(a, 0.0), j}, {BlochParams(b, 0.0), j}};
    };
    struct Case {
        std::string name;
        ScanLayout layout;
        std::vector<ReservoirSpec> specs;
    };
    const std::vector<Case> cases{
        {"mirrored", ScanLayout::mirrored, specs(0.0, 0.0)},
        {"second_fixed", ScanLayout::first_follows, specs(0.0, fixed_second)},
        {"first_fixed", ScanLayout::second_follows, specs(fixed_first, 0.0)},
    };
    ExperimentOutput out{CsvTable({"case", "delta", "qfi"}), {}};
    for (const auto& cs : cases) {
        QfiScanConfig cfg = base;
        cfg.layout = cs.layout;
        cfg.specs = cs.specs;
        const QfiScanResult r = qfi_scan_decide(cfg);
        for (std::size_t k = 0; k < r.grid.size(); ++k) out.table.add({cs.name, r.grid[k], r.values[k]});
        out.notes.push_back(cs.name + ": argmax=" + format_double(r.argmax) +
                            " label=" + std::to_string(r.label));
    }
    if (!phi) {
        const double xi = base.tau * base.rate * j / 2.0;
        const std::vector<ReservoirSpec> single{{BlochParams(kPi / 2, 0.0), j}};
        const auto cf = closed_form_steady_state(single, base.rate, base.tau);
        const double det_formula = qfi_tls(cf.rho, dtheta_rho(single, base.rate, base.tau)).value;
        out.notes.push_back("single reservoir theta=pi/2 xi=" + format_double(xi) +
                            ": analytic=" + format_double(qfi_theta_analytic_single(kPi / 2, xi).value) +
                            " determinant_formula=" + format_double(det_formula));
    }
    return out;
}

ExperimentOutput run_fig7(const Config& c, unsigned threads) {
    const auto etas = c.get_doubles("train.eta");
    TrainConfig base;
    base.target = c.get_double("train.target");
    base.sz = {c.get_double("train.sz1"), c.get_double("train.sz2")};
    base.j_init = {c.get_double("train.j1"), c.get_double("train.j2")};
    base.max_iters = positive_count(c, "train.max_iters");
    base.cost_tol = c.get_double("train.cost_tol");
    const std::string& fwd = c.get("train.forward");
    if (fwd == "simulate") {
        const std::size_t slots = positive_count(c, "train.sim_slots");
        const Pair sz = base.sz;
        for (double v : sz) {
            if (std::abs(v) > 1.0) throw ConfigError("train.sz values must lie in [-1, 1]");
        }
        base.forward = [slots, sz](const Pair& j) {
            const std::vector<ReservoirSpec> specs{
                {BlochParams(std::acos(sz[0]), 0.0), std::abs(j[0])},
                {BlochParams(std::acos(sz[1]), 0.0), std::abs(j[1])}};
            SimulationOptions opt;
            opt.check_physicality = false;
            return simulate(pure_state(BlochParams(kPi / 2, 0.0)), specs,
                            CollisionSchedule::regular(slots, 3.0), {}, opt)
                .steady.z;
        };
    } else if (fwd != "analytic") {
        throw ConfigError("train.forward must be 'analytic' or 'simulate'");
    }
    std::vector<TrainTrace> traces(etas.size());
    std::vector<std::string> errors(etas.size());
    parallel_for(etas.size(), threads, [&](std::size_t i) {
        TrainConfig cfg = base;
        cfg.eta = etas[i];
        try {
            traces[i] = train(cfg);
        } catch (const DivergenceError& e) {
            errors[i] = e.what();
        }
    });
    ExperimentOutput out{CsvTable({"eta", "iter", "j1", "j2", "abs_j1", "abs_j2", "actual", "cost"}), {}};
    const std::size_t stride = stride_of(c);
    for (std::size_t i = 0; i < etas.size(); ++i) {
        const char* role = i == 0 ? "given" : i == 1 ? "halved" : i == 2 ? "doubled" : "extra";
        if (!errors[i].empty()) {
            out.notes.push_back("eta=" + format_double(etas[i]) + " (" + role + "): " + errors[i]);
            continue;
        }
        const auto& rows = traces[i].rows;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            if (k % stride != 0 && k + 1 != rows.size()) continue;
            const auto& r = rows[k];
            out.table.add({etas[i], static_cast<std::int64_t>(r.iter), r.j1, r.j2, std::abs(r.j1),
                           std::abs(r.j2), r.actual, r.cost});
        }
        out.notes.push_back("eta=" + format_double(etas[i]) + " (" + role + "): iterations=" +
                            std::to_string(rows.size() - 1) +
                            " converged=" + (traces[i].converged ? "true" : "false"));
    }
    return out;
}

ExperimentOutput run_fig8(const Config& c) {
    const std::size_t n = positive_count(c, "surface.points");
    const auto grid = linspace(0.0, c.get_double("surface.max"), n);
    const Pair sz{c.get_double("train.sz1"), c.get_double("train.sz2")};
    const auto surf = cost_surface(grid, grid, sz, c.get_double("train.target"));
    ExperimentOutput out{CsvTable({"j1", "j2", "cost"}), {}};
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = 0; b < n; ++b) out.table.add({grid[a], grid[b], surf[a][b]});
    }
    return out;
}

}  // namespace

CsvTable::CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void CsvTable::add(std::vector<Cell> cells) {
    if (cells.size() != columns_.size()) {
        throw std::logic_error("CSV row has " + std::to_string(cells.size()) + " cells, expected " +
                               std::to_string(columns_.size()));
    }
    rows_.push_back(std::move(cells));
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string CsvTable::render() const {
    std::string out;
    for (std::size_t i = 0; i < columns_.size(); ++i) out += (i ? "," : "") + columns_[i];
    out += '\n';
    for (const auto& row : rows_) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            if (const auto* d = std::get_if<double>(&row[i])) {
                out += format_double(*d);
            } else if (const auto* n = std::get_if<std::int64_t>(&row[i])) {
                out += std::to_string(*n);
            } else {
                out += std::get<std::string>(row[i]);
            }
        }
        out += '\n';
    }
    return out;
}

const std::vector<ExperimentInfo>& experiment_registry() {
    static const std::vector<ExperimentInfo> registry = build_registry();
    return registry;
}

const ExperimentInfo& find_experiment(std::string_view id) {
    for (const auto& e : experiment_registry()) {
        if (e.id == id) return e;
    }
    throw ConfigError("unknown experiment '" + std::string(id) + "'");
}

std::uint64_t default_seed() {
    if (const char* env = std::getenv("COLLISIM_SEED"); env != nullptr && *env != '\0') {
        Config c;
        c.set("COLLISIM_SEED", env);
        return c.get_uint64("COLLISIM_SEED");
    }
    return kDefaultSeed;
}

Config effective_config(const Config& user, std::optional<std::uint64_t> seed_override) {
    if (!user.has("experiment")) throw ConfigError("config needs an 'experiment' key");
    const ExperimentInfo& info = find_experiment(user.get("experiment"));
    Config eff;
    for (const auto& [k, v] : info.defaults) eff.set(k, v);
    std::set<std::string> known{"experiment", "seed", "output"};
    for (const auto& [k, v] : info.defaults) known.insert(k);
    for (const auto& [k, v] : user.entries()) {
        if (!known.count(k)) {
            throw ConfigError("unknown key '" + k + "' for experiment " + info.id);
        }
        eff.set(k, v);
    }
    if (seed_override) {
        eff.set("seed", std::to_string(*seed_override));
    } else if (!eff.has("seed")) {
        eff.set("seed", std::to_string(default_seed()));
    }
    eff.get_uint64("seed");
    // The output location does not change results.
    eff.erase("output");
    return eff;
}

ExperimentOutput run_experiment(const Config& c, unsigned threads) {
    const std::string& id = c.get("experiment");
    const std::uint64_t seed = c.get_uint64("seed");
    if (id == "fig2a" || id == "fig2b" || id == "custom") return run_trajectory(c, seed);
    if (id == "fig2e") return run_fig2e(c, seed, threads);
    if (id == "fig2f") return run_single_sweep(c, seed, threads, false);
    if (id == "fig2g") return run_single_sweep(c, seed, threads, true);
    if (id == "fig3") return run_fig3(c, seed, threads);
    if (id == "fig4a") return run_theta_grid(c, seed, threads, {c.get_double("schedule.k_mean")});
    if (id == "fig4b") return run_theta_grid(c, seed, threads, c.get_doubles("k_values"));
    if (id == "fig4c") return run_pattern(c, seed, threads, false);
    if (id == "fig4d" || id == "fig4e") return run_coupling_sweep(c, seed, threads);
    if (id == "fig4f") return run_pattern(c, seed, threads, true);
    if (id == "fig5") return run_qfi(c, threads, false);
    if (id == "fig6") return run_qfi(c, threads, true);
    if (id == "fig7") return run_fig7(c, threads);
    if (id == "fig8") return run_fig8(c);
    throw ConfigError("unknown experiment '" + id + "'");
}

std::string render_csv(const Config& c, const ExperimentOutput& output) {
    std::string out;
    out += "# collisim " + std::string(kVersion) + "\n";
    out += "# experiment = " + c.get("experiment") + "\n";
    out += "# seed = " + c.get("seed") + "\n";
    for (const auto& [k, v] : c.entries()) out += "# config " + k + " = " + v + "\n";
    out += "# config_hash = " + fnv1a_hex(c.render()) + "\n";
    for (const auto& n : output.notes) out += "# " + n + "\n";
    out += output.table.render();
    return out;
}

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw ConfigError("cannot write " + tmp.string());
        f << content;
        f.flush();
        if (!f) throw ConfigError("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

RunSummary run(const Config& user, std::optional<std::filesystem::path> out,
               std::optional<std::uint64_t> seed, unsigned threads) {
    const Config eff = effective_config(user, seed);
    if (!out) {
        out = user.has("output") ? std::filesystem::path(user.get("output"))
                                 : std::filesystem::path(eff.get("experiment") + ".csv");
    }
    ExperimentOutput result = run_experiment(eff, threads);
    write_atomic(*out, render_csv(eff, result));
    return {*out, result.table.size(), fnv1a_hex(eff.render())};
}

}  // namespace collisim
