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

#include "collisim/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "collisim/errors.hpp"
#include "collisim/master_equation.hpp"
#include "collisim/parallel.hpp"

namespace collisim {

namespace {

constexpr double kPi = std::numbers::pi;

double uniform_open(std::mt19937_64& rng, double lo, double hi) {
    for (;;) {
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        if (u > 0.0) return lo + (hi - lo) * u;
    }
}

double observable(const PatternConfig& config, const BlochVector& v) {
    if (config.space == ScanSpace::theta) return v.z;
    return config.quadrature == Quadrature::y ? v.y : v.x;
}

}  // namespace

Decision decide_theta(double sz) {
    if (!(std::abs(sz) <= 1.0 + 1e-9)) throw InvalidArgument("<sigma_z> outside [-1, 1]");
    return {sz >= 0.0 ? Label::class1 : Label::class2, sz, Rule::theta_rule};
}

Decision decide_phi(double quadrature, double sz) {
    const bool positive = quadrature >= 0.0;
    const Label label = (sz >= 0.0) == positive ? Label::class1 : Label::class2;
    return {label, quadrature, Rule::phi_rule};
}

std::vector<ReservoirSpec> pattern_specs(const PatternConfig& config, double first,
                                         double second) {
    if (config.space == ScanSpace::theta) {
        return {{BlochParams(first, config.fixed_phi), config.j1},
                {BlochParams(second, config.fixed_phi), config.j2}};
    }
    return {{BlochParams(config.fixed_theta, first), config.j1},
            {BlochParams(config.fixed_theta, second), config.j2}};
}

Decision decide(const PatternConfig& config, const BlochVector& v) {
    if (config.space == ScanSpace::theta) return decide_theta(v.z);
    return decide_phi(observable(config, v), v.z);
}

double boundary_distance(const PatternConfig& config, double first, double second) {
    // Differences run on the raw angles, so stay clear of the theta range edges.
    auto g = [&](double a, double b) {
        if (config.space == ScanSpace::theta) {
            a = std::clamp(a, 0.0, kPi);
            b = std::clamp(b, 0.0, kPi);
        }
        const auto specs = pattern_specs(config, a, b);
        return observable(config, closed_form_steady_state(specs, config.rate,
                                                           config.schedule.tau)
                                      .bloch);
    };
    const double h = 1e-5;
    const double g0 = g(first, second);
    const double da = (g(first + h, second) - g(first - h, second)) / (2 * h);
    const double db = (g(first, second + h) - g(first, second - h)) / (2 * h);
    const double grad = std::hypot(da, db);
    if (grad == 0.0) return g0 == 0.0 ? 0.0 : INFINITY;
    return std::abs(g0) / grad;
}

PatternResult pattern_scan(const PatternConfig& config) {
    if (config.points.empty()) throw InvalidArgument("pattern scan has no points");
    const BlochParams probe_params = config.probe.value_or(
        config.space == ScanSpace::theta ? BlochParams(kPi / 2, 0.0) : BlochParams(0.0, 0.0));
    const DensityMatrix probe = pure_state(probe_params);

    PatternResult out;
    out.rows.resize(config.points.size());
    parallel_for(config.points.size(), config.threads, [&](std::size_t i) {
        const auto [a, b] = config.points[i];
        PatternRow& row = out.rows[i];
        row.first = a;
        row.second = b;
        const auto specs = pattern_specs(config, a, b);
        row.closed = closed_form_steady_state(specs, config.rate, config.schedule.tau).bloch;
        row.closed_decision = decide(config, row.closed);
        row.boundary_distance = boundary_distance(config, a, b);
        if (config.engine == Engine::simulate) {
            const TrajectoryRecord rec =
                simulate(probe, specs, config.schedule, config.noise, config.options);
            row.simulated = rec.steady;
            row.simulated_decision = decide(config, rec.steady);
            row.converged = rec.converged;
            row.physicality_violations = rec.physicality_violations;
        }
    });

    std::size_t agree = 0;
    for (const auto& row : out.rows) {
        const bool same = !row.simulated_decision ||
                          row.simulated_decision->label == row.closed_decision.label;
        agree += same ? 1 : 0;
        if (row.boundary_distance >= config.far_distance) {
            ++out.far_points;
            if (!same) ++out.far_disagreements;
        }
    }
    out.agreement = static_cast<double>(agree) / static_cast<double>(out.rows.size());
    return out;
}

std::vector<std::pair<double, double>> grid_points(std::size_t n, double lo, double hi) {
    if (n == 0 || !(hi >= lo)) throw InvalidArgument("empty grid range");
    std::vector<std::pair<double, double>> out;
    out.reserve(n * n);
    const double step = n > 1 ? (hi - lo) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) {
            out.emplace_back(lo + step * static_cast<double>(i), lo + step * static_cast<double>(k));
        }
    }
    return out;
}

std::vector<std::pair<double, double>> random_points(std::size_t n, std::uint64_t seed, double lo1,
                                                     double hi1, double lo2, double hi2) {
    if (n == 0 || !(hi1 > lo1) || !(hi2 > lo2)) throw InvalidArgument("empty random range");
    std::mt19937_64 rng(seed);
    std::vector<std::pair<double, double>> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double a = uniform_open(rng, lo1, hi1);
        const double b = uniform_open(rng, lo2, hi2);
        out.emplace_back(a, b);
    }
    return out;
}

BoundaryReport theta_boundary(const std::vector<double>& grid,
                              const std::vector<std::vector<double>>& values) {
    if (grid.size() < 2 || values.size() != grid.size()) {
        throw InvalidArgument("boundary search needs a square grid of at least 2 points");
    }
    BoundaryReport rep;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const auto& row = values[i];
        if (row.size() != grid.size()) throw InvalidArgument("ragged boundary grid");
        std::optional<double> crossing;
        for (std::size_t k = 0; k + 1 < row.size(); ++k) {
            const bool here = row[k] >= 0.0;
            const bool next = row[k + 1] >= 0.0;
            if (here != next) {
                const double t = row[k] / (row[k] - row[k + 1]);
                crossing = grid[k] + t * (grid[k + 1] - grid[k]);
                break;
            }
        }
        if (!crossing) {
            std::size_t best = 0;
            for (std::size_t k = 1; k < row.size(); ++k) {
                if (std::abs(row[k]) < std::abs(row[best])) best = k;
            }
            crossing = grid[best];
        }
        rep.crossings.push_back(*crossing);
        rep.max_offset = std::max(rep.max_offset, std::abs(grid[i] + *crossing - kPi));
    }
    return rep;
}

}  // namespace collisim
