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

#ifndef COLLISIM_CLASSIFIER_HPP_
#define COLLISIM_CLASSIFIER_HPP_

// Binary decisions read from steady-state Pauli expectations, and sweeps
// that label many reservoir pairs at once.

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "collisim/collision.hpp"
#include "collisim/states.hpp"

namespace collisim {

enum class Label { class1, class2 };
enum class Rule { theta_rule, phi_rule };

struct Decision {
    Label label = Label::class1;
    double observable_value = 0.0;
    Rule rule = Rule::theta_rule;
};

// class1 iff sz >= 0.
Decision decide_theta(double sz);

// sz >= 0: class1 iff quadrature >= 0; sz < 0: class2 iff quadrature >= 0.
Decision decide_phi(double quadrature, double sz);

enum class ScanSpace { theta, phi };
enum class Engine { closed_form, simulate };
enum class Quadrature { y, x };

struct PatternConfig {
    ScanSpace space = ScanSpace::theta;
    std::vector<std::pair<double, double>> points;  // (first, second) scanned angle
    double fixed_theta = 1.0471975511965976;  // both reservoirs, phi space
    double fixed_phi = 0.0;                   // both reservoirs, theta space
    double j1 = 0.01;
    double j2 = 0.01;
    double rate = 0.2;
    Engine engine = Engine::closed_form;
    Quadrature quadrature = Quadrature::y;

    // Simulator path. Probe defaults to |+> in theta space and |e> in phi space.
    CollisionSchedule schedule = CollisionSchedule::regular(18000, 3.0);
    NoiseParams noise;
    SimulationOptions options;
    std::optional<BlochParams> probe;
    unsigned threads = 1;
    double far_distance = 0.05;
};

struct PatternRow {
    double first = 0.0;
    double second = 0.0;
    BlochVector closed;
    Decision closed_decision;
    std::optional<BlochVector> simulated;
    std::optional<Decision> simulated_decision;
    bool converged = true;
    double boundary_distance = 0.0;
    std::size_t physicality_violations = 0;
};

struct PatternResult {
    std::vector<PatternRow> rows;
    double agreement = 1.0;      // fraction of rows where both paths agree
    std::size_t far_points = 0;  // rows at least far_distance from the boundary
    std::size_t far_disagreements = 0;
};

std::vector<ReservoirSpec> pattern_specs(const PatternConfig& config, double first, double second);

// Decision for one Bloch vector under the configured rule.
Decision decide(const PatternConfig& config, const BlochVector& v);

// |g| / |grad g| for the closed-form observable g of the configured rule.
double boundary_distance(const PatternConfig& config, double first, double second);

PatternResult pattern_scan(const PatternConfig& config);

// n x n points on [lo, hi]^2, first index major.
std::vector<std::pair<double, double>> grid_points(std::size_t n, double lo, double hi);

// Uniform points in the open boxes (lo1, hi1) x (lo2, hi2).
std::vector<std::pair<double, double>> random_points(std::size_t n, std::uint64_t seed, double lo1,
                                                     double hi1, double lo2, double hi2);

struct BoundaryReport {
    std::vector<double> crossings;  // per row of the grid, second-angle crossing
    double max_offset = 0.0;        // max |first + crossing - pi|
};

// values[i][k] over grid[i] x grid[k]. The crossing of each row is the linear
// interpolation at the first sign change, or the smallest |value| when the
// row never changes sign.
BoundaryReport theta_boundary(const std::vector<double>& grid,
                              const std::vector<std::vector<double>>& values);

}  // namespace collisim

#endif  // COLLISIM_CLASSIFIER_HPP_
