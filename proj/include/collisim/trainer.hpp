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

#ifndef COLLISIM_TRAINER_HPP_
#define COLLISIM_TRAINER_HPP_

// Gradient descent on the two couplings so that the steady magnetization
//   A = (J1^2 s1 + J2^2 s2) / (J1^2 + J2^2)
// reaches a target Y under the cost (Y - A)^2 / 2.

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

namespace collisim {

using Pair = std::array<double, 2>;

// Optional replacement for the analytic magnetization, e.g. a simulator run.
using ForwardModel = std::function<double(const Pair& j)>;

struct TrainConfig {
    double eta = 2.6e-5;
    double target = 0.42;
    std::size_t max_iters = 100000;
    double cost_tol = 1e-8;
    Pair sz{0.94, -0.10};
    Pair j_init{0.002, 0.05};
    ForwardModel forward;   // empty: analytic
    double fd_rel_step = 1e-3;  // only used with `forward`
};

struct TrainRow {
    std::size_t iter = 0;
    double j1 = 0.0;
    double j2 = 0.0;
    double actual = 0.0;
    double cost = 0.0;
};

struct TrainTrace {
    double eta = 0.0;
    std::vector<TrainRow> rows;
    bool converged = false;
};

double actual_magnetization(const Pair& j, const Pair& sz);
double cost(double target, double actual);
Pair gradient(const Pair& j, const Pair& sz, double target);

// Runs until cost <= cost_tol or max_iters updates. Row 0 is the initial
// point. Throws DivergenceError once the cost exceeds ten times its start.
TrainTrace train(const TrainConfig& config);

// costs[a][b] at (j1_grid[a], j2_grid[b]); NaN where both couplings vanish.
std::vector<std::vector<double>> cost_surface(const std::vector<double>& j1_grid,
                                              const std::vector<double>& j2_grid, const Pair& sz,
                                              double target);

}  // namespace collisim

#endif  // COLLISIM_TRAINER_HPP_
