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

#include "collisim/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "collisim/errors.hpp"

namespace collisim {

double actual_magnetization(const Pair& j, const Pair& sz) {
    const double w1 = j[0] * j[0];
    const double w2 = j[1] * j[1];
    if (!(w1 + w2 > 0.0)) throw InvalidArgument("both couplings are zero");
    return (w1 * sz[0] + w2 * sz[1]) / (w1 + w2);
}

double cost(double target, double actual) {
    const double d = target - actual;
    return 0.5 * d * d;
}

Pair gradient(const Pair& j, const Pair& sz, double target) {
    const double a = actual_magnetization(j, sz);
    const double norm = j[0] * j[0] + j[1] * j[1];
    const double residual = target - a;
    return {-residual * 2.0 * j[0] * (sz[0] - a) / norm,
            -residual * 2.0 * j[1] * (sz[1] - a) / norm};
}

namespace {

Pair forward_gradient(const TrainConfig& cfg, const Pair& j) {
    Pair g{};
    for (int i = 0; i < 2; ++i) {
        const double h = cfg.fd_rel_step * std::max(std::abs(j[i]), 1e-6);
        Pair up = j;
        Pair down = j;
        up[i] += h;
        down[i] -= h;
        g[i] = (cost(cfg.target, cfg.forward(up)) - cost(cfg.target, cfg.forward(down))) / (2 * h);
    }
    return g;
}

}  // namespace

TrainTrace train(const TrainConfig& config) {
    if (!(config.eta >= 0.0) || !std::isfinite(config.eta)) {
        throw InvalidArgument("learning rate must be finite and non-negative");
    }
    if (!(config.cost_tol >= 0.0)) throw InvalidArgument("cost tolerance must be >= 0");
    auto forward = [&](const Pair& j) {
        return config.forward ? config.forward(j) : actual_magnetization(j, config.sz);
    };

    TrainTrace trace;
    trace.eta = config.eta;
    Pair j = config.j_init;
    double a = forward(j);
    const double initial = cost(config.target, a);
    trace.rows.push_back({0, j[0], j[1], a, initial});
    for (std::size_t it = 1;; ++it) {
        if (trace.rows.back().cost <= config.cost_tol) {
            trace.converged = true;
            break;
        }
        if (it > config.max_iters) break;
        const Pair g = config.forward ? forward_gradient(config, j)
                                      : gradient(j, config.sz, config.target);
        j[0] -= config.eta * g[0];
        j[1] -= config.eta * g[1];
        a = forward(j);
        const double c = cost(config.target, a);
        trace.rows.push_back({it, j[0], j[1], a, c});
        if (!std::isfinite(c) || c > 10.0 * initial) {
            std::ostringstream msg;
            msg << "training diverged at iteration " << it << " with learning rate eta = "
                << config.eta;
            throw DivergenceError(msg.str());
        }
    }
    return trace;
}

std::vector<std::vector<double>> cost_surface(const std::vector<double>& j1_grid,
                                              const std::vector<double>& j2_grid, const Pair& sz,
                                              double target) {
    std::vector<std::vector<double>> out(j1_grid.size(), std::vector<double>(j2_grid.size()));
    for (std::size_t a = 0; a < j1_grid.size(); ++a) {
        for (std::size_t b = 0; b < j2_grid.size(); ++b) {
            const Pair j{j1_grid[a], j2_grid[b]};
            out[a][b] = (j[0] == 0.0 && j[1] == 0.0)
                            ? std::numeric_limits<double>::quiet_NaN()
                            : cost(target, actual_magnetization(j, sz));
        }
    }
    return out;
}

}  // namespace collisim
