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

#ifndef COLLISIM_COLLISION_HPP_
#define COLLISIM_COLLISION_HPP_

// Repeated-interaction simulator for a probe qubit colliding with fresh
// ancillas drawn from up to four pure-state information reservoirs.
//
// Each collision applies the exact propagator exp(-i H_int tau) of the
// resonant exchange Hamiltonian in the interaction picture, then discards
// the ancillas. Between collisions the probe decays under
//   d rho/dt = G_theta (2 s- rho s+ - {s+ s-, rho}) + G_phi (2 sz rho sz - 2 rho),
// i.e. populations relax at 2 G_theta and coherences at G_theta + 4 G_phi.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "collisim/linalg.hpp"
#include "collisim/states.hpp"

namespace collisim {

inline constexpr std::size_t kMaxReservoirs = 4;

#ifdef NDEBUG
inline constexpr bool kCheckPhysicalityByDefault = false;
#else
inline constexpr bool kCheckPhysicalityByDefault = true;
#endif

struct ReservoirSpec {
    BlochParams params;
    double coupling = 0.0;  // J_i >= 0, in units of the qubit frequency
};

struct NoiseParams {
    double gamma_theta = 0.0;  // energy dissipation
    double gamma_phi = 0.0;    // pure dephasing

    void validate() const;
    bool is_zero() const { return gamma_theta == 0.0 && gamma_phi == 0.0; }
};

enum class StatisticsMode { regular, stochastic };

/// Slot layout of a run: `slots` trials of length tau + tau0, each a
/// collision with probability p.
struct CollisionSchedule {
    double tau = 3.0;
    double tau0 = 0.0;
    double p = 1.0;
    std::size_t slots = 0;
    std::uint64_t seed = 0;
    StatisticsMode mode = StatisticsMode::regular;

    static CollisionSchedule regular(std::size_t slots, double tau, double tau0 = 0.0);

    // Builds a schedule from a time budget T and a mean interaction number <k>.
    // Stochastic: K = floor(T / tau) trials, p = <k> tau / T, tau0 = 0.
    // Regular:    K = <k> slots, tau0 = T / <k> - tau.
    // Both fail with InvalidArgument when <k> tau > T.
    static CollisionSchedule from_budget(double total_time, double k_mean, double tau,
                                         StatisticsMode mode, std::uint64_t seed = 0);

    double slot_duration() const { return tau + tau0; }
    double mean_interactions() const { return p * static_cast<double>(slots); }
    void validate() const;
};

enum class CollisionMode {
    simultaneous,  // one fresh ancilla per reservoir, joint unitary
    mixture,       // one reservoir per collision, drawn with `mixture_weights`
};

struct SimulationOptions {
    CollisionMode mode = CollisionMode::simultaneous;
    std::vector<double> mixture_weights;  // empty: uniform
    std::size_t window = 1000;
    double tol = 0.01;
    bool check_physicality = kCheckPhysicalityByDefault;
};

struct SteadyEstimate {
    BlochVector mean;
    double spread = 0.0;  // largest peak-to-peak range of a component inside the window
    bool converged = false;
};

struct TrajectoryRecord {
    std::vector<double> slot_times;  // end of each slot
    std::vector<BlochVector> bloch;  // probe Bloch vector after each slot
    std::vector<bool> collided;
    BlochVector steady;
    bool converged = false;
    CMatrix final_state;

    // Filled when SimulationOptions::check_physicality is set.
    std::size_t physicality_violations = 0;
    PhysicalityReport worst;
};

void validate_specs(std::span<const ReservoirSpec> specs);

CMatrix build_interaction_hamiltonian(std::span<const ReservoirSpec> specs);

// Product state of one fresh ancilla per reservoir, in reservoir order.
DensityMatrix ancilla_register(std::span<const ReservoirSpec> specs);

DensityMatrix collide_once(const DensityMatrix& probe, std::span<const ReservoirSpec> specs,
                           double tau);

// Column-stacked 4x4 superoperator of collide_once.
CMatrix collision_channel(std::span<const ReservoirSpec> specs, double tau);

DensityMatrix decay_step(const DensityMatrix& probe, const NoiseParams& noise, double duration);

std::vector<bool> sample_schedule(const CollisionSchedule& schedule);

TrajectoryRecord simulate(const DensityMatrix& probe0, std::span<const ReservoirSpec> specs,
                          const CollisionSchedule& schedule, const NoiseParams& noise,
                          const SimulationOptions& options = {});

SteadyEstimate steady_state_estimate(std::span<const BlochVector> trajectory, std::size_t window,
                                     double tol);

}  // namespace collisim

#endif  // COLLISIM_COLLISION_HPP_
