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

#ifndef COLLISIM_MASTER_EQUATION_HPP_
#define COLLISIM_MASTER_EQUATION_HPP_

// Coarse-grained (micromaser) description of the collision dynamics at a
// Poisson collision rate r.
//
// The generator is
//   L = -i[g1 s+ + g2 s-, .] + g3 D[s+] + g4 D[s-] + g6 Ls[s-] + g5 Ls[s+]
// with D[o]X = 2 o X o^+ - o^+ o X - X o^+ o and Ls[o]X = 2 o X o - o^2 X - X o^2.
// Written for c = rho_eg and z = <sigma_z> it gives
//   dc/dt = -(g3 + g4) c + i g1 z + 2 g5 conj(c)
//   dz/dt = -2 (g3 + g4) z + 2 (g3 - g4) + 4 Im(g1 conj(c)).

#include <span>
#include <vector>

#include "collisim/collision.hpp"
#include "collisim/linalg.hpp"
#include "collisim/states.hpp"

namespace collisim {

struct MicromaserCoefficients {
    Complex gamma1m;  // r tau sum_i J_i <s-_i>
    Complex gamma2p;  // conj(gamma1m)
    double gamma3p = 0.0;  // (r tau^2 / 2) sum_i J_i^2 P_e,i
    double gamma4m = 0.0;  // (r tau^2 / 2) sum_i J_i^2 P_g,i
    Complex gamma5m;  // 2 r tau^2 sum_{i<j} J_i J_j <s-_i><s-_j>
    Complex gamma6p;  // conj(gamma5m)
    double rate = 0.0;
    double tau = 0.0;
};

MicromaserCoefficients coefficients(std::span<const ReservoirSpec> specs, double rate, double tau);

BlochVector bloch_rhs(const BlochVector& v, const MicromaserCoefficients& c);

// Fixed-step RK4. Returns the state at t = 0, dt, 2 dt, ... up to t_end (the
// last step is shortened to land on t_end). Rejects dt above 0.1 / lambda,
// lambda being the fastest rate of the linear system.
std::vector<BlochVector> integrate_bloch(const BlochVector& v0, const MicromaserCoefficients& c,
                                         double t_end, double dt);

double max_stable_step(const MicromaserCoefficients& c);

struct ClosedFormSteadyState {
    DensityMatrix rho;
    BlochVector bloch;
    Complex coherence;  // rho_eg
};

// Leading-order steady state
//   <sigma_z> = sum J_i^2 cos(theta_i) / sum J_i^2,
//   rho_eg    = (i tau r / 2 sum J^2) sum_{i,j} J_i J_j^2 sin(theta_i) cos(theta_j) e^{-i phi_i}.
// Throws DomainOfValidity when the result is not positive semidefinite.
ClosedFormSteadyState closed_form_steady_state(std::span<const ReservoirSpec> specs, double rate,
                                               double tau);

CMatrix micromaser_liouvillian(std::span<const ReservoirSpec> specs, double rate, double tau);

DensityMatrix numeric_steady_state(std::span<const ReservoirSpec> specs, double rate, double tau);

}  // namespace collisim

#endif  // COLLISIM_MASTER_EQUATION_HPP_
