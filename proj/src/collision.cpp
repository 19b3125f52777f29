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

#include "collisim/collision.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "collisim/errors.hpp"

namespace collisim {

namespace {

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// In-place closed-form decay of a column-stacked 2x2 state.
void apply_decay(CVector& v, const NoiseParams& noise, double duration) {
    if (duration == 0.0 || noise.is_zero()) return;
    const double pop = std::exp(-2.0 * noise.gamma_theta * duration);
    const double coh = std::exp(-(noise.gamma_theta + 4.0 * noise.gamma_phi) * duration);
    const Complex pe = v(0);
    v(0) = pe * pop;
    v(3) += pe * (1.0 - pop);
    v(1) *= coh;
    v(2) *= coh;
}

}  // namespace

void NoiseParams::validate() const {
    if (!std::isfinite(gamma_theta) || !std::isfinite(gamma_phi) || gamma_theta < 0.0 ||
        gamma_phi < 0.0) {
        throw InvalidArgument("noise rates must be finite and non-negative");
    }
}

CollisionSchedule CollisionSchedule::regular(std::size_t slots, double tau, double tau0) {
    CollisionSchedule s;
    s.tau = tau;
    s.tau0 = tau0;
    s.p = 1.0;
    s.slots = slots;
    s.mode = StatisticsMode::regular;
    s.validate();
    return s;
}

CollisionSchedule CollisionSchedule::from_budget(double total_time, double k_mean, double tau,
                                                 StatisticsMode mode, std::uint64_t seed) {
    if (!(total_time > 0.0) || !(k_mean > 0.0) || !(tau > 0.0)) {
        throw InvalidArgument("time budget, <k> and tau must be positive");
    }
    const double p = k_mean * tau / total_time;
    if (p > 1.0) {
        throw InvalidArgument("probability of success p = <k> tau / T = " + std::to_string(p) +
                              " exceeds 1");
    }
    CollisionSchedule s;
    s.tau = tau;
    s.seed = seed;
    s.mode = mode;
    if (mode == StatisticsMode::regular) {
        s.p = 1.0;
        s.slots = static_cast<std::size_t>(std::llround(k_mean));
        s.tau0 = std::max(0.0, total_time / k_mean - tau);
    } else {
        s.p = p;
        s.slots = static_cast<std::size_t>(std::floor(total_time / tau));
        s.tau0 = 0.0;
    }
    s.validate();
    return s;
}

void CollisionSchedule::validate() const {
    if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive");
    if (!(tau0 >= 0.0) || !std::isfinite(tau0)) throw InvalidArgument("tau0 must be >= 0");
    if (slots == 0) throw InvalidArgument("schedule needs at least one slot");
    if (!(p > 0.0)) throw InvalidArgument("success probability must be positive");
    if (p > 1.0) {
        throw InvalidArgument("probability of success p = <k> tau / T = " + std::to_string(p) +
                              " exceeds 1");
    }
    if (mode == StatisticsMode::regular && p != 1.0) {
        throw InvalidArgument("regular statistics require p = 1");
    }
}

void validate_specs(std::span<const ReservoirSpec> specs) {
    if (specs.empty() || specs.size() > kMaxReservoirs) {
        throw InvalidArgument("number of reservoirs must be between 1 and 4, got " +
                              std::to_string(specs.size()));
    }
    bool any = false;
    for (const auto& s : specs) {
        if (!std::isfinite(s.coupling) || s.coupling < 0.0) {
            throw InvalidArgument("couplings must be finite and non-negative");
        }
        any = any || s.coupling > 0.0;
    }
    if (!any) throw InvalidArgument("at least one reservoir needs a positive coupling");
}

CMatrix build_interaction_hamiltonian(std::span<const ReservoirSpec> specs) {
    if (specs.empty() || specs.size() > kMaxReservoirs) {
        throw InvalidArgument("number of reservoirs must be between 1 and 4, got " +
                              std::to_string(specs.size()));
    }
    const std::size_t n = specs.size() + 1;
    const CMatrix probe_up = op::embed(op::sigma_plus(), 0, n);
    const CMatrix probe_down = op::embed(op::sigma_minus(), 0, n);
    CMatrix h = CMatrix::Zero(probe_up.rows(), probe_up.cols());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const CMatrix res_down = op::embed(op::sigma_minus(), i + 1, n);
        const CMatrix res_up = op::embed(op::sigma_plus(), i + 1, n);
        h += specs[i].coupling * (probe_up * res_down + probe_down * res_up);
    }
    return h;
}

DensityMatrix ancilla_register(std::span<const ReservoirSpec> specs) {
    CMatrix out = CMatrix::Identity(1, 1);
    for (const auto& s : specs) out = kron(out, pure_state(s.params).matrix());
    return DensityMatrix(std::move(out));
}

DensityMatrix collide_once(const DensityMatrix& probe, std::span<const ReservoirSpec> specs,
                           double tau) {
    if (probe.dim() != 2) throw InvalidArgument("collide_once expects a single-qubit probe");
    const CMatrix u = herm_unitary(build_interaction_hamiltonian(specs), tau);
    const CMatrix joint = u * kron(probe.matrix(), ancilla_register(specs).matrix()) * u.adjoint();
    std::vector<std::size_t> dims(specs.size() + 1, 2);
    CMatrix reduced = partial_trace(joint, 0, dims);
    return DensityMatrix(0.5 * (reduced + reduced.adjoint()));
}

CMatrix collision_channel(std::span<const ReservoirSpec> specs, double tau) {
    const CMatrix u = herm_unitary(build_interaction_hamiltonian(specs), tau);
    const CMatrix anc = ancilla_register(specs).matrix();
    const std::size_t dims[] = {2, static_cast<std::size_t>(anc.rows())};
    CMatrix channel(4, 4);
    for (Eigen::Index k = 0; k < 4; ++k) {
        CMatrix unit = CMatrix::Zero(2, 2);
        unit(k % 2, k / 2) = 1.0;
        const CMatrix joint = u * kron(unit, anc) * u.adjoint();
        channel.col(k) = vec(partial_trace(joint, 0, dims));
    }
    return channel;
}

DensityMatrix decay_step(const DensityMatrix& probe, const NoiseParams& noise, double duration) {
    if (probe.dim() != 2) throw InvalidArgument("decay_step expects a single-qubit probe");
    if (!(duration >= 0.0)) throw InvalidArgument("decay duration must be non-negative");
    noise.validate();
    CVector v = vec(probe.matrix());
    apply_decay(v, noise, duration);
    return DensityMatrix(unvec(v, 2));
}

std::vector<bool> sample_schedule(const CollisionSchedule& schedule) {
    schedule.validate();
    std::vector<bool> out(schedule.slots, true);
    if (schedule.mode == StatisticsMode::regular) return out;
    std::mt19937_64 rng(schedule.seed);
    for (std::size_t k = 0; k < schedule.slots; ++k) out[k] = uniform01(rng) < schedule.p;
    return out;
}

SteadyEstimate steady_state_estimate(std::span<const BlochVector> trajectory, std::size_t window,
                                     double tol) {
    SteadyEstimate est;
    if (trajectory.empty() || window == 0) return est;
    window = std::min(window, trajectory.size());
    const auto tail = trajectory.last(window);
    BlochVector lo = tail.front();
    BlochVector hi = tail.front();
    BlochVector sum;
    for (const auto& v : tail) {
        sum.x += v.x;
        sum.y += v.y;
        sum.z += v.z;
        lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
        hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
    }
    const double n = static_cast<double>(window);
    est.mean = {sum.x / n, sum.y / n, sum.z / n};
    est.spread = std::max({hi.x - lo.x, hi.y - lo.y, hi.z - lo.z});
    est.converged = est.spread <= tol;
    return est;
}

TrajectoryRecord simulate(const DensityMatrix& probe0, std::span<const ReservoirSpec> specs,
                          const CollisionSchedule& schedule, const NoiseParams& noise,
                          const SimulationOptions& options) {
    if (probe0.dim() != 2) throw InvalidArgument("simulate expects a single-qubit probe");
    validate_specs(specs);
    schedule.validate();
    noise.validate();

    std::vector<CMatrix> channels;
    std::vector<double> cumulative;
    if (options.mode == CollisionMode::simultaneous) {
        channels.push_back(collision_channel(specs, schedule.tau));
    } else {
        std::vector<double> w = options.mixture_weights;
        if (w.empty()) w.assign(specs.size(), 1.0);
        if (w.size() != specs.size()) {
            throw InvalidArgument("mixture weights must match the number of reservoirs");
        }
        double total = 0.0;
        for (std::size_t i = 0; i < specs.size(); ++i) {
            if (!(w[i] >= 0.0)) throw InvalidArgument("mixture weights must be non-negative");
            total += w[i];
            cumulative.push_back(total);
            channels.push_back(collision_channel(specs.subspan(i, 1), schedule.tau));
        }
        if (!(total > 0.0)) throw InvalidArgument("mixture weights sum to zero");
        for (double& c : cumulative) c /= total;
    }

    TrajectoryRecord rec;
    rec.collided = sample_schedule(schedule);
    rec.slot_times.reserve(schedule.slots);
    rec.bloch.reserve(schedule.slots);

    // Reservoir choices use their own stream so the collision pattern does
    // not depend on the collision mode.
    std::mt19937_64 picker(schedule.seed ^ 0x9e3779b97f4a7c15ULL);
    CVector v = vec(probe0.matrix());
    CVector scratch(4);
    double t = 0.0;
    for (std::size_t k = 0; k < schedule.slots; ++k) {
        if (rec.collided[k]) {
            std::size_t which = 0;
            if (channels.size() > 1) {
                const double u = uniform01(picker);
                while (which + 1 < cumulative.size() && u >= cumulative[which]) ++which;
            }
            scratch.noalias() = channels[which] * v;
            v.swap(scratch);
            apply_decay(v, noise, schedule.tau0);
        } else {
            apply_decay(v, noise, schedule.tau + schedule.tau0);
        }
        t += schedule.slot_duration();
        rec.slot_times.push_back(t);
        const CMatrix rho = unvec(v, 2);
        rec.bloch.push_back(pauli_expectations(rho));
        if (options.check_physicality) {
            const PhysicalityReport r = physicality(rho);
            if (!r.ok()) ++rec.physicality_violations;
            rec.worst.hermiticity_error = std::max(rec.worst.hermiticity_error, r.hermiticity_error);
            rec.worst.trace_error = std::max(rec.worst.trace_error, r.trace_error);
            if (k == 0 || r.min_eigenvalue < rec.worst.min_eigenvalue) {
                rec.worst.min_eigenvalue = r.min_eigenvalue;
            }
        }
    }
    rec.final_state = unvec(v, 2);

    const std::size_t window =
        std::clamp<std::size_t>(options.window, 1, std::max<std::size_t>(1, schedule.slots / 2));
    const SteadyEstimate est = steady_state_estimate(rec.bloch, window, options.tol);
    rec.steady = est.mean;
    rec.converged = est.converged;
    return rec;
}

}  // namespace collisim
