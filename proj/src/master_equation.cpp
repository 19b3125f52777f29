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

#include "collisim/master_equation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "collisim/errors.hpp"

namespace collisim {

namespace {

void check_count(std::span<const ReservoirSpec> specs) {
    if (specs.empty() || specs.size() > kMaxReservoirs) {
        throw InvalidArgument("number of reservoirs must be between 1 and 4, got " +
                              std::to_string(specs.size()));
    }
    for (const auto& s : specs) {
        if (!std::isfinite(s.coupling) || s.coupling < 0.0) {
            throw InvalidArgument("couplings must be finite and non-negative");
        }
    }
}

double sum_sq_couplings(std::span<const ReservoirSpec> specs) {
    double s = 0.0;
    for (const auto& r : specs) s += r.coupling * r.coupling;
    return s;
}

CMatrix squeezing_superop(const CMatrix& o) {
    const CMatrix o2 = o * o;
    const CMatrix id = op::identity(2);
    return 2.0 * superop(o, o) - superop(o2, id) - superop(id, o2);
}

}  // namespace

MicromaserCoefficients coefficients(std::span<const ReservoirSpec> specs, double rate, double tau) {
    check_count(specs);
    if (!(rate > 0.0) || !(tau > 0.0)) throw InvalidArgument("rate and tau must be positive");
    MicromaserCoefficients c;
    c.rate = rate;
    c.tau = tau;
    const double half = rate * tau * tau / 2.0;
    std::vector<ReservoirMoments> m;
    for (const auto& s : specs) m.push_back(reservoir_moments(s.params));
    for (std::size_t i = 0; i < specs.size(); ++i) {
        const double j = specs[i].coupling;
        c.gamma1m += rate * tau * j * m[i].sm;
        c.gamma3p += half * j * j * m[i].spm;
        c.gamma4m += half * j * j * m[i].smp;
        for (std::size_t k = i + 1; k < specs.size(); ++k) {
            c.gamma5m += 2.0 * rate * tau * tau * j * specs[k].coupling * m[i].sm * m[k].sm;
        }
    }
    c.gamma2p = std::conj(c.gamma1m);
    c.gamma6p = std::conj(c.gamma5m);
    return c;
}

BlochVector bloch_rhs(const BlochVector& v, const MicromaserCoefficients& c) {
    const Complex coh(v.x / 2.0, -v.y / 2.0);
    const double damp = c.gamma3p + c.gamma4m;
    const Complex dc =
        -damp * coh + Complex(0.0, 1.0) * c.gamma1m * v.z + 2.0 * c.gamma5m * std::conj(coh);
    const double dz = -2.0 * damp * v.z + 2.0 * (c.gamma3p - c.gamma4m) +
                      4.0 * std::imag(c.gamma1m * std::conj(coh));
    return {2.0 * dc.real(), -2.0 * dc.imag(), dz};
}

double max_stable_step(const MicromaserCoefficients& c) {
    const double lambda = std::max({2.0 * (c.gamma3p + c.gamma4m), 2.0 * std::abs(c.gamma1m),
                                    4.0 * std::abs(c.gamma5m)});
    return lambda > 0.0 ? 0.1 / lambda : INFINITY;
}

std::vector<BlochVector> integrate_bloch(const BlochVector& v0, const MicromaserCoefficients& c,
                                         double t_end, double dt) {
    if (!(dt > 0.0) || !(t_end >= 0.0)) throw InvalidArgument("need dt > 0 and t_end >= 0");
    if (dt > max_stable_step(c)) {
        throw InvalidArgument("step " + std::to_string(dt) + " exceeds stability bound " +
                              std::to_string(max_stable_step(c)));
    }
    auto axpy = [](const BlochVector& a, double h, const BlochVector& b) {
        return BlochVector{a.x + h * b.x, a.y + h * b.y, a.z + h * b.z};
    };
    std::vector<BlochVector> out{v0};
    BlochVector v = v0;
    double t = 0.0;
    while (t < t_end) {
        const double h = std::min(dt, t_end - t);
        const BlochVector k1 = bloch_rhs(v, c);
        const BlochVector k2 = bloch_rhs(axpy(v, h / 2, k1), c);
        const BlochVector k3 = bloch_rhs(axpy(v, h / 2, k2), c);
        const BlochVector k4 = bloch_rhs(axpy(v, h, k3), c);
        v.x += h / 6 * (k1.x + 2 * k2.x + 2 * k3.x + k4.x);
        v.y += h / 6 * (k1.y + 2 * k2.y + 2 * k3.y + k4.y);
        v.z += h / 6 * (k1.z + 2 * k2.z + 2 * k3.z + k4.z);
        t = (h == dt) ? t + dt : t_end;
        out.push_back(v);
    }
    return out;
}

ClosedFormSteadyState closed_form_steady_state(std::span<const ReservoirSpec> specs, double rate,
                                               double tau) {
    check_count(specs);
    const double norm = sum_sq_couplings(specs);
    if (!(norm > 0.0)) throw InvalidArgument("closed form needs a nonzero coupling");
    double z = 0.0;
    for (const auto& s : specs) z += s.coupling * s.coupling * std::cos(s.params.theta());
    z /= norm;
    Complex coh;
    for (const auto& a : specs) {
        const Complex ea = std::polar(1.0, -a.params.phi());
        for (const auto& b : specs) {
            coh += a.coupling * b.coupling * b.coupling * std::sin(a.params.theta()) *
                   std::cos(b.params.theta()) * ea;
        }
    }
    coh *= Complex(0.0, tau * rate / (2.0 * norm));

    const double min_eig = 0.5 - std::sqrt(z * z / 4.0 + std::norm(coh));
    if (min_eig < kEigenvalueFloor) {
        throw DomainOfValidity("closed-form steady state is not positive (min eigenvalue " +
                               std::to_string(min_eig) + "); r tau J is too large");
    }
    CMatrix m(2, 2);
    m << (1.0 + z) / 2.0, coh, std::conj(coh), (1.0 - z) / 2.0;
    BlochVector b{2.0 * coh.real(), -2.0 * coh.imag(), z};
    return {DensityMatrix(std::move(m)), b, coh};
}

CMatrix micromaser_liouvillian(std::span<const ReservoirSpec> specs, double rate, double tau) {
    const MicromaserCoefficients c = coefficients(specs, rate, tau);
    const CMatrix up = op::sigma_plus();
    const CMatrix down = op::sigma_minus();
    const CMatrix h_eff = c.gamma1m * up + c.gamma2p * down;
    return hamiltonian_superop(h_eff) + c.gamma3p * lindblad_dissipator(up) +
           c.gamma4m * lindblad_dissipator(down) + c.gamma6p * squeezing_superop(down) +
           c.gamma5m * squeezing_superop(up);
}

DensityMatrix numeric_steady_state(std::span<const ReservoirSpec> specs, double rate, double tau) {
    return liouvillian_steady_state(micromaser_liouvillian(specs, rate, tau));
}

}  // namespace collisim
