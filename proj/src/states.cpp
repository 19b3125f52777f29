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

#include "collisim/states.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "collisim/errors.hpp"

namespace collisim {

namespace {
constexpr double kAngleSlack = 1e-12;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}  // namespace

BlochParams::BlochParams(double theta, double phi) {
    if (!std::isfinite(theta) || !std::isfinite(phi)) {
        throw InvalidArgument("Bloch angles must be finite");
    }
    if (theta < -kAngleSlack || theta > std::numbers::pi + kAngleSlack) {
        throw InvalidArgument("theta = " + std::to_string(theta) + " outside [0, pi]");
    }
    theta_ = std::clamp(theta, 0.0, std::numbers::pi);
    phi_ = std::fmod(phi, kTwoPi);
    if (phi_ < 0.0) phi_ += kTwoPi;
    if (phi_ >= kTwoPi) phi_ = 0.0;
}

double BlochVector::norm() const { return std::sqrt(x * x + y * y + z * z); }

DensityMatrix pure_state(const BlochParams& p) {
    return DensityMatrix(density_from_moments(reservoir_moments(p)));
}

BlochVector pauli_expectations(const CMatrix& rho) {
    // Tr(rho sigma_x) = 2 Re rho_eg, Tr(rho sigma_y) = -2 Im rho_eg.
    const Complex c = rho(0, 1);
    return {2.0 * c.real(), -2.0 * c.imag(), (rho(0, 0) - rho(1, 1)).real()};
}

BlochVector pauli_expectations(const DensityMatrix& rho) {
    if (rho.dim() != 2) throw InvalidArgument("pauli_expectations expects a single qubit");
    return pauli_expectations(rho.matrix());
}

ReservoirMoments reservoir_moments(const BlochParams& p) {
    const double c = std::cos(p.theta());
    const double s = std::sin(p.theta());
    const Complex sm = std::polar(0.5 * s, -p.phi());
    return {std::conj(sm), sm, 0.5 * (1.0 + c), 0.5 * (1.0 - c), c};
}

CMatrix density_from_moments(const ReservoirMoments& m) {
    CMatrix rho(2, 2);
    rho(0, 0) = m.spm;
    rho(0, 1) = m.sm;
    rho(1, 0) = m.sp;
    rho(1, 1) = m.smp;
    return rho;
}

CMatrix density_from_bloch(const BlochVector& v) {
    CMatrix rho(2, 2);
    rho(0, 0) = 0.5 * (1.0 + v.z);
    rho(1, 1) = 0.5 * (1.0 - v.z);
    rho(0, 1) = Complex(0.5 * v.x, -0.5 * v.y);
    rho(1, 0) = Complex(0.5 * v.x, 0.5 * v.y);
    return rho;
}

}  // namespace collisim
