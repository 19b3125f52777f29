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

#ifndef COLLISIM_QFI_HPP_
#define COLLISIM_QFI_HPP_

// Quantum Fisher information of the closed-form steady state with respect
// to a common shift of all reservoir polar angles (theta) or azimuths (phi).

#include <optional>
#include <span>
#include <vector>

#include "collisim/collision.hpp"
#include "collisim/linalg.hpp"

namespace collisim {

inline constexpr double kPureDetThreshold = 1e-12;

enum class QfiParameter { theta, phi };

enum class QfiMethod {
    determinant_formula,        // Tr[d^2] + Tr[(rho d)^2] / det rho
    pure_state_formula,         // 2 Tr[d^2]
    analytic_single_reservoir,  // closed trigonometric expression in theta, xi
    analytic_coherence,         // 4 |rho_eg|^2 as a quadruple sum
    finite_difference,
};

struct QfiResult {
    double value = 0.0;
    QfiParameter parameter = QfiParameter::theta;
    QfiMethod method = QfiMethod::determinant_formula;
};

// Two-level formula; throws PureStateError when det rho <= 1e-12.
QfiResult qfi_tls(const DensityMatrix& rho, const CMatrix& drho,
                  QfiParameter parameter = QfiParameter::theta);

// 2 Tr[drho^2], exact for pure states.
QfiResult qfi_pure(const CMatrix& drho, QfiParameter parameter = QfiParameter::theta);

// Routes to qfi_tls or qfi_pure depending on det rho.
QfiResult qfi_auto(const DensityMatrix& rho, const CMatrix& drho,
                   QfiParameter parameter = QfiParameter::theta);

// Derivatives of the closed-form steady state under phi_i -> phi_i + s and
// theta_i -> theta_i + s for all i.
CMatrix dphi_rho(std::span<const ReservoirSpec> specs, double rate, double tau);
CMatrix dtheta_rho(std::span<const ReservoirSpec> specs, double rate, double tau);

// Central differences of the closed form, step h. Valid at the poles too
// (angles are not clamped inside the difference).
CMatrix dphi_rho_fd(std::span<const ReservoirSpec> specs, double rate, double tau, double h = 1e-6);
CMatrix dtheta_rho_fd(std::span<const ReservoirSpec> specs, double rate, double tau,
                      double h = 1e-6);

QfiResult qfi_phi_analytic(std::span<const ReservoirSpec> specs, double rate, double tau);

// Single-reservoir theta expression evaluated as published, xi = tau r J / 2.
// Throws SingularPoint when sin^2 theta - xi^2 sin^2 2theta <= 1e-12.
QfiResult qfi_theta_analytic_single(double theta, double xi);

enum class ScanLayout {
    mirrored,        // first = s, second = period - s
    first_follows,   // first = s, second fixed
    second_follows,  // first fixed, second = s
};

struct QfiScanConfig {
    QfiParameter parameter = QfiParameter::theta;
    ScanLayout layout = ScanLayout::mirrored;
    std::vector<ReservoirSpec> specs;  // two reservoirs; the fixed angle is read from here
    std::vector<double> grid;
    double rate = 0.2;
    double tau = 3.0;
    double fd_step = 1e-6;
    std::optional<double> threshold;  // label boundary; pi/2 for theta, pi for phi by default
};

struct QfiScanResult {
    std::vector<double> grid;
    std::vector<double> values;  // NaN where the state is pure
    std::size_t argmax_index = 0;
    double argmax = 0.0;
    int label = 0;  // 0 iff argmax >= threshold
};

std::vector<double> default_theta_grid();  // 181 points, 1 degree apart, [0, pi]
std::vector<double> default_phi_grid();    // 361 points, 1 degree apart, [0, 2 pi]

QfiScanResult qfi_scan_decide(const QfiScanConfig& config);

}  // namespace collisim

#endif  // COLLISIM_QFI_HPP_
