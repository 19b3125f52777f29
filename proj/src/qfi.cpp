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

#include "collisim/qfi.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "collisim/errors.hpp"
#include "collisim/master_equation.hpp"

namespace collisim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTieTolerance = 1e-9;  // relative; above the noise of the difference step

struct Angles {
    std::vector<double> theta, phi, j;
};

Angles unpack(std::span<const ReservoirSpec> specs) {
    if (specs.empty() || specs.size() > kMaxReservoirs) {
        throw InvalidArgument("number of reservoirs must be between 1 and 4");
    }
    Angles a;
    for (const auto& s : specs) {
        a.theta.push_back(s.params.theta());
        a.phi.push_back(s.params.phi());
        a.j.push_back(s.coupling);
    }
    return a;
}

// Closed-form steady state from raw angles; no range checks so that
// difference stencils can step past the poles.
CMatrix closed_form_raw(const Angles& a, double rate, double tau) {
    double norm = 0.0;
    double z = 0.0;
    for (std::size_t i = 0; i < a.j.size(); ++i) {
        norm += a.j[i] * a.j[i];
        z += a.j[i] * a.j[i] * std::cos(a.theta[i]);
    }
    if (!(norm > 0.0)) throw InvalidArgument("closed form needs a nonzero coupling");
    z /= norm;
    Complex coh;
    for (std::size_t i = 0; i < a.j.size(); ++i) {
        for (std::size_t k = 0; k < a.j.size(); ++k) {
            coh += a.j[i] * a.j[k] * a.j[k] * std::sin(a.theta[i]) * std::cos(a.theta[k]) *
                   std::polar(1.0, -a.phi[i]);
        }
    }
    coh *= Complex(0.0, tau * rate / (2.0 * norm));
    CMatrix m(2, 2);
    m << (1.0 + z) / 2.0, coh, std::conj(coh), (1.0 - z) / 2.0;
    return m;
}

Angles shifted(Angles a, QfiParameter p, double s) {
    auto& v = (p == QfiParameter::theta) ? a.theta : a.phi;
    for (double& x : v) x += s;
    return a;
}

CMatrix central_difference(const Angles& a, QfiParameter p, double rate, double tau, double h) {
    if (!(h > 0.0)) throw InvalidArgument("difference step must be positive");
    return (closed_form_raw(shifted(a, p, h), rate, tau) -
            closed_form_raw(shifted(a, p, -h), rate, tau)) /
           (2.0 * h);
}

double determinant(const CMatrix& m) {
    return (m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0)).real();
}

void check_two_level(const CMatrix& m, const char* what) {
    if (m.rows() != 2 || m.cols() != 2) {
        throw InvalidArgument(std::string(what) + " must be 2x2");
    }
}

}  // namespace

QfiResult qfi_tls(const DensityMatrix& rho, const CMatrix& drho, QfiParameter parameter) {
    check_two_level(rho.matrix(), "rho");
    check_two_level(drho, "drho");
    hermitian_checked(drho, 1e-12);
    const double det = determinant(rho.matrix());
    if (det <= kPureDetThreshold) {
        throw PureStateError("det rho = " + std::to_string(det) +
                             " is below 1e-12; use the pure-state formula");
    }
    const CMatrix rd = rho.matrix() * drho;
    const double f = (drho * drho).trace().real() + (rd * rd).trace().real() / det;
    return {f, parameter, QfiMethod::determinant_formula};
}

QfiResult qfi_pure(const CMatrix& drho, QfiParameter parameter) {
    check_two_level(drho, "drho");
    return {2.0 * (drho * drho).trace().real(), parameter, QfiMethod::pure_state_formula};
}

QfiResult qfi_auto(const DensityMatrix& rho, const CMatrix& drho, QfiParameter parameter) {
    if (determinant(rho.matrix()) <= kPureDetThreshold) return qfi_pure(drho, parameter);
    return qfi_tls(rho, drho, parameter);
}

CMatrix dphi_rho(std::span<const ReservoirSpec> specs, double rate, double tau) {
    const Complex coh = closed_form_steady_state(specs, rate, tau).coherence;
    const Complex d = Complex(0.0, -1.0) * coh;
    CMatrix m(2, 2);
    m << 0.0, d, std::conj(d), 0.0;
    return m;
}

CMatrix dtheta_rho(std::span<const ReservoirSpec> specs, double rate, double tau) {
    const Angles a = unpack(specs);
    double norm = 0.0;
    double diag = 0.0;
    for (std::size_t i = 0; i < a.j.size(); ++i) {
        norm += a.j[i] * a.j[i];
        diag += a.j[i] * a.j[i] * std::sin(a.theta[i]);
    }
    if (!(norm > 0.0)) throw InvalidArgument("derivative needs a nonzero coupling");
    diag = -diag / (2.0 * norm);
    Complex off;
    for (std::size_t i = 0; i < a.j.size(); ++i) {
        for (std::size_t k = 0; k < a.j.size(); ++k) {
            off += a.j[i] * a.j[k] * a.j[k] * std::cos(a.theta[i] + a.theta[k]) *
                   std::polar(1.0, -a.phi[i]);
        }
    }
    off *= Complex(0.0, tau * rate / (2.0 * norm));
    CMatrix m(2, 2);
    m << diag, off, std::conj(off), -diag;
    return m;
}

CMatrix dphi_rho_fd(std::span<const ReservoirSpec> specs, double rate, double tau, double h) {
    return central_difference(unpack(specs), QfiParameter::phi, rate, tau, h);
}

CMatrix dtheta_rho_fd(std::span<const ReservoirSpec> specs, double rate, double tau, double h) {
    return central_difference(unpack(specs), QfiParameter::theta, rate, tau, h);
}

QfiResult qfi_phi_analytic(std::span<const ReservoirSpec> specs, double rate, double tau) {
    const Angles a = unpack(specs);
    const std::size_t n = a.j.size();
    double norm = 0.0;
    for (double j : a.j) norm += j * j;
    if (!(norm > 0.0)) throw InvalidArgument("QFI needs a nonzero coupling");
    Complex sum;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            for (std::size_t k = 0; k < n; ++k) {
                for (std::size_t l = 0; l < n; ++l) {
                    sum += a.j[i] * a.j[j] * a.j[j] * a.j[k] * a.j[l] * a.j[l] *
                           std::sin(a.theta[i]) * std::cos(a.theta[j]) * std::sin(a.theta[k]) *
                           std::cos(a.theta[l]) * std::polar(1.0, a.phi[k] - a.phi[i]);
                }
            }
        }
    }
    const double pre = tau * rate / (2.0 * norm);
    sum *= 4.0 * pre * pre;
    if (std::abs(sum.imag()) > 1e-14) {
        throw std::logic_error("quadruple sum has imaginary part " + std::to_string(sum.imag()));
    }
    return {sum.real(), QfiParameter::phi, QfiMethod::analytic_coherence};
}

QfiResult qfi_theta_analytic_single(double theta, double xi) {
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    const double s2 = std::sin(2 * theta);
    const double c2 = std::cos(2 * theta);
    const double s4 = std::sin(4 * theta);
    const double x2 = xi * xi;
    const double denom = s * s - x2 * s2 * s2;
    if (denom <= 1e-12) {
        throw SingularPoint("single-reservoir theta QFI is singular at theta = " +
                            std::to_string(theta));
    }
    const double inner = -1.5 * s2 * s4 + c2 * c2 + c * c * c2 * c2 - s * s * s2 * s2 +
                         x2 / 2.0 * s4 * s4;
    const double bracket = s * s / 2.0 + s2 * s2 / 8.0 + x2 * inner;
    const double f = s * s / 2.0 + 2.0 * x2 * c2 * c2 + bracket / denom;
    return {f, QfiParameter::theta, QfiMethod::analytic_single_reservoir};
}

std::vector<double> default_theta_grid() {
    std::vector<double> g(181);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = kPi * static_cast<double>(k) / 180.0;
    return g;
}

std::vector<double> default_phi_grid() {
    std::vector<double> g(361);
    for (std::size_t k = 0; k < g.size(); ++k) g[k] = kPi * static_cast<double>(k) / 180.0;
    return g;
}

QfiScanResult qfi_scan_decide(const QfiScanConfig& config) {
    if (config.grid.empty()) throw InvalidArgument("QFI scan grid is empty");
    if (config.specs.size() != 2) throw InvalidArgument("QFI scan expects two reservoirs");
    const bool theta = config.parameter == QfiParameter::theta;
    const double period = theta ? kPi : 2.0 * kPi;
    const double threshold = config.threshold.value_or(theta ? kPi / 2.0 : kPi);

    Angles base = unpack(config.specs);
    auto& angle = theta ? base.theta : base.phi;

    QfiScanResult out;
    out.grid = config.grid;
    out.values.assign(config.grid.size(), std::numeric_limits<double>::quiet_NaN());
    bool any = false;
    for (std::size_t k = 0; k < config.grid.size(); ++k) {
        const double s = config.grid[k];
        Angles a = base;
        auto& v = theta ? a.theta : a.phi;
        switch (config.layout) {
            case ScanLayout::mirrored:
                v[0] = s;
                v[1] = period - s;
                break;
            case ScanLayout::first_follows:
                v[0] = s;
                v[1] = angle[1];
                break;
            case ScanLayout::second_follows:
                v[0] = angle[0];
                v[1] = s;
                break;
        }
        const CMatrix rho = closed_form_raw(a, config.rate, config.tau);
        if (determinant(rho) <= kPureDetThreshold) continue;
        const CMatrix d = central_difference(a, config.parameter, config.rate, config.tau,
                                             config.fd_step);
        const CMatrix rd = rho * d;
        const double f = (d * d).trace().real() + (rd * rd).trace().real() / determinant(rho);
        out.values[k] = f;
        // ties within the difference-step noise keep the earlier grid point
        const double best = out.values[out.argmax_index];
        if (!any || f > best + kTieTolerance * std::abs(best)) out.argmax_index = k;
        any = true;
    }
    if (!any) throw SingularPoint("every point of the QFI scan is a pure state");
    out.argmax = config.grid[out.argmax_index];
    out.label = out.argmax >= threshold ? 0 : 1;
    return out;
}

}  // namespace collisim
