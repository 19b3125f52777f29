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
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "collisim/errors.hpp"
#include "test_util.hpp"

using namespace collisim;
using collisim::testkit::max_abs;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<ReservoirSpec> random_specs(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> th(0.0, kPi), ph(0.0, 2 * kPi), j(0.001, 0.02);
    std::vector<ReservoirSpec> specs;
    for (std::size_t i = 0; i < n; ++i) specs.push_back({BlochParams(th(rng), ph(rng)), j(rng)});
    return specs;
}

Complex coherence_of(const BlochVector& v) { return Complex(0.5 * v.x, -0.5 * v.y); }

}  // namespace

TEST(Coefficients, NorthPoleReservoir) {
    const std::vector<ReservoirSpec> specs{{BlochParams(0.0, 0.0), 0.01}};
    const auto c = coefficients(specs, 0.2, 3.0);
    EXPECT_EQ(std::abs(c.gamma1m), 0.0);
    EXPECT_EQ(std::abs(c.gamma2p), 0.0);
    EXPECT_NEAR(c.gamma3p, 0.5 * 0.2 * 9.0 * 1e-4, 1e-18);
    EXPECT_EQ(c.gamma4m, 0.0);
}

TEST(Coefficients, EquatorialPairSqueezing) {
    const double j = 0.01;
    const std::vector<ReservoirSpec> specs{{BlochParams(kPi / 2, 0.0), j},
                                           {BlochParams(kPi / 2, 0.0), j}};
    const auto c = coefficients(specs, 0.2, 3.0);
    EXPECT_NEAR(c.gamma5m.real(), 2 * 0.2 * 9.0 * j * j * 0.25, 1e-15);
    EXPECT_NEAR(c.gamma5m.imag(), 0.0, 1e-15);
    EXPECT_EQ(c.gamma6p, std::conj(c.gamma5m));
}

TEST(Coefficients, Identities) {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        const auto specs = random_specs(rng, 1 + trial % 4);
        const double r = 0.1 + 0.01 * trial, tau = 1.0 + 0.1 * trial;
        const auto c = coefficients(specs, r, tau);
        EXPECT_EQ(c.gamma2p, std::conj(c.gamma1m));
        double sj2 = 0.0;
        for (const auto& s : specs) sj2 += s.coupling * s.coupling;
        EXPECT_NEAR(c.gamma3p + c.gamma4m, 0.5 * r * tau * tau * sj2, 1e-12);
    }
}

TEST(Coefficients, RejectsNonPositiveRateAndTau) {
    const std::vector<ReservoirSpec> specs{{BlochParams(0.0, 0.0), 0.01}};
    EXPECT_THROW(coefficients(specs, 0.0, 3.0), InvalidArgument);
    EXPECT_THROW(coefficients(specs, 0.2, -1.0), InvalidArgument);
}

TEST(BlochRhs, ZeroCouplingsGiveZero) {
    const std::vector<ReservoirSpec> specs{{BlochParams(1.0, 2.0), 0.0}};
    const auto c = coefficients(specs, 0.2, 3.0);
    const BlochVector d = bloch_rhs({0.1, -0.3, 0.4}, c);
    EXPECT_EQ(d, (BlochVector{0.0, 0.0, 0.0}));
}

TEST(BlochRhs, NorthPolePumpsUpward) {
    const std::vector<ReservoirSpec> specs{{BlochParams(0.0, 0.0), 0.01}};
    const auto c = coefficients(specs, 0.2, 3.0);
    const BlochVector d = bloch_rhs({0.0, 0.0, 0.0}, c);
    EXPECT_NEAR(d.z, 2 * c.gamma3p, 1e-18);
    EXPECT_GT(d.z, 0.0);
}

TEST(BlochRhs, ResidualAtClosedFormFixedPoint) {
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 40; ++trial) {
        const auto specs = random_specs(rng, 1 + trial % 3);
        const auto c = coefficients(specs, 0.2, 3.0);
        const auto cf = closed_form_steady_state(specs, 0.2, 3.0);
        const BlochVector v = cf.bloch;
        const BlochVector d = bloch_rhs(v, c);
        // Second order in z, first order off-diagonal.
        EXPECT_NEAR(d.z, -4.0 * std::norm(c.gamma1m) * v.z, 1e-15);
        const Complex dc = Complex(0, 1) * c.gamma1m * v.z * (1.0 - c.gamma3p - c.gamma4m) +
                           2.0 * c.gamma5m * std::conj(coherence_of(v));
        EXPECT_NEAR(d.x, 2 * dc.real(), 1e-15);
        EXPECT_NEAR(d.y, -2 * dc.imag(), 1e-15);
    }
}

TEST(IntegrateBloch, ZeroCouplingsAreConstant) {
    const std::vector<ReservoirSpec> specs{{BlochParams(1.0, 0.0), 0.0}};
    const auto c = coefficients(specs, 0.2, 3.0);
    const auto traj = integrate_bloch({0.2, 0.1, -0.3}, c, 100.0, 1.0);
    for (const auto& v : traj) EXPECT_EQ(v, (BlochVector{0.2, 0.1, -0.3}));
}

TEST(IntegrateBloch, NorthPoleAttractor) {
    const std::vector<ReservoirSpec> specs{{BlochParams(0.0, 0.0), 0.01}};
    const auto c = coefficients(specs, 0.2, 3.0);
    const auto traj = integrate_bloch({1.0, 0.0, 0.0}, c, 3e5, max_stable_step(c));
    const BlochVector v = traj.back();
    EXPECT_NEAR(v.x, 0.0, 1e-6);
    EXPECT_NEAR(v.y, 0.0, 1e-6);
    EXPECT_NEAR(v.z, 1.0, 1e-6);
}

TEST(IntegrateBloch, RejectsLargeStep) {
    const std::vector<ReservoirSpec> specs{{BlochParams(1.0, 0.0), 0.01}};
    const auto c = coefficients(specs, 0.2, 3.0);
    EXPECT_THROW(integrate_bloch({0, 0, 0}, c, 100.0, 2.0 * max_stable_step(c)), InvalidArgument);
    EXPECT_THROW(integrate_bloch({0, 0, 0}, c, 100.0, 0.0), InvalidArgument);
}

TEST(IntegrateBloch, TracksRegularCollisionsAtThePoles) {
    const double tau = 3.0;
    for (double theta : {0.0, kPi}) {
        const std::vector<ReservoirSpec> specs{{BlochParams(theta, 0.0), 0.01}};
        const auto c = coefficients(specs, 1.0 / tau, tau);
        const double start_theta = kPi - theta;
        const auto sim = simulate(pure_state(BlochParams(start_theta, 0.0)), specs,
                                  CollisionSchedule::regular(6000, tau), {});
        const auto ode = integrate_bloch({0.0, 0.0, std::cos(start_theta)}, c, 6000 * tau, tau);
        ASSERT_EQ(ode.size(), 6001u);
        for (std::size_t k = 0; k < 6000; k += 50) {
            EXPECT_NEAR(sim.bloch[k].z, ode[k + 1].z, 0.02) << k;
        }
    }
}

TEST(ClosedForm, SymmetricPairCancels) {
    const std::vector<ReservoirSpec> specs{{BlochParams(kPi / 3, 0.0), 0.01},
                                           {BlochParams(2 * kPi / 3, 0.0), 0.01}};
    EXPECT_NEAR(closed_form_steady_state(specs, 0.2, 3.0).bloch.z, 0.0, 1e-15);
}

TEST(ClosedForm, PolarPairWithUnequalCouplings) {
    const std::vector<ReservoirSpec> specs{{BlochParams(0.0, 0.0), 0.00737},
                                           {BlochParams(kPi, 0.0), 0.00263}};
    const auto cf = closed_form_steady_state(specs, 0.2, 3.0);
    const double a = 0.00737 * 0.00737, b = 0.00263 * 0.00263;
    EXPECT_NEAR(cf.bloch.z, (a - b) / (a + b), 1e-14);
    EXPECT_NEAR(cf.bloch.z, 0.7741, 5e-5);
    EXPECT_LE(std::abs(cf.coherence), 1e-16);
}

TEST(ClosedForm, SingleReservoirCoherence) {
    const double xi = 3.0 * 0.2 * 0.01 / 2;
    for (double theta : {0.3, kPi / 4, 2.0}) {
        for (double phi : {0.0, 1.0, 4.0}) {
            const std::vector<ReservoirSpec> specs{{BlochParams(theta, phi), 0.01}};
            const auto cf = closed_form_steady_state(specs, 0.2, 3.0);
            const Complex expected = Complex(0, xi * std::sin(theta) * std::cos(theta)) *
                                     std::polar(1.0, -phi);
            EXPECT_NEAR(std::abs(cf.coherence - expected), 0.0, 1e-15);
            EXPECT_NEAR(std::abs(cf.rho(0, 1) - expected), 0.0, 1e-15);
        }
    }
}

TEST(ClosedForm, ConvexScaleInvariantAndConsistent) {
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 100; ++trial) {
        const auto specs = random_specs(rng, 1 + trial % 4);
        const auto cf = closed_form_steady_state(specs, 0.2, 3.0);
        double lo = 1.0, hi = -1.0;
        for (const auto& s : specs) {
            lo = std::min(lo, std::cos(s.params.theta()));
            hi = std::max(hi, std::cos(s.params.theta()));
        }
        EXPECT_GE(cf.bloch.z, lo - 1e-12);
        EXPECT_LE(cf.bloch.z, hi + 1e-12);
        auto scaled = specs;
        for (auto& s : scaled) s.coupling *= 3.7;
        EXPECT_NEAR(closed_form_steady_state(scaled, 0.2, 3.0).bloch.z, cf.bloch.z, 1e-14);
        EXPECT_NEAR(cf.bloch.y, -2.0 * cf.coherence.imag(), 1e-12);
        // independent expression for the y component
        double sj2 = 0.0, zsum = 0.0, ysum = 0.0;
        for (const auto& s : specs) {
            sj2 += s.coupling * s.coupling;
            zsum += s.coupling * s.coupling * std::cos(s.params.theta());
            ysum += s.coupling * std::sin(s.params.theta()) * std::cos(s.params.phi());
        }
        EXPECT_NEAR(cf.bloch.y, -(0.2 * 3.0 / sj2) * ysum * zsum, 1e-12);
    }
}

TEST(ClosedForm, PolesHaveNoCoherence) {
    const std::vector<ReservoirSpec> specs{{BlochParams(0.0, 1.0), 0.01},
                                           {BlochParams(kPi, 2.0), 0.02}};
    EXPECT_LE(std::abs(closed_form_steady_state(specs, 0.2, 3.0).coherence), 1e-16);
}

TEST(ClosedForm, OutsideDomainOfValidity) {
    const std::vector<ReservoirSpec> specs{{BlochParams(kPi / 4, 0.0), 1.0}};
    EXPECT_THROW(closed_form_steady_state(specs, 1.0, 3.0), DomainOfValidity);
}

TEST(Liouvillian, ZeroCouplingsGiveZeroMatrix) {
    const std::vector<ReservoirSpec> specs{{BlochParams(1.0, 0.0), 0.0}};
    EXPECT_EQ(max_abs(micromaser_liouvillian(specs, 0.2, 3.0)), 0.0);
    EXPECT_THROW(numeric_steady_state(specs, 0.2, 3.0), DegenerateSteadyState);
}

TEST(Liouvillian, NorthPoleSteadyState) {
    const std::vector<ReservoirSpec> specs{{BlochParams(0.0, 0.0), 0.01}};
    const DensityMatrix rho = numeric_steady_state(specs, 0.2, 3.0);
    EXPECT_NEAR(rho(0, 0).real(), 1.0, 1e-10);
    EXPECT_NEAR(std::abs(rho(0, 1)), 0.0, 1e-10);
}

TEST(Liouvillian, AgreesWithClosedFormAtThePoles) {
    const std::vector<ReservoirSpec> specs{{BlochParams(0.0, 0.0), 0.00737},
                                           {BlochParams(kPi, 0.0), 0.00263}};
    const auto numeric = pauli_expectations(numeric_steady_state(specs, 0.2, 3.0));
    EXPECT_NEAR(numeric.z, closed_form_steady_state(specs, 0.2, 3.0).bloch.z, 1e-9);
}

namespace {

// Even and odd parts in the couplings: J -> -J is the same as phi -> phi + pi.
std::vector<ReservoirSpec> with_sign(std::vector<ReservoirSpec> specs, bool flip) {
    if (flip) {
        for (auto& s : specs) s.params = BlochParams(s.params.theta(), s.params.phi() + kPi);
    }
    return specs;
}

}  // namespace

TEST(Liouvillian, FirstOrderPartMatchesTheExactCollision) {
    std::mt19937_64 rng(35);
    const double tau = 3.0, r = 1.0 / tau;
    for (int trial = 0; trial < 10; ++trial) {
        auto specs = random_specs(rng, 1 + trial % 3);
        for (auto& s : specs) s.coupling *= 0.05;
        const CMatrix exact = r * (collision_channel(with_sign(specs, false), tau) -
                                   collision_channel(with_sign(specs, true), tau)) / 2.0;
        const CMatrix model = (micromaser_liouvillian(with_sign(specs, false), r, tau) -
                               micromaser_liouvillian(with_sign(specs, true), r, tau)) / 2.0;
        EXPECT_LE(max_abs(exact - model), 1e-4 * max_abs(exact));
    }
}

TEST(Liouvillian, SingleReservoirSecondOrderPartMatchesTheExactCollision) {
    std::mt19937_64 rng(36);
    const double tau = 3.0, r = 1.0 / tau;
    const CMatrix id = CMatrix::Identity(4, 4);
    for (int trial = 0; trial < 10; ++trial) {
        auto specs = random_specs(rng, 1);
        specs[0].coupling = 1e-3;
        const CMatrix exact = r * (collision_channel(with_sign(specs, false), tau) +
                                   collision_channel(with_sign(specs, true), tau) - 2.0 * id) / 2.0;
        const CMatrix model = (micromaser_liouvillian(with_sign(specs, false), r, tau) +
                               micromaser_liouvillian(with_sign(specs, true), r, tau)) / 2.0;
        EXPECT_LE(max_abs(exact - model), 1e-4 * max_abs(exact));
    }
}

TEST(Liouvillian, SingleReservoirFixedPointConvergesToTheExactOne) {
    // Back-to-back collisions: the rate is 1 / tau. Error falls as J^3.
    std::mt19937_64 rng(37);
    const double tau = 3.0;
    for (int trial = 0; trial < 5; ++trial) {
        auto specs = random_specs(rng, 1);
        double prev = 0.0;
        for (double j : {0.01, 0.005}) {
            specs[0].coupling = j;
            const CMatrix channel = collision_channel(specs, tau);
            const CMatrix fixed =
                liouvillian_steady_state(channel - CMatrix::Identity(4, 4)).matrix();
            const CMatrix numeric = numeric_steady_state(specs, 1.0 / tau, tau).matrix();
            const double err = max_abs(fixed - numeric);
            EXPECT_LE(err, 1e-4);
            if (prev > 0.0) EXPECT_LT(err, prev / 4);
            prev = err;
        }
    }
}
