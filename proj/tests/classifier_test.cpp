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

#include "collisim/classifier.hpp"

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "collisim/errors.hpp"
#include "collisim/master_equation.hpp"

using namespace collisim;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST(DecideTheta, Examples) {
    EXPECT_EQ(decide_theta(0.774).label, Label::class1);
    EXPECT_EQ(decide_theta(-0.492).label, Label::class2);
    EXPECT_EQ(decide_theta(0.0).label, Label::class1);
    EXPECT_EQ(decide_theta(-0.492).observable_value, -0.492);
    EXPECT_EQ(decide_theta(0.3).rule, Rule::theta_rule);
    EXPECT_THROW(decide_theta(1.1), InvalidArgument);
}

TEST(DecidePhi, Examples) {
    EXPECT_EQ(decide_phi(0.3, 0.5).label, Label::class1);
    EXPECT_EQ(decide_phi(0.3, -0.5).label, Label::class2);
    EXPECT_EQ(decide_phi(0.0, 0.0).label, Label::class1);
    EXPECT_EQ(decide_phi(-0.3, 0.5).label, Label::class2);
    EXPECT_EQ(decide_phi(-0.3, -0.5).label, Label::class1);
    EXPECT_EQ(decide_phi(0.3, 0.5).rule, Rule::phi_rule);
}

TEST(PatternScan, GridBoundaryIsTheAntiDiagonal) {
    PatternConfig cfg;
    cfg.points = grid_points(19, 0.0, kPi);
    const auto res = pattern_scan(cfg);
    ASSERT_EQ(res.rows.size(), 361u);
    std::vector<double> grid;
    for (int i = 0; i < 19; ++i) grid.push_back(kPi * i / 18);
    std::vector<std::vector<double>> z(19, std::vector<double>(19));
    for (std::size_t i = 0; i < 361; ++i) z[i / 19][i % 19] = res.rows[i].closed.z;
    const auto rep = theta_boundary(grid, z);
    EXPECT_LE(rep.max_offset, 1e-9);
    for (const auto& row : res.rows) {
        const double s = std::cos(row.first) + std::cos(row.second);
        if (std::abs(s) > 1e-12) {
            EXPECT_EQ(row.closed_decision.label, s > 0 ? Label::class1 : Label::class2);
        }
    }
}

TEST(PatternScan, RandomPairsFollowTheCosineSum) {
    PatternConfig cfg;
    cfg.points = random_points(32, 7, 0.0, kPi, 0.0, kPi);
    const auto res = pattern_scan(cfg);
    for (const auto& row : res.rows) {
        EXPECT_GT(row.first, 0.0);
        EXPECT_LT(row.first, kPi);
        const double s = std::cos(row.first) + std::cos(row.second);
        EXPECT_EQ(row.closed_decision.label, s >= 0 ? Label::class1 : Label::class2);
    }
    EXPECT_EQ(random_points(32, 7, 0.0, kPi, 0.0, kPi), cfg.points);
}

TEST(PatternScan, EqualAnglesDecideOnTheirOwnCosine) {
    for (double t : {0.2, 1.0, 2.0, 3.0}) {
        PatternConfig cfg;
        cfg.points = {{t, t}};
        const auto res = pattern_scan(cfg);
        EXPECT_EQ(res.rows[0].closed_decision.label, decide_theta(std::cos(t)).label);
    }
}

TEST(PatternScan, LabelsAreScaleInvariant) {
    PatternConfig a;
    a.points = random_points(40, 8, 0.0, kPi, 0.0, kPi);
    PatternConfig b = a;
    b.j1 = 0.037;
    b.j2 = 0.037;
    const auto ra = pattern_scan(a);
    const auto rb = pattern_scan(b);
    for (std::size_t i = 0; i < ra.rows.size(); ++i) {
        EXPECT_EQ(ra.rows[i].closed_decision.label, rb.rows[i].closed_decision.label);
    }
}

TEST(PatternScan, EmptyRangesThrow) {
    PatternConfig cfg;
    EXPECT_THROW(pattern_scan(cfg), InvalidArgument);
    EXPECT_THROW(grid_points(0, 0.0, 1.0), InvalidArgument);
    EXPECT_THROW(grid_points(3, 1.0, 0.0), InvalidArgument);
    EXPECT_THROW(random_points(5, 1, 1.0, 1.0, 0.0, 1.0), InvalidArgument);
}

TEST(BoundaryDistance, MatchesGeometryForEqualCouplings) {
    PatternConfig cfg;
    // boundary cos a + cos b = 0; near (pi/2, pi/2) it is the line a + b = pi
    EXPECT_NEAR(boundary_distance(cfg, kPi / 2 + 0.03, kPi / 2 + 0.03), 0.06 / std::sqrt(2.0), 1e-4);
    EXPECT_LT(boundary_distance(cfg, 1.0, kPi - 1.0), 1e-9);
}

TEST(PatternScan, SimulatorAgreesAwayFromTheBoundaryInThetaSpace) {
    PatternConfig cfg;
    cfg.engine = Engine::simulate;
    cfg.points = {{0.4, 1.1}, {2.7, 2.0}, {0.5, 2.2}, {2.5, 1.2}};
    cfg.threads = 2;
    const auto res = pattern_scan(cfg);
    EXPECT_EQ(res.far_disagreements, 0u);
    EXPECT_EQ(res.far_points, 4u);
    EXPECT_EQ(res.agreement, 1.0);
    for (const auto& row : res.rows) ASSERT_TRUE(row.simulated.has_value());
}

TEST(PatternScan, SimulatorAgreesAwayFromTheBoundaryInPhiSpace) {
    PatternConfig cfg;
    cfg.space = ScanSpace::phi;
    cfg.rate = 0.16;
    cfg.engine = Engine::simulate;
    cfg.points = {{0.8, 4.0}, {2.0, 5.5}, {1.2, 3.6}};
    const auto res = pattern_scan(cfg);
    EXPECT_EQ(res.far_disagreements, 0u);
    for (const auto& row : res.rows) {
        EXPECT_EQ(row.simulated_decision->rule, Rule::phi_rule);
    }
}

TEST(PatternScan, ThreadCountDoesNotChangeResults) {
    PatternConfig cfg;
    cfg.engine = Engine::simulate;
    cfg.schedule = CollisionSchedule::regular(2000, 3.0);
    cfg.points = random_points(6, 3, 0.0, kPi, 0.0, kPi);
    cfg.threads = 1;
    const auto a = pattern_scan(cfg);
    cfg.threads = 3;
    const auto b = pattern_scan(cfg);
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        EXPECT_EQ(*a.rows[i].simulated, *b.rows[i].simulated);
    }
}
