/*
 * Copyright 2026 The dvfsleak Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "dvfsleak/error.hpp"
#include "dvfsleak/model.hpp"
#include "test_support.hpp"

namespace dvfsleak {
namespace {

using testing::toy_preset;

TEST(DvfsCurve, RejectsEmptyAndNonIncreasing) {
    EXPECT_THROW(DvfsCurve(std::vector<PState>{}), InvalidArgument);
    EXPECT_THROW(DvfsCurve({{0, 2e9, 1.0}, {1, 1e9, 1.1}}), InvalidArgument);
    EXPECT_THROW(DvfsCurve({{0, 1e9, 1.0}, {1, 2e9, 0.9}}), InvalidArgument);
    EXPECT_THROW(DvfsCurve({{0, 1e9, 1.0}, {2, 2e9, 1.1}}), InvalidArgument);
    EXPECT_THROW(DvfsCurve({{0, -1.0, 1.0}}), InvalidArgument);
}

TEST(DvfsCurve, AffineVoltage) {
    const std::vector<double> f{1e9, 2e9, 4e9};
    const DvfsCurve c = DvfsCurve::from_frequencies(f, 0.6, 1.2);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_DOUBLE_EQ(c.at(0).voltage, 0.6);
    EXPECT_DOUBLE_EQ(c.at(1).voltage, 0.8);
    EXPECT_DOUBLE_EQ(c.top().voltage, 1.2);
    EXPECT_EQ(c.top_index(), 2u);
    EXPECT_THROW(c.at(3), InvalidArgument);
}

TEST(Power, DynamicMatchesClosedForm) {
    const PowerParams p{1.0, 0.1, 3e-9, 0.2, 0.3, 0.4, 0.5};
    const PState s{0, 2e9, 0.9};
    const ActivityFactor a{0.7, 0.1, 0.25, 0.5, 0.125};
    const double scale = 3e-9 * 0.9 * 0.9 * 2e9;
    const double data = 0.2 * 0.25 + 0.3 * 0.5 + 0.4 * 0.125;
    EXPECT_NEAR(dynamic_power(s, a, p), scale * (0.7 + data), 1e-12);
    EXPECT_NEAR(estimated_dynamic_power(s, a, p), scale * (0.7 + 0.5 * data), 1e-12);
    EXPECT_NEAR(hotspot_power(s, a, 0.2, p), scale * (0.2 * 0.7 + data), 1e-12);
}

TEST(Power, HdAIsNotAPowerTerm) {
    const PowerParams p{1.0, 0.0, 1e-9, 0.2, 0.2, 0.2, 1.0};
    const PState s{0, 1e9, 1.0};
    ActivityFactor a{0.5, 0.0, 0.1, 0.1, 0.1};
    const double before = dynamic_power(s, a, p);
    a.hd_a = 1.0;
    EXPECT_DOUBLE_EQ(dynamic_power(s, a, p), before);
}

TEST(Power, StaticPower) {
    const PowerParams p{2.0, 0.05, 1e-9, 0, 0, 0, 1};
    EXPECT_DOUBLE_EQ(static_power(25.0, 25.0, p), 2.0);
    EXPECT_NEAR(static_power(65.0, 25.0, p), 4.0, 1e-12);
    EXPECT_THROW(static_power(10.0, 25.0, p), InvalidArgument);
    EXPECT_THROW(static_power(std::nan(""), 25.0, p), InvalidArgument);
}

TEST(Thermal, StepRejectsUnstableDt) {
    const RcNode node{25.0, 1.0, 1.0};
    EXPECT_THROW(thermal_step(25.0, 1.0, 0.0, node), InvalidArgument);
    EXPECT_THROW(thermal_step(25.0, 1.0, 0.1, node), InvalidArgument);
    EXPECT_NO_THROW(thermal_step(25.0, 1.0, 0.099, node));
}

TEST(Thermal, SingleNodeReachesAnalyticFixedPoint) {
    const RcNode node{22.0, 4.0, 60.0};
    const double power = 12.5;
    const double dt = 0.01;
    const double tau = node.resistance * node.capacitance;
    double t = node.ambient;
    const auto steps = static_cast<long>(std::ceil(10.0 * tau / dt));
    for (long i = 0; i < steps; ++i)
        t = thermal_step(t, power, dt, node);
    EXPECT_NEAR(t, node.ambient + power * node.resistance, 0.01);
}

TEST(Thermal, NetworkReachesAnalyticFixedPoint) {
    const ThermalParams th{22.0, 1.5, 40.0, 1.2, 0.5, 3.0};
    const double power = 20.0;
    const double dt = 0.01;
    ThermalState s{th.ambient, th.ambient};
    const double tau = (th.r_th + th.r_die) * (th.c_th + th.c_die);
    const auto steps = static_cast<long>(std::ceil(10.0 * tau / dt));
    for (long i = 0; i < steps; ++i)
        s = thermal_network_step(s, power, dt, th);
    EXPECT_NEAR(s.case_temp, th.ambient + power * th.r_th, 0.01);
    EXPECT_NEAR(s.die, th.ambient + power * (th.r_th + th.r_die), 0.01);
    EXPECT_NEAR(sensor_temperature(s.die, 2.0, th), s.die + 6.0, 1e-12);
}

TEST(Thermal, CoolsTowardsAmbient) {
    const RcNode node{25.0, 1.0, 10.0};
    double t = 80.0;
    for (int i = 0; i < 100; ++i) {
        const double next = thermal_step(t, 0.0, 0.01, node);
        EXPECT_LT(next, t);
        EXPECT_GT(next, node.ambient);
        t = next;
    }
}

TEST(DevicePreset, ToyPresetIsValid) { EXPECT_NO_THROW(toy_preset().validate()); }

TEST(DevicePreset, ValidateNamesViolations) {
    DevicePreset p = toy_preset();
    p.limits.f_max = 1e9;
    EXPECT_THROW(p.validate(), InvalidArgument);

    p = toy_preset();
    p.power.governor_data_visibility = 1.5;
    EXPECT_THROW(p.validate(), InvalidArgument);

    p = toy_preset();
    p.instruction_energy[to_index(InstructionKind::Div)] = 2.0;
    EXPECT_THROW(p.validate(), InvalidArgument);

    p = toy_preset();
    p.thermal.r_th = 0.0;
    EXPECT_THROW(p.validate(), InvalidArgument);

    p = toy_preset();
    p.governor.interval_ticks = 0;
    EXPECT_THROW(p.validate(), InvalidArgument);

    p = toy_preset();
    p.limits.t_max = p.thermal.ambient - 1.0;
    EXPECT_THROW(p.validate(), InvalidArgument);
}

TEST(ConstraintClass, Names) {
    EXPECT_EQ(to_string(ConstraintClass::ThermallyConstrained), "ThermallyConstrained");
    EXPECT_EQ(to_string(ConstraintClass::PowerConstrained), "PowerConstrained");
    EXPECT_EQ(to_string(ConstraintClass::FrequencyConstrained), "FrequencyConstrained");
    EXPECT_EQ(to_string(ConstraintClass::Unconstrained), "Unconstrained");
    EXPECT_EQ(to_string(DeviceClass::Gpu), "gpu");
}

TEST(InstructionKind, MnemonicsRoundTrip) {
    for (InstructionKind k : kAllInstructionKinds) {
        const auto parsed = parse_instruction_kind(to_string(k));
        ASSERT_TRUE(parsed.has_value());
        EXPECT_EQ(*parsed, k);
    }
    EXPECT_FALSE(parse_instruction_kind("nop").has_value());
    EXPECT_FALSE(parse_instruction_kind("ADD").has_value());
}

} // namespace
} // namespace dvfsleak
