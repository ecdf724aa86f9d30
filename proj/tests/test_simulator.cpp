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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <gtest/gtest.h>

#include "dvfsleak/analysis.hpp"
#include "dvfsleak/error.hpp"
#include "dvfsleak/experiment.hpp"
#include "dvfsleak/simulator.hpp"
#include "dvfsleak/workload.hpp"
#include "test_support.hpp"

namespace dvfsleak {
namespace {

using testing::shipped_preset;
using testing::toy_preset;

double mean(const std::vector<double> &v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

SimState state_at(std::size_t idx, double temp) {
    SimState s;
    s.pstate_index = idx;
    s.temp = temp;
    return s;
}

GovernorContext wants_top(double projected) {
    GovernorContext ctx;
    ctx.projected_up_power = projected;
    return ctx;
}

TEST(Governor, StepsDownAtThermalLimit) {
    const DevicePreset p = toy_preset();
    EXPECT_EQ(governor_step(state_at(3, p.limits.t_max), 10.0, p, wants_top(11.0)), 2u);
    EXPECT_EQ(governor_step(state_at(3, p.limits.t_max - p.governor.hysteresis), 10.0, p,
                            wants_top(11.0)),
              2u);
    EXPECT_EQ(governor_step(state_at(0, p.limits.t_max + 5.0), 10.0, p, wants_top(11.0)), 0u);
}

TEST(Governor, StepsDownAtPowerLimit) {
    const DevicePreset p = toy_preset();
    EXPECT_EQ(governor_step(state_at(4, 30.0), p.limits.p_max, p), 3u);
    EXPECT_EQ(governor_step(state_at(4, 30.0), p.limits.p_max + 1.0, p), 3u);
}

TEST(Governor, StepsUpOnlyWithHeadroom) {
    const DevicePreset p = toy_preset();
    const double cool = p.limits.t_max - 2.0 * p.governor.hysteresis - 0.1;
    EXPECT_EQ(governor_step(state_at(2, cool), 10.0, p, wants_top(11.0)), 3u);
    EXPECT_EQ(governor_step(state_at(2, cool), 10.0, p, wants_top(p.limits.p_max)), 2u);
    const double band = p.limits.t_max - 1.5 * p.governor.hysteresis;
    EXPECT_EQ(governor_step(state_at(2, band), 10.0, p, wants_top(11.0)), 2u);
    EXPECT_EQ(governor_step(state_at(4, cool), 10.0, p, wants_top(11.0)), 4u);
}

TEST(Governor, ExtrapolatesProjectedPower) {
    const DevicePreset p = toy_preset();
    const double cool = 30.0;
    EXPECT_EQ(governor_step(state_at(1, cool), 10.0, p), 2u);
    EXPECT_EQ(governor_step(state_at(1, cool), p.limits.p_max * 0.95, p), 1u);
}

TEST(Governor, FollowsDemand) {
    const DevicePreset p = toy_preset();
    GovernorContext ctx = wants_top(11.0);
    ctx.demand = 1;
    EXPECT_EQ(governor_step(state_at(3, 30.0), 10.0, p, ctx), 2u);
    EXPECT_EQ(governor_step(state_at(1, 30.0), 10.0, p, ctx), 1u);
    EXPECT_EQ(demand_index(p.curve, 0.0), 0u);
    EXPECT_EQ(demand_index(p.curve, 1.0), 4u);
    EXPECT_EQ(demand_index(p.curve, 0.5), 2u);
    EXPECT_EQ(demand_index(p.curve, 0.3), 2u);
}

TEST(Simulator, RejectsBadArguments) {
    const DevicePreset p = toy_preset();
    EXPECT_THROW(Simulator(p, NoiseModel{}, std::size_t{5}), InvalidArgument);
    EXPECT_THROW(Simulator(p, NoiseModel{-1.0, 0.0, 0.0, 0}), InvalidArgument);
    EXPECT_THROW(Simulator(p, NoiseModel{}, std::nullopt, 0.0), InvalidArgument);
    EXPECT_THROW(run(p, build_add_constant(1), 0.0, NoiseModel{}), InvalidArgument);
    DevicePreset bad = p;
    bad.thermal.c_th = -1.0;
    EXPECT_THROW(Simulator(bad, NoiseModel{}), InvalidArgument);
}

TEST(Simulator, ColdStart) {
    const DevicePreset p = shipped_preset("m1-air");
    const Trace t = run(p, build_instruction_loop(InstructionKind::Add), 1.0, NoiseModel::none());
    ASSERT_EQ(t.size(), 100u);
    EXPECT_DOUBLE_EQ(t.samples[0].t, 0.0);
    EXPECT_EQ(t.samples[0].pstate_index, p.curve.top_index());
    EXPECT_NEAR(t.samples[0].temp, p.thermal.ambient, 5.0);
    EXPECT_GE(t.samples[0].temp, p.thermal.ambient);
    for (std::size_t i = 1; i < t.size(); ++i)
        EXPECT_NEAR(t.samples[i].t - t.samples[i - 1].t, t.dt, 1e-9);
    const Trace idle = run(p, build_workload(parse_workload_spec("idle")), 1.0, NoiseModel::none());
    EXPECT_EQ(idle.samples[0].pstate_index, 0u);
}

TEST(Simulator, Deterministic) {
    const DevicePreset p = shipped_preset("m1-air");
    const Workload w = build_add_constant(1);
    const NoiseModel n{0.05, 0.1, 50e-6, 1234};
    EXPECT_EQ(run(p, w, 300.0, n), run(p, w, 300.0, n));
    NoiseModel other = n;
    other.seed = 1235;
    EXPECT_NE(run(p, w, 300.0, n), run(p, w, 300.0, other));
}

TEST(Simulator, EnergySanity) {
    const DevicePreset p = shipped_preset("m1-air");
    Simulator sim(p, NoiseModel::none());
    const Load load = resolve_load(p, build_lsl_lsr_component_c(8));
    sim.reset(load);
    for (int i = 0; i < 30000; ++i) {
        const double die = sim.state().thermal.die;
        const PState ps = p.curve.at(sim.state().pstate_index);
        const SensorSample s = sim.step(load);
        const double want = static_power(die, p.thermal.ambient, p.power) +
                            dynamic_power(ps, load.activity, p.power);
        ASSERT_NEAR(s.power, want, 1e-9) << "tick " << i;
        ASSERT_EQ(s.frequency, ps.frequency);
    }
}

TEST(Simulator, SimulatedFixedPointMatchesAnalytic) {
    DevicePreset p = toy_preset();
    p.power.leakage_coeff = 0.05;
    const std::size_t clamp = 2;
    const Load load = resolve_load(p, build_shift_kernel(8));
    const double dyn = dynamic_power(p.curve.at(clamp), load.activity, p.power);
    const double r = p.thermal.r_th + p.thermal.r_die;
    const double rise = (p.power.idle_power + dyn) * r / (1.0 - p.power.leakage_coeff * r);
    const double tau = r * (p.thermal.c_th + p.thermal.c_die) /
                       (1.0 - p.power.leakage_coeff * r);
    const Trace t = run(p, build_shift_kernel(8), 10.0 * tau, NoiseModel::none(), clamp);
    EXPECT_NEAR(t.samples.back().temp, p.thermal.ambient + rise, 0.01);
}

TEST(Simulator, ClampBypassesGovernor) {
    const DevicePreset p = shipped_preset("m1-air");
    const Trace t = run(p, build_instruction_loop(InstructionKind::Str), 800.0, NoiseModel{}, 10);
    for (const SensorSample &s : t.samples)
        ASSERT_EQ(s.pstate_index, 10u);
}

TEST(Simulator, GovernorSafetyThermal) {
    const DevicePreset p = shipped_preset("m1-air");
    const Trace t = run(p, build_instruction_loop(InstructionKind::Str), 1500.0, NoiseModel::none());
    double worst = 0.0;
    for (const SensorSample &s : t.samples)
        worst = std::max(worst, s.temp);
    // One governor interval of heating past the trip point, plus the jump of
    // the sensor hot spot when the load starts.
    EXPECT_LE(worst, p.limits.t_max + 1.0);
}

TEST(Simulator, GovernorSafetyPowerOnEstimate) {
    const DevicePreset p = shipped_preset("rx6600");
    const Workload w = build_shift_kernel(16);
    const Load load = resolve_load(p, w);
    Simulator sim(p, NoiseModel::none());
    sim.reset(load);
    const double step_up = dynamic_power(p.curve.top(), load.activity, p.power) -
                           dynamic_power(p.curve.at(p.curve.top_index() - 1), load.activity,
                                         p.power);
    for (int i = 0; i < 60000; ++i) {
        const PState ps = p.curve.at(sim.state().pstate_index);
        const double die = sim.state().thermal.die;
        sim.step(load);
        const double est = static_power(die, p.thermal.ambient, p.power) +
                           estimated_dynamic_power(ps, load.activity, p.power);
        ASSERT_LE(est, p.limits.p_max + 2.0 * step_up) << "tick " << i;
    }
}

TEST(Simulator, ConstraintClassesEmerge) {
    const Workload w = build_shift_kernel(8);
    DevicePreset fine = toy_preset();
    std::vector<double> freqs;
    for (int i = 0; i <= 40; ++i)
        freqs.push_back(1.0e9 + 0.05e9 * i);
    fine.curve = DvfsCurve::from_frequencies(freqs, 0.8, 1.0);
    DevicePreset cool = fine;
    cool.thermal.r_th = 0.2;
    DevicePreset capped = fine;
    capped.thermal.r_th = 0.2;
    capped.limits.p_max = 8.0;
    DevicePreset hot = fine;
    hot.thermal.r_th = 8.0;
    hot.thermal.c_th = 10.0;
    const auto classify = [&](const DevicePreset &p) {
        return classify_constraint(run(p, w, 1500.0, NoiseModel{0.05, 0.1, 0, 3}), p);
    };
    EXPECT_EQ(classify(cool), ConstraintClass::FrequencyConstrained);
    EXPECT_EQ(classify(capped), ConstraintClass::PowerConstrained);
    EXPECT_EQ(classify(hot), ConstraintClass::ThermallyConstrained);
}

TEST(Simulator, FanCooledMiniHoldsTopState) {
    const DevicePreset p = shipped_preset("m1-mini");
    for (InstructionKind k : {InstructionKind::Add, InstructionKind::Fadd}) {
        const Trace t = run(p, build_instruction_loop(k), 2000.0, NoiseModel{0.05, 0.1, 0, 9});
        for (const SensorSample &s : t.samples)
            ASSERT_EQ(s.pstate_index, p.curve.top_index());
        EXPECT_NEAR(t.samples.back().frequency, 3.2e9, 0.01e9);
    }
}

TEST(Simulator, PowerCappedCardUnderDivKernel) {
    const DevicePreset p = shipped_preset("rx6600");
    Workload w = build_instruction_loop(InstructionKind::Div);
    w.parallelism = kIssueWidth;
    const Trace t = run(p, w, 600.0, NoiseModel{0.05, 0.1, 0, 4});
    const SteadyStateWindow tail = window_means(t, 400.0, 600.0);
    EXPECT_NEAR(tail.mean_power, p.limits.p_max, 0.02 * p.limits.p_max);
    EXPECT_LT(t.samples.back().pstate_index, p.curve.top_index());
}

TEST(Simulator, AddOperandsOrderSteadyState) {
    const DevicePreset p = shipped_preset("m1-air");
    const NoiseModel n{0.05, 0.1, 0, 11};
    const Trace zero = run(p, build_add_constant(0), 2000.0, n);
    const Trace one = run(p, build_add_constant(1), 2000.0, n);
    const SteadyStateWindow a = window_means(zero, 1000.0, 2000.0);
    const SteadyStateWindow b = window_means(one, 1000.0, 2000.0);
    EXPECT_LT(b.mean_freq, a.mean_freq);
    EXPECT_LT(b.mean_power, a.mean_power);
    EXPECT_NEAR(a.mean_temp, 93.0, 1.0);
}

TEST(Simulator, ThermalSteadyStateNearLimit) {
    const DevicePreset p = shipped_preset("m1-air");
    for (InstructionKind k : {InstructionKind::Add, InstructionKind::Fadd, InstructionKind::Aes}) {
        const Trace t = run(p, build_instruction_loop(k), 2000.0, NoiseModel{0.05, 0.1, 0, 2});
        const SteadyStateWindow w = window_means(t, 1800.0, 2000.0);
        EXPECT_NEAR(w.mean_temp, 93.0, 1.0) << to_string(k);
    }
}

TEST(Simulator, ReseedKeepsPhysicalState) {
    const DevicePreset p = toy_preset();
    const Load load = resolve_load(p, build_shift_kernel(4));
    Simulator a(p, NoiseModel{0.1, 0.1, 1e-5, 1});
    a.reset(load);
    for (int i = 0; i < 100; ++i)
        a.step(load);
    const SimState before = a.state();
    a.reseed(77);
    EXPECT_EQ(a.state().pstate_index, before.pstate_index);
    EXPECT_EQ(a.state().thermal.die, before.thermal.die);
    EXPECT_EQ(a.state().rng_seed, 77u);
}

TEST(RenderLoop, ClampedWithoutJitterIsConstant) {
    const DevicePreset p = shipped_preset("rx6600");
    const Workload w = build_filter_workload(PixelColor::white(), 6e7);
    const std::vector<double> f = render_loop(p, w, 300, NoiseModel::none(), std::size_t{200});
    for (double x : f)
        EXPECT_DOUBLE_EQ(x, f.front());
    const double expect = 6e7 / p.curve.at(200).frequency;
    EXPECT_NEAR(f.front(), expect, 100e-6);
}

TEST(RenderLoop, QuantisedToTimerResolution) {
    const DevicePreset p = toy_preset();
    const Workload w = build_filter_workload(PixelColor::black(), 1e6);
    const std::vector<double> f =
        render_loop(p, w, 50, NoiseModel{0, 0, 1e-4, 5}, std::nullopt, FrameTimer{1e-4});
    for (double x : f)
        EXPECT_NEAR(std::remainder(x, 1e-4), 0.0, 1e-12);
    EXPECT_THROW(render_loop(p, w, 0, NoiseModel{}), InvalidArgument);
    EXPECT_THROW(render_loop(p, build_add_constant(1), 5, NoiseModel{}), InvalidArgument);
}

TEST(RenderLoop, WhiteSlowerThanBlackAfterWarmUp) {
    const DevicePreset p = shipped_preset("m1-air");
    const NoiseModel n{0.05, 0.1, 50e-6, 8};
    const std::size_t frames = 40000;
    const auto tail_mean = [&](PixelColor c) {
        const std::vector<double> f =
            render_loop(p, build_filter_workload(c, 6e7), frames, n);
        return mean(std::vector<double>(f.end() - 10000, f.end()));
    };
    EXPECT_GT(tail_mean(PixelColor::white()), tail_mean(PixelColor::black()));
}

TEST(RenderLoop, ClampedFrequencyColumnIdentical) {
    const DevicePreset p = shipped_preset("rx6600");
    const NoiseModel n{0.05, 0.1, 50e-6, 8};
    const Trace white = run(p, build_filter_workload(PixelColor::white(), 6e7), 300.0, n, 300);
    const Trace black = run(p, build_filter_workload(PixelColor::black(), 6e7), 300.0, n, 300);
    EXPECT_EQ(white.frequencies(), black.frequencies());
}

TEST(Bursts, EmptyProfileIsIdle) {
    const DevicePreset p = shipped_preset("m1-air-gpu");
    const Trace t = run_burst_profile(p, WebsiteProfile{"empty", {}}, 10.0, NoiseModel::none());
    for (const SensorSample &s : t.samples) {
        ASSERT_EQ(s.pstate_index, 0u);
        ASSERT_GE(s.power, p.power.idle_power);
        ASSERT_LT(s.power, 1.5 * p.power.idle_power);
    }
}

TEST(Bursts, SingleBurstRaisesFrequencyInsideWindow) {
    const DevicePreset p = shipped_preset("m1-mini-gpu");
    const WebsiteProfile prof{"one", {{4.0, 3.0, 1.0}}};
    const Trace t = run_burst_profile(p, prof, 10.0, NoiseModel::none());
    for (const SensorSample &s : t.samples) {
        const bool inside = s.t >= 4.0 + 0.1 && s.t < 7.0;
        const bool outside = s.t < 4.0 || s.t >= 7.0 + 0.5;
        if (inside) {
            EXPECT_GT(s.frequency, p.curve.at(0).frequency) << s.t;
        }
        if (outside) {
            EXPECT_EQ(s.pstate_index, 0u) << s.t;
        }
    }
}

TEST(Bursts, OverlapSaturatesAndRangeChecked) {
    const WebsiteProfile prof{"x", {{0.0, 2.0, 0.7}, {1.0, 2.0, 0.6}}};
    EXPECT_DOUBLE_EQ(prof.intensity_at(0.5), 0.7);
    EXPECT_DOUBLE_EQ(prof.intensity_at(1.5), 1.0);
    EXPECT_DOUBLE_EQ(prof.intensity_at(2.5), 0.6);
    EXPECT_DOUBLE_EQ(prof.intensity_at(3.5), 0.0);
    const DevicePreset p = toy_preset();
    EXPECT_THROW(run_burst_profile(p, prof, 2.5, NoiseModel{}), InvalidArgument);
    EXPECT_THROW(run_burst_profile(p, WebsiteProfile{"bad", {{0.0, 1.0, 1.5}}}, 5.0,
                                   NoiseModel{}),
                 InvalidArgument);
}

} // namespace
} // namespace dvfsleak
