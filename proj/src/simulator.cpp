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

#include "dvfsleak/simulator.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "dvfsleak/error.hpp"

namespace dvfsleak {

namespace {

std::vector<double> column(const Trace &t, double SensorSample::*field) {
    std::vector<double> out;
    out.reserve(t.samples.size());
    for (const SensorSample &s : t.samples)
        out.push_back(s.*field);
    return out;
}

ActivityFactor scaled(const ActivityFactor &a, double k) {
    return {a.base * k, a.hd_a * k, a.hd_b * k, a.hd_c * k, a.hw * k};
}

void check_duration(double duration, double dt) {
    if (!(duration > 0.0) || !std::isfinite(duration))
        throw InvalidArgument("duration must be positive");
    if (!(dt > 0.0))
        throw InvalidArgument("dt must be positive");
}

} // namespace

void NoiseModel::validate() const {
    for (double s : {power_sigma, temp_sigma, timing_jitter_sigma})
        if (!(s >= 0.0) || !std::isfinite(s))
            throw InvalidArgument("noise sigmas must be finite and >= 0");
}

std::vector<double> Trace::frequencies() const { return column(*this, &SensorSample::frequency); }
std::vector<double> Trace::powers() const { return column(*this, &SensorSample::power); }
std::vector<double> Trace::temps() const { return column(*this, &SensorSample::temp); }

Trace Trace::slice(double t0, double t1) const {
    Trace out{{}, dt, preset_name, workload_desc};
    for (const SensorSample &s : samples)
        if (s.t >= t0 && s.t < t1)
            out.samples.push_back(s);
    return out;
}

Load resolve_load(const DevicePreset &preset, const Workload &w,
                  std::uint64_t ticks) {
    Load load;
    load.activity = decompose_components_serial(w, ticks);
    load.activity.base *= preset.instruction_energy[to_index(w.kind)];
    load.density = preset.instruction_density[to_index(w.kind)];
    load.utilization = std::clamp(w.utilization, 0.0, 1.0);
    return load;
}

std::size_t demand_index(const DvfsCurve &curve, double utilization) {
    const double u = std::clamp(utilization, 0.0, 1.0);
    const auto top = static_cast<double>(curve.top_index());
    return static_cast<std::size_t>(std::ceil(u * top - 1e-9));
}

std::size_t governor_step(const SimState &state, double power,
                          const DevicePreset &preset, const GovernorContext &ctx) {
    const std::size_t idx = state.pstate_index;
    const std::size_t top = preset.curve.top_index();
    const double h = preset.governor.hysteresis;
    const double t_max = preset.limits.t_max;
    const double p_max = preset.limits.p_max;
    const std::size_t demand = std::min(ctx.demand, top);
    const std::size_t down = idx == 0 ? 0 : idx - 1;

    if (state.temp >= t_max - h || power >= p_max || idx > demand)
        return down;
    if (idx < demand && state.temp < t_max - 2.0 * h) {
        double projected;
        if (ctx.projected_up_power) {
            projected = *ctx.projected_up_power;
        } else {
            const PState &cur = preset.curve.at(idx);
            const PState &up = preset.curve.at(idx + 1);
            projected = power * (up.voltage * up.voltage * up.frequency) /
                        (cur.voltage * cur.voltage * cur.frequency);
        }
        if (projected < p_max)
            return idx + 1;
    }
    return idx;
}

Simulator::Simulator(DevicePreset preset, NoiseModel noise,
                     std::optional<std::size_t> clamp, double dt)
    : preset_(std::move(preset)), noise_(noise), clamp_(clamp), dt_(dt) {
    preset_.validate();
    noise_.validate();
    if (clamp_ && *clamp_ > preset_.curve.top_index())
        throw InvalidArgument(fmt::format("clamp index {} outside [0, {}]", *clamp_,
                                          preset_.curve.top_index()));
    if (!(dt_ > 0.0))
        throw InvalidArgument("dt must be positive");
    reset();
}

void Simulator::reset(const Load &initial) {
    const double amb = preset_.thermal.ambient;
    state_ = SimState{{amb, amb}, amb, 0, 0.0, noise_.seed};
    if (clamp_) {
        state_.pstate_index = *clamp_;
    } else {
        const double stat = static_power(amb, amb, preset_.power);
        std::size_t idx = demand_index(preset_.curve, initial.utilization);
        while (idx > 0 && stat + estimated_dynamic_power(preset_.curve.at(idx), initial.activity,
                                                         preset_.power) >=
                              preset_.limits.p_max)
            --idx;
        state_.pstate_index = idx;
    }
    tick_ = 0;
    rng_.seed(noise_.seed);
    normal_.reset();
}

void Simulator::reseed(std::uint64_t seed) {
    state_.rng_seed = seed;
    rng_.seed(seed);
    normal_.reset();
}

double Simulator::timing_jitter() {
    return noise_.timing_jitter_sigma * normal_(rng_);
}

SensorSample Simulator::step(const Load &load) {
    const PState &ps = preset_.curve.at(state_.pstate_index);
    const PowerParams &pw = preset_.power;
    const double dyn = dynamic_power(ps, load.activity, pw);
    const double stat = static_power(state_.thermal.die, preset_.thermal.ambient, pw);
    const double hot = hotspot_power(ps, load.activity, load.density, pw);
    const double total = stat + dyn;
    state_.temp = sensor_temperature(state_.thermal.die, hot, preset_.thermal);

    const double power_noise = noise_.power_sigma * normal_(rng_);
    const double temp_noise = noise_.temp_sigma * normal_(rng_);
    const SensorSample sample{state_.elapsed, ps.frequency, total + power_noise,
                              state_.temp + temp_noise, state_.pstate_index};

    if (!clamp_ && tick_ % preset_.governor.interval_ticks == 0) {
        const double est = stat + estimated_dynamic_power(ps, load.activity, pw);
        GovernorContext ctx;
        ctx.demand = demand_index(preset_.curve, load.utilization);
        if (state_.pstate_index < preset_.curve.top_index()) {
            const PState &up = preset_.curve.at(state_.pstate_index + 1);
            ctx.projected_up_power =
                stat + estimated_dynamic_power(up, load.activity, pw) + power_noise;
        }
        SimState observed = state_;
        observed.temp = sample.temp;
        state_.pstate_index = governor_step(observed, est + power_noise, preset_, ctx);
    }

    state_.thermal = thermal_network_step(state_.thermal, total, dt_, preset_.thermal);
    ++tick_;
    state_.elapsed = static_cast<double>(tick_) * dt_;
    return sample;
}

std::size_t sample_count(double duration, double dt) {
    check_duration(duration, dt);
    return static_cast<std::size_t>(std::llround(duration / dt));
}

Trace run_schedule(const DevicePreset &preset,
                   const std::function<Load(double t)> &schedule, double duration,
                   const NoiseModel &noise, std::optional<std::size_t> clamp,
                   std::string description, double dt) {
    const std::size_t n = sample_count(duration, dt);
    Simulator sim(preset, noise, clamp, dt);
    sim.reset(schedule(0.0));
    Trace trace{{}, dt, preset.name, std::move(description)};
    trace.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        trace.samples.push_back(sim.step(schedule(static_cast<double>(i) * dt)));
    return trace;
}

Trace run(const DevicePreset &preset, const Workload &workload, double duration,
          const NoiseModel &noise, std::optional<std::size_t> clamp, double dt) {
    const Load load = resolve_load(preset, workload);
    return run_schedule(
        preset, [&load](double) { return load; }, duration, noise, clamp,
        workload.description, dt);
}

std::vector<double> render_frames(Simulator &sim, const Workload &workload,
                                  std::size_t frames, const FrameTimer &timer) {
    if (frames == 0)
        throw InvalidArgument("render loop needs at least one frame");
    if (!(workload.work_cycles > 0.0))
        throw InvalidArgument("render workload has no work_cycles");
    if (!(timer.resolution > 0.0))
        throw InvalidArgument("timer resolution must be positive");
    const Load load = resolve_load(sim.preset(), workload);

    std::vector<double> out;
    out.reserve(frames);
    double need = workload.work_cycles;
    double frame_time = 0.0;
    double tick_left = 0.0;
    double freq = 0.0;
    while (out.size() < frames) {
        if (tick_left <= 0.0) {
            freq = sim.step(load).frequency;
            tick_left = sim.dt();
        }
        const double available = freq * tick_left;
        if (available >= need) {
            const double used = need / freq;
            frame_time += used;
            tick_left -= used;
            const double measured = frame_time + sim.timing_jitter();
            out.push_back(std::max(0.0, std::round(measured / timer.resolution)) *
                          timer.resolution);
            need = workload.work_cycles;
            frame_time = 0.0;
        } else {
            need -= available;
            frame_time += tick_left;
            tick_left = 0.0;
        }
    }
    return out;
}

std::vector<double> render_loop(const DevicePreset &preset, const Workload &workload,
                                std::size_t frames, const NoiseModel &noise,
                                std::optional<std::size_t> clamp,
                                const FrameTimer &timer) {
    Simulator sim(preset, noise, clamp);
    sim.reset(resolve_load(preset, workload));
    return render_frames(sim, workload, frames, timer);
}

double WebsiteProfile::intensity_at(double t) const {
    double sum = 0.0;
    for (const Burst &b : bursts)
        if (t >= b.onset && t < b.onset + b.duration)
            sum += b.intensity;
    return std::min(sum, 1.0);
}

void WebsiteProfile::validate() const {
    for (const Burst &b : bursts) {
        if (!(b.onset >= 0.0) || !(b.duration >= 0.0))
            throw InvalidArgument(fmt::format(
                "profile '{}': burst onset/duration must be >= 0", label));
        if (!(b.intensity >= 0.0 && b.intensity <= 1.0))
            throw InvalidArgument(fmt::format(
                "profile '{}': burst intensity must lie in [0, 1]", label));
    }
}

Trace run_burst_profile(const DevicePreset &preset, const WebsiteProfile &profile,
                        double duration, const NoiseModel &noise, double dt) {
    profile.validate();
    for (const Burst &b : profile.bursts)
        if (b.onset + b.duration > duration + 1e-9)
            throw InvalidArgument(fmt::format(
                "profile '{}': burst at {} s runs past {} s", profile.label,
                b.onset, duration));
    const Load full = resolve_load(preset, build_render_workload());
    auto schedule = [&](double t) {
        const double k = profile.intensity_at(t);
        if (k <= 0.0)
            return Load::idle();
        return Load{scaled(full.activity, k), full.density, k};
    };
    return run_schedule(preset, schedule, duration, noise, std::nullopt,
                        profile.label, dt);
}

} // namespace dvfsleak
