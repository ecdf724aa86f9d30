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

#ifndef DVFSLEAK_SIMULATOR_HPP
#define DVFSLEAK_SIMULATOR_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "dvfsleak/model.hpp"
#include "dvfsleak/workload.hpp"

namespace dvfsleak {

/// Sensor sampling period.
inline constexpr double kDefaultDt = 0.01;

struct NoiseModel {
    double power_sigma = 0.05;          // W
    double temp_sigma = 0.1;            // degC
    double timing_jitter_sigma = 50e-6; // s
    std::uint64_t seed = 0;

    /// All sigmas zero.
    static NoiseModel none(std::uint64_t seed = 0) { return {0.0, 0.0, 0.0, seed}; }
    /// Throws InvalidArgument on a negative or non-finite sigma.
    void validate() const;
};

struct SimState {
    ThermalState thermal;
    double temp = 25.0; // sensor temperature, degC
    std::size_t pstate_index = 0;
    double elapsed = 0.0; // s
    std::uint64_t rng_seed = 0;
};

struct SensorSample {
    double t = 0.0;
    double frequency = 0.0; // Hz
    double power = 0.0;     // W
    double temp = 0.0;      // degC
    std::size_t pstate_index = 0;

    bool operator==(const SensorSample &) const = default;
};

struct Trace {
    std::vector<SensorSample> samples;
    double dt = kDefaultDt;
    std::string preset_name;
    std::string workload_desc;

    std::size_t size() const noexcept { return samples.size(); }
    bool empty() const noexcept { return samples.empty(); }
    double duration() const noexcept { return static_cast<double>(samples.size()) * dt; }
    std::vector<double> frequencies() const;
    std::vector<double> powers() const;
    std::vector<double> temps() const;
    /// Samples with t in [t0, t1).
    Trace slice(double t0, double t1) const;

    bool operator==(const Trace &) const = default;
};

/// What a preset executes during one tick: per-instruction-scaled activity,
/// the hot-spot density of the instruction, and the busy fraction that sets
/// the governor's frequency demand.
struct Load {
    ActivityFactor activity;
    double density = 0.0;
    double utilization = 0.0;

    static Load idle() { return {}; }
};

/// Activity of `w` on `preset`: base is scaled by the preset's energy for
/// the instruction kind. Components are measured over `ticks` ticks.
Load resolve_load(const DevicePreset &preset, const Workload &w,
                  std::uint64_t ticks = 4096);

/// Lowest P-state index that serves `utilization` (1 maps to the top).
std::size_t demand_index(const DvfsCurve &curve, double utilization);

struct GovernorContext {
    /// Power the estimate would show one P-state higher. When absent it is
    /// extrapolated from `power` by the V^2*f ratio.
    std::optional<double> projected_up_power;
    std::size_t demand = std::numeric_limits<std::size_t>::max();
};

/// One governor decision on the observed temperature (`state.temp`) and
/// estimated power:
///   temp >= t_max - h        -> step down
///   power >= p_max           -> step down
///   index above demand       -> step down
///   index below demand, temp < t_max - 2h and projected power < p_max
///                            -> step up
std::size_t governor_step(const SimState &state, double power,
                          const DevicePreset &preset,
                          const GovernorContext &ctx = {});

/// Tick-level simulation of one device. Owns its state and RNG.
class Simulator {
public:
    /// Throws InvalidArgument on an out-of-range clamp or invalid dt/noise.
    Simulator(DevicePreset preset, NoiseModel noise,
              std::optional<std::size_t> clamp = std::nullopt,
              double dt = kDefaultDt);

    /// Idle device at ambient temperature. The P-state is the highest one
    /// `initial` demands whose estimated power stays below p_max.
    void reset(const Load &initial = Load::idle());

    /// Samples the sensors for the current tick, lets the governor act and
    /// advances temperature by dt.
    SensorSample step(const Load &load);

    /// Gaussian timing jitter from the run's RNG.
    double timing_jitter();
    /// Restarts the noise stream from `seed`; physical state is kept.
    void reseed(std::uint64_t seed);

    const SimState &state() const noexcept { return state_; }
    const DevicePreset &preset() const noexcept { return preset_; }
    const NoiseModel &noise() const noexcept { return noise_; }
    double dt() const noexcept { return dt_; }
    std::uint64_t ticks() const noexcept { return tick_; }
    double frequency() const { return preset_.curve.at(state_.pstate_index).frequency; }
    std::optional<std::size_t> clamp() const noexcept { return clamp_; }

private:
    DevicePreset preset_;
    NoiseModel noise_;
    std::optional<std::size_t> clamp_;
    double dt_;
    SimState state_;
    std::uint64_t tick_ = 0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Number of samples a run of `duration` seconds produces.
std::size_t sample_count(double duration, double dt);

/// Cold-start run of a sustained workload.
Trace run(const DevicePreset &preset, const Workload &workload, double duration,
          const NoiseModel &noise, std::optional<std::size_t> clamp = std::nullopt,
          double dt = kDefaultDt);

/// Cold-start run whose load may change every tick.
Trace run_schedule(const DevicePreset &preset,
                   const std::function<Load(double t)> &schedule,
                   double duration, const NoiseModel &noise,
                   std::optional<std::size_t> clamp = std::nullopt,
                   std::string description = "schedule",
                   double dt = kDefaultDt);

/// Timer used to measure frames.
struct FrameTimer {
    double resolution = 100e-6; // s; 1e-6 for a high-resolution timer
};

/// Runs `frames` frames of `workload.work_cycles` cycles each on `sim`
/// and returns the measured frame times. Each time is the cycles divided
/// by the frequencies in effect while the frame ran, plus jitter, rounded
/// to the timer resolution. Throws InvalidArgument if frames == 0 or the
/// workload has no work_cycles.
std::vector<double> render_frames(Simulator &sim, const Workload &workload,
                                  std::size_t frames, const FrameTimer &timer = {});

/// Cold start followed by render_frames.
std::vector<double> render_loop(const DevicePreset &preset, const Workload &workload,
                                std::size_t frames, const NoiseModel &noise,
                                std::optional<std::size_t> clamp = std::nullopt,
                                const FrameTimer &timer = {});

struct Burst {
    double onset = 0.0;     // s
    double duration = 0.0;  // s
    double intensity = 0.0; // [0, 1]
};

struct WebsiteProfile {
    std::string label;
    std::vector<Burst> bursts;

    /// Summed burst intensity at `t`, saturated at 1.
    double intensity_at(double t) const;
    /// Throws InvalidArgument on a negative onset/duration or intensity
    /// outside [0, 1].
    void validate() const;
};

/// Cold-start trace of a page load: the render workload scaled by the
/// profile's intensity, idle between bursts. Throws InvalidArgument if a
/// burst extends past `duration`.
Trace run_burst_profile(const DevicePreset &preset, const WebsiteProfile &profile,
                        double duration, const NoiseModel &noise,
                        double dt = kDefaultDt);

} // namespace dvfsleak

#endif // DVFSLEAK_SIMULATOR_HPP
