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

#ifndef DVFSLEAK_ANALYSIS_HPP
#define DVFSLEAK_ANALYSIS_HPP

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dvfsleak/model.hpp"
#include "dvfsleak/simulator.hpp"
#include "dvfsleak/workload.hpp"

namespace dvfsleak {

/// Pearson correlation. Throws InvalidArgument unless both inputs have the
/// same length >= 2, and UndefinedCorrelationError when either has zero
/// variance.
double pearson(std::span<const double> xs, std::span<const double> ys);

/// As pearson() but returns nullopt instead of throwing on zero variance.
std::optional<double> try_pearson(std::span<const double> xs,
                                  std::span<const double> ys);

struct SteadyStateOptions {
    double window = 60.0; // s
    double tol = 0.02;    // relative span
    /// Spans are taken over block means of this length, so that P-state
    /// dithering and sensor noise inside a block do not count as drift.
    double block = 10.0; // s
};

struct SteadyStateWindow {
    double start = 0.0;
    double end = 0.0;
    double mean_freq = 0.0;
    double mean_power = 0.0;
    double mean_temp = 0.0;
};

/// Earliest window (starting on a block boundary) in which frequency,
/// power and temperature each satisfy (max - min) / mean <= tol over their
/// block means. Throws InvalidArgument if the trace is shorter than the
/// window and NotConvergedError if no window qualifies.
SteadyStateWindow detect_steady_state(const Trace &trace,
                                      const SteadyStateOptions &opts = {});

/// Means of every sample with t in [t0, t1).
SteadyStateWindow window_means(const Trace &trace, double t0, double t1);

/// Time of the first sample below the highest P-state index the trace
/// reached (after reaching it), or nullopt if it never drops.
std::optional<double> time_to_throttle(const Trace &trace);

struct ClassifyOptions {
    SteadyStateOptions steady;
    double tol = 0.05; // relative distance to t_max / p_max
    /// Fraction of steady samples at the top P-state that counts as held.
    double pinned_fraction = 0.99;
};

/// Classifies the limit that binds in the trace's steady state, examined
/// from the detected window to the end of the trace. A trace held at the
/// top P-state (at least `pinned_fraction` of its samples) is
/// FrequencyConstrained: neither limit is forcing the
/// governor down. Otherwise the mean temperature within `tol` of t_max
/// means ThermallyConstrained, then the mean power within `tol` of p_max
/// means PowerConstrained; anything else is Unconstrained. Throws
/// NotConvergedError when the trace never settles.
ConstraintClass classify_constraint(const Trace &trace, const DevicePreset &preset,
                                    const ClassifyOptions &opts = {});

struct SweepPoint {
    double x = 0.0; // value correlated against
    Workload workload;
};

struct SweepOptions {
    double duration = 1000.0; // s per point
    /// Means are taken over the last `tail` seconds (never before the
    /// detected steady-state window).
    double tail = 200.0;
    SteadyStateOptions steady;
    /// Every point uses this noise model, seed included.
    NoiseModel noise;
};

struct SweepResult {
    std::vector<double> params;
    std::vector<double> mean_freq;
    std::vector<double> mean_power;
    std::vector<double> mean_temp;
    /// nullopt when a column has zero variance.
    std::optional<double> corr_freq;
    std::optional<double> corr_power;
    std::optional<double> corr_temp;

    /// max - min of mean_freq.
    double freq_range() const;
};

/// |r| below this (or an undefined r) reads as "no correlation".
inline constexpr double kNoCorrelationThreshold = 0.3;

/// Runs every point (OpenMP-parallel, results in input order) and
/// correlates the steady-state means against `x`. Throws InvalidArgument
/// for fewer than three points; propagates NotConvergedError.
SweepResult sweep(const DevicePreset &preset, std::span<const SweepPoint> points,
                  const SweepOptions &opts = {});

/// Single-threaded reference for sweep().
SweepResult sweep_serial(const DevicePreset &preset,
                         std::span<const SweepPoint> points,
                         const SweepOptions &opts = {});

/// Builds points as {p, builder(p)} and sweeps them.
SweepResult sweep(const DevicePreset &preset,
                  const std::function<Workload(double)> &builder,
                  std::span<const double> params, const SweepOptions &opts = {});

/// "negative", "positive" or "no correlation".
std::string correlation_verdict(std::optional<double> r);

/// CSV rows `param,mean_freq,mean_power,mean_temp` followed by a summary
/// block of `# corr_*` comment lines.
std::string format_sweep_csv(const SweepResult &r);

struct ChannelSeparation {
    std::string channel;
    double mean_a = 0.0;
    double mean_b = 0.0;
    double difference = 0.0; // mean_b - mean_a
    double separation = 0.0; // |difference| / pooled sd
    bool flagged = false;
};

struct SeparationReport {
    std::array<ChannelSeparation, 3> channels; // frequency, power, temperature
    const ChannelSeparation &channel(const std::string &name) const;
};

/// Separation score above which a channel is flagged.
inline constexpr double kSeparationThreshold = 2.0;

/// Compares the steady-state parts (detected window to end) of two traces
/// channel by channel. Throws NotConvergedError if either never settles.
SeparationReport distinguish(const Trace &a, const Trace &b,
                             const SteadyStateOptions &opts = {});

/// Mean difference over pooled standard deviation; 0 for identical
/// constant samples and +inf for distinct constant samples.
double separation_score(std::span<const double> a, std::span<const double> b);

} // namespace dvfsleak

#endif // DVFSLEAK_ANALYSIS_HPP
