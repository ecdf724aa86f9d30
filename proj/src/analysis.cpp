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

#include "dvfsleak/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "dvfsleak/error.hpp"

namespace dvfsleak {

namespace {

struct Moments {
    double n = 0, mean_x = 0, mean_y = 0, m2x = 0, m2y = 0, cxy = 0;
};

Moments co_moments(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw InvalidArgument(fmt::format("pearson: length mismatch ({} vs {})",
                                          xs.size(), ys.size()));
    if (xs.size() < 2)
        throw InvalidArgument("pearson: need at least two points");
    Moments m;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        m.n += 1.0;
        const double dx = xs[i] - m.mean_x;
        const double dy = ys[i] - m.mean_y;
        m.mean_x += dx / m.n;
        m.mean_y += dy / m.n;
        m.m2x += dx * (xs[i] - m.mean_x);
        m.m2y += dy * (ys[i] - m.mean_y);
        m.cxy += dx * (ys[i] - m.mean_y);
    }
    return m;
}

double mean_of(std::span<const double> v) {
    double s = 0.0;
    for (double x : v)
        s += x;
    return s / static_cast<double>(v.size());
}

double variance_of(std::span<const double> v, double mean) {
    double s = 0.0;
    for (double x : v)
        s += (x - mean) * (x - mean);
    return v.size() > 1 ? s / static_cast<double>(v.size() - 1) : 0.0;
}

bool span_ok(std::span<const double> blocks, double tol) {
    const auto [lo, hi] = std::minmax_element(blocks.begin(), blocks.end());
    const double mean = mean_of(blocks);
    const double span = *hi - *lo;
    if (mean == 0.0)
        return span == 0.0;
    return span / std::abs(mean) <= tol;
}

std::size_t to_samples(double seconds, double dt) {
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(seconds / dt)));
}

std::size_t first_index_at(const Trace &trace, double t) {
    auto it = std::lower_bound(trace.samples.begin(), trace.samples.end(), t,
                               [](const SensorSample &s, double v) { return s.t < v - 1e-9; });
    return static_cast<std::size_t>(it - trace.samples.begin());
}

SweepResult correlate(std::span<const SweepPoint> points,
                      std::vector<SteadyStateWindow> means) {
    SweepResult r;
    for (std::size_t i = 0; i < points.size(); ++i) {
        r.params.push_back(points[i].x);
        r.mean_freq.push_back(means[i].mean_freq);
        r.mean_power.push_back(means[i].mean_power);
        r.mean_temp.push_back(means[i].mean_temp);
    }
    r.corr_freq = try_pearson(r.params, r.mean_freq);
    r.corr_power = try_pearson(r.params, r.mean_power);
    r.corr_temp = try_pearson(r.params, r.mean_temp);
    return r;
}

SteadyStateWindow sweep_point(const DevicePreset &preset, const SweepPoint &p,
                              const SweepOptions &opts) {
    const Trace trace = run(preset, p.workload, opts.duration, opts.noise);
    const SteadyStateWindow ss = detect_steady_state(trace, opts.steady);
    const double t0 = std::max(ss.start, trace.duration() - opts.tail);
    return window_means(trace, t0, std::numeric_limits<double>::infinity());
}

void check_points(std::span<const SweepPoint> points) {
    if (points.size() < 3)
        throw InvalidArgument("sweep needs at least three points");
}

} // namespace

double pearson(std::span<const double> xs, std::span<const double> ys) {
    const Moments m = co_moments(xs, ys);
    if (m.m2x <= 0.0 || m.m2y <= 0.0)
        throw UndefinedCorrelationError("pearson: input has zero variance");
    return std::clamp(m.cxy / std::sqrt(m.m2x * m.m2y), -1.0, 1.0);
}

std::optional<double> try_pearson(std::span<const double> xs,
                                  std::span<const double> ys) {
    try {
        return pearson(xs, ys);
    } catch (const UndefinedCorrelationError &) {
        return std::nullopt;
    }
}

SteadyStateWindow window_means(const Trace &trace, double t0, double t1) {
    SteadyStateWindow w{t0, t1, 0.0, 0.0, 0.0};
    std::size_t n = 0;
    for (const SensorSample &s : trace.samples) {
        if (s.t < t0 - 1e-9 || s.t >= t1)
            continue;
        w.mean_freq += s.frequency;
        w.mean_power += s.power;
        w.mean_temp += s.temp;
        ++n;
    }
    if (n == 0)
        throw InvalidArgument(fmt::format("no samples in [{}, {})", t0, t1));
    w.mean_freq /= static_cast<double>(n);
    w.mean_power /= static_cast<double>(n);
    w.mean_temp /= static_cast<double>(n);
    if (!std::isfinite(t1))
        w.end = trace.samples.back().t + trace.dt;
    return w;
}

SteadyStateWindow detect_steady_state(const Trace &trace, const SteadyStateOptions &opts) {
    if (!(opts.window > 0.0) || !(opts.tol >= 0.0) || !(opts.block > 0.0))
        throw InvalidArgument("steady-state window, block and tol must be positive");
    const std::size_t win = to_samples(opts.window, trace.dt);
    if (trace.size() < win)
        throw InvalidArgument(fmt::format("trace of {} s is shorter than the {} s window",
                                          trace.duration(), opts.window));
    const std::size_t bs = std::min(to_samples(opts.block, trace.dt), win);
    const std::size_t per_window = win / bs;
    const std::size_t nblocks = trace.size() / bs;

    std::vector<double> bf(nblocks), bp(nblocks), bt(nblocks);
    for (std::size_t b = 0; b < nblocks; ++b) {
        double f = 0, p = 0, t = 0;
        for (std::size_t i = b * bs; i < (b + 1) * bs; ++i) {
            f += trace.samples[i].frequency;
            p += trace.samples[i].power;
            t += trace.samples[i].temp;
        }
        bf[b] = f / static_cast<double>(bs);
        bp[b] = p / static_cast<double>(bs);
        bt[b] = t / static_cast<double>(bs);
    }
    for (std::size_t b0 = 0; b0 + per_window <= nblocks; ++b0) {
        const auto sub = [&](const std::vector<double> &v) {
            return std::span<const double>(v).subspan(b0, per_window);
        };
        if (span_ok(sub(bf), opts.tol) && span_ok(sub(bp), opts.tol) &&
            span_ok(sub(bt), opts.tol)) {
            const double t0 = trace.samples[b0 * bs].t;
            const double t1 = t0 + static_cast<double>(per_window * bs) * trace.dt;
            SteadyStateWindow w = window_means(trace, t0, t1 - 0.5 * trace.dt);
            w.end = t1;
            return w;
        }
    }
    throw NotConvergedError(fmt::format(
        "no {} s window within {} relative span in trace '{}'", opts.window, opts.tol,
        trace.workload_desc));
}

std::optional<double> time_to_throttle(const Trace &trace) {
    std::size_t max_idx = 0;
    for (const SensorSample &s : trace.samples)
        max_idx = std::max(max_idx, s.pstate_index);
    bool reached = false;
    for (const SensorSample &s : trace.samples) {
        if (s.pstate_index == max_idx)
            reached = true;
        else if (reached)
            return s.t;
    }
    return std::nullopt;
}

ConstraintClass classify_constraint(const Trace &trace, const DevicePreset &preset,
                                    const ClassifyOptions &opts) {
    const SteadyStateWindow ss = detect_steady_state(trace, opts.steady);
    const SteadyStateWindow m =
        window_means(trace, ss.start, std::numeric_limits<double>::infinity());
    const std::size_t top = preset.curve.top_index();
    const std::size_t first = first_index_at(trace, ss.start);
    std::size_t at_top = 0;
    for (std::size_t i = first; i < trace.size(); ++i)
        at_top += trace.samples[i].pstate_index == top;
    const auto steady = static_cast<double>(trace.size() - first);
    if (static_cast<double>(at_top) >= opts.pinned_fraction * steady)
        return ConstraintClass::FrequencyConstrained;
    const double t_max = preset.limits.t_max;
    const double p_max = preset.limits.p_max;
    if (std::abs(m.mean_temp - t_max) <= opts.tol * t_max)
        return ConstraintClass::ThermallyConstrained;
    if (std::abs(m.mean_power - p_max) <= opts.tol * p_max)
        return ConstraintClass::PowerConstrained;
    return ConstraintClass::Unconstrained;
}

double SweepResult::freq_range() const {
    const auto [lo, hi] = std::minmax_element(mean_freq.begin(), mean_freq.end());
    return mean_freq.empty() ? 0.0 : *hi - *lo;
}

SweepResult sweep_serial(const DevicePreset &preset, std::span<const SweepPoint> points,
                         const SweepOptions &opts) {
    check_points(points);
    std::vector<SteadyStateWindow> means;
    for (const SweepPoint &p : points)
        means.push_back(sweep_point(preset, p, opts));
    return correlate(points, std::move(means));
}

SweepResult sweep(const DevicePreset &preset, std::span<const SweepPoint> points,
                  const SweepOptions &opts) {
    check_points(points);
    const auto n = static_cast<std::int64_t>(points.size());
    std::vector<SteadyStateWindow> means(points.size());
    std::vector<std::exception_ptr> errors(points.size());
#pragma omp parallel for schedule(dynamic)
    for (std::int64_t i = 0; i < n; ++i) {
        try {
            means[i] = sweep_point(preset, points[i], opts);
        } catch (...) {
            errors[i] = std::current_exception();
        }
    }
    for (const auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return correlate(points, std::move(means));
}

SweepResult sweep(const DevicePreset &preset,
                  const std::function<Workload(double)> &builder,
                  std::span<const double> params, const SweepOptions &opts) {
    std::vector<SweepPoint> points;
    for (double p : params)
        points.push_back({p, builder(p)});
    return sweep(preset, points, opts);
}

std::string correlation_verdict(std::optional<double> r) {
    if (!r || std::abs(*r) < kNoCorrelationThreshold)
        return "no correlation";
    return *r < 0 ? "negative" : "positive";
}

std::string format_sweep_csv(const SweepResult &r) {
    std::string out = "param,mean_freq,mean_power,mean_temp\n";
    for (std::size_t i = 0; i < r.params.size(); ++i)
        out += fmt::format("{},{},{},{}\n", r.params[i], r.mean_freq[i],
                           r.mean_power[i], r.mean_temp[i]);
    const auto line = [](const char *name, std::optional<double> c) {
        return fmt::format("# {} = {} ({})\n", name,
                           c ? fmt::format("{:.6f}", *c) : std::string("undefined"),
                           correlation_verdict(c));
    };
    out += line("corr_freq", r.corr_freq);
    out += line("corr_power", r.corr_power);
    out += line("corr_temp", r.corr_temp);
    return out;
}

double separation_score(std::span<const double> a, std::span<const double> b) {
    if (a.size() < 2 || b.size() < 2)
        throw InvalidArgument("separation_score needs two or more samples per side");
    const double ma = mean_of(a), mb = mean_of(b);
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    const double pooled = ((na - 1) * variance_of(a, ma) + (nb - 1) * variance_of(b, mb)) /
                          (na + nb - 2);
    const double diff = std::abs(mb - ma);
    if (pooled <= 0.0)
        return diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return diff / std::sqrt(pooled);
}

const ChannelSeparation &SeparationReport::channel(const std::string &name) const {
    for (const auto &c : channels)
        if (c.channel == name)
            return c;
    throw InvalidArgument(fmt::format("no channel '{}'", name));
}

SeparationReport distinguish(const Trace &a, const Trace &b,
                             const SteadyStateOptions &opts) {
    const auto settled = [&](const Trace &t) {
        return t.slice(detect_steady_state(t, opts).start - 1e-9,
                       std::numeric_limits<double>::infinity());
    };
    const Trace sa = settled(a), sb = settled(b);
    SeparationReport r;
    const std::array<std::pair<const char *, std::vector<double>(Trace::*)() const>, 3>
        cols = {{{"frequency", &Trace::frequencies},
                 {"power", &Trace::powers},
                 {"temperature", &Trace::temps}}};
    for (std::size_t i = 0; i < cols.size(); ++i) {
        const std::vector<double> xa = (sa.*cols[i].second)();
        const std::vector<double> xb = (sb.*cols[i].second)();
        ChannelSeparation &c = r.channels[i];
        c.channel = cols[i].first;
        c.mean_a = mean_of(xa);
        c.mean_b = mean_of(xb);
        c.difference = c.mean_b - c.mean_a;
        c.separation = separation_score(xa, xb);
        c.flagged = c.separation > kSeparationThreshold;
    }
    return r;
}

} // namespace dvfsleak
