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

#include "dvfsleak/trace_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <sstream>
#include <vector>

#include <fmt/core.h>

#include "dvfsleak/error.hpp"

namespace dvfsleak {

namespace {

std::vector<std::string_view> split_commas(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        out.push_back(line.substr(start, pos - start));
        if (pos == std::string_view::npos)
            break;
        start = pos + 1;
    }
    return out;
}

template <typename T>
T parse_field(std::string_view field, const std::string &source, std::size_t line,
              const char *what) {
    T v{};
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty())
        throw ConfigError(source, line, fmt::format("bad {} field '{}'", what, field));
    return v;
}

} // namespace

void write_trace_csv(std::ostream &out, const Trace &trace) {
    out << format_trace_csv(trace);
}

std::string format_trace_csv(const Trace &trace) {
    std::string s = kTraceHeader;
    s += '\n';
    auto it = std::back_inserter(s);
    for (const SensorSample &x : trace.samples)
        fmt::format_to(it, "{},{},{},{},{}\n", x.t, x.frequency, x.power, x.temp,
                       x.pstate_index);
    return s;
}

Trace read_trace_csv(std::istream &in, const std::string &source) {
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError(source, 1, "empty trace file");
    if (!line.empty() && line.back() == '\r')
        line.pop_back();
    if (line != kTraceHeader)
        throw ConfigError(source, 1,
                          fmt::format("expected header '{}', got '{}'", kTraceHeader, line));
    Trace trace;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        const auto fields = split_commas(line);
        if (fields.size() != 5)
            throw ConfigError(source, lineno,
                              fmt::format("expected 5 fields, got {}", fields.size()));
        SensorSample s;
        s.t = parse_field<double>(fields[0], source, lineno, "t_s");
        s.frequency = parse_field<double>(fields[1], source, lineno, "frequency_hz");
        s.power = parse_field<double>(fields[2], source, lineno, "power_w");
        s.temp = parse_field<double>(fields[3], source, lineno, "temp_c");
        s.pstate_index = parse_field<std::size_t>(fields[4], source, lineno, "pstate");
        trace.samples.push_back(s);
    }
    if (trace.samples.size() >= 2) {
        trace.dt = trace.samples[1].t - trace.samples[0].t;
        if (!(trace.dt > 0.0))
            throw ConfigError(source, 3, "timestamps must be strictly increasing");
        for (std::size_t i = 1; i < trace.samples.size(); ++i) {
            const double gap = trace.samples[i].t - trace.samples[i - 1].t;
            if (std::abs(gap - trace.dt) > 1e-6 * trace.dt + 1e-12)
                throw ConfigError(source, i + 2,
                                  fmt::format("sample spacing {} differs from dt {}",
                                              gap, trace.dt));
        }
    }
    return trace;
}

Trace load_trace_csv(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError(path.string(), 0, "cannot open trace file");
    return read_trace_csv(in, path.string());
}

Trace resample_hold_last(const Trace &trace, double dt) {
    if (trace.empty())
        throw InvalidArgument("cannot resample an empty trace");
    if (!(dt >= trace.dt * (1.0 - 1e-9)))
        throw InvalidArgument(fmt::format("target dt {} is finer than trace dt {}", dt,
                                          trace.dt));
    Trace out{{}, dt, trace.preset_name, trace.workload_desc};
    const double t_first = trace.samples.front().t;
    const double t_last = trace.samples.back().t;
    std::size_t j = 0;
    for (std::size_t k = 0;; ++k) {
        const double t = t_first + static_cast<double>(k) * dt;
        if (t > t_last + 1e-9 * dt)
            break;
        while (j + 1 < trace.size() && trace.samples[j + 1].t <= t + 1e-9 * dt)
            ++j;
        SensorSample s = trace.samples[j];
        s.t = t;
        out.samples.push_back(s);
    }
    return out;
}

std::string format_long_csv(const std::vector<std::pair<std::string, Trace>> &traces) {
    if (traces.empty())
        throw InvalidArgument("plot data needs at least one trace");
    double dt = 0.0;
    for (const auto &[id, t] : traces) {
        if (t.empty())
            throw InvalidArgument(fmt::format("trace '{}' is empty", id));
        dt = std::max(dt, t.dt);
    }
    std::string out = "trace_id,t,channel,value\n";
    auto it = std::back_inserter(out);
    for (const auto &[id, t] : traces) {
        const Trace r = resample_hold_last(t, dt);
        for (const SensorSample &s : r.samples) {
            fmt::format_to(it, "{},{},frequency_hz,{}\n", id, s.t, s.frequency);
            fmt::format_to(it, "{},{},power_w,{}\n", id, s.t, s.power);
            fmt::format_to(it, "{},{},temp_c,{}\n", id, s.t, s.temp);
        }
    }
    return out;
}

void write_file_atomic(const std::filesystem::path &path, const std::string &content) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw Error(fmt::format("cannot write '{}'", tmp.string()));
        out << content;
        if (!out.flush())
            throw Error(fmt::format("write to '{}' failed", tmp.string()));
    }
    std::filesystem::rename(tmp, path);
}

} // namespace dvfsleak
