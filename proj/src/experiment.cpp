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

#include "dvfsleak/experiment.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <fmt/core.h>

#include "dvfsleak/error.hpp"

namespace dvfsleak {

namespace {

const std::string kSpecSource = "workload";

std::string param_or(const WorkloadSpec &s, const std::string &key,
                     const std::string &fallback) {
    auto it = s.params.find(key);
    return it == s.params.end() ? fallback : it->second;
}

std::uint64_t param_uint(const WorkloadSpec &s, const std::string &key,
                         std::uint64_t fallback) {
    auto it = s.params.find(key);
    if (it == s.params.end())
        return fallback;
    std::uint64_t v = 0;
    const std::string &t = it->second;
    auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size() || t.empty())
        throw ConfigError(kSpecSource, 0,
                          fmt::format("{}: '{}' must be a non-negative integer", key, t));
    return v;
}

unsigned param_unsigned(const WorkloadSpec &s, const std::string &key) {
    if (!s.params.count(key))
        throw ConfigError(kSpecSource, 0,
                          fmt::format("workload '{}' needs parameter '{}'", s.name, key));
    const std::uint64_t v = param_uint(s, key, 0);
    if (v > 1024)
        throw InvalidArgument(fmt::format("{} = {} is out of range", key, v));
    return static_cast<unsigned>(v);
}

double param_double(const WorkloadSpec &s, const std::string &key, double fallback) {
    auto it = s.params.find(key);
    if (it == s.params.end())
        return fallback;
    char *end = nullptr;
    const double v = std::strtod(it->second.c_str(), &end);
    if (end == it->second.c_str() || *end != '\0')
        throw ConfigError(kSpecSource, 0,
                          fmt::format("{}: '{}' is not a number", key, it->second));
    return v;
}

PixelColor parse_pixel(const std::string &text) {
    if (text == "black")
        return PixelColor::black();
    if (text == "white")
        return PixelColor::white();
    std::uint32_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v, 16);
    if (text.size() != 6 || ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError(kSpecSource, 0,
                          fmt::format("pixel must be black, white or rrggbb, got '{}'", text));
    return {static_cast<std::uint8_t>(v >> 16), static_cast<std::uint8_t>(v >> 8),
            static_cast<std::uint8_t>(v)};
}

void allow_params(const WorkloadSpec &s, std::initializer_list<const char *> keys) {
    for (const auto &[k, v] : s.params) {
        bool ok = false;
        for (const char *a : keys)
            ok = ok || k == a;
        if (!ok)
            throw ConfigError(kSpecSource, 0,
                              fmt::format("workload '{}' has no parameter '{}'", s.name, k));
    }
}

double bits(const Workload &w, double ActivityFactor::*component) {
    return decompose_components_serial(w, 256).*component * w.operands.width();
}

std::vector<double> range(int lo, int hi, int step) {
    std::vector<double> out;
    for (int v = lo; v <= hi; v += step)
        out.push_back(v);
    return out;
}

std::vector<SweepFamily> make_families() {
    const auto sw = [](const std::function<Workload(unsigned)> &f) {
        return [f](double p) { return f(static_cast<unsigned>(std::lround(p))); };
    };
    std::vector<SweepFamily> f;
    f.push_back({"ror-isolate", "shift", range(0, 16, 2), sw(build_ror_isolation),
                 [](const Workload &w) { return bits(w, &ActivityFactor::hd_a); }});
    f.push_back({"shift-b", "shift", range(0, 16, 2), sw(build_lsl_lsr_component_b),
                 [](const Workload &w) { return bits(w, &ActivityFactor::hd_b); }});
    f.push_back({"shift-c", "shift", range(0, 16, 2), sw(build_lsl_lsr_component_c),
                 [](const Workload &w) { return bits(w, &ActivityFactor::hd_c); }});
    f.push_back({"ror-inplace", "shift", range(0, 16, 2), sw(build_ror_inplace),
                 [](const Workload &w) {
                     return bits(w, &ActivityFactor::hd_b) + bits(w, &ActivityFactor::hd_c);
                 }});
    f.push_back({"and-hw", "hw", range(0, 64, 8), sw(build_cpu_and),
                 [](const Workload &w) { return bits(w, &ActivityFactor::hw); }});
    f.push_back({"gpu-shift", "shift", range(0, 16, 2), sw(build_shift_kernel),
                 [](const Workload &w) { return combined_pair_hd(w); }});
    f.push_back({"gpu-and", "hw", range(0, 32, 4), sw(build_and_kernel),
                 [](const Workload &w) { return bits(w, &ActivityFactor::hw); }});
    return f;
}

std::string resolve_path(const std::string &p, const std::filesystem::path &base) {
    if (p.empty() || base.empty() || std::filesystem::path(p).is_absolute())
        return p;
    return (base / p).lexically_normal().string();
}

} // namespace

std::string WorkloadSpec::to_string() const {
    std::string out = name;
    char sep = ':';
    for (const auto &[k, v] : params) {
        out += fmt::format("{}{}={}", sep, k, v);
        sep = ',';
    }
    return out;
}

WorkloadSpec parse_workload_spec(const std::string &text) {
    WorkloadSpec s;
    const auto colon = text.find(':');
    s.name = text.substr(0, colon);
    if (s.name.empty())
        throw ConfigError(kSpecSource, 0, "empty workload name");
    if (colon == std::string::npos)
        return s;
    std::stringstream ss(text.substr(colon + 1));
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError(kSpecSource, 0,
                              fmt::format("expected key=value in workload, got '{}'", item));
        if (!s.params.emplace(item.substr(0, eq), item.substr(eq + 1)).second)
            throw ConfigError(kSpecSource, 0,
                              fmt::format("duplicate workload parameter '{}'", item.substr(0, eq)));
    }
    return s;
}

Workload build_workload(const WorkloadSpec &s) {
    if (auto kind = parse_instruction_kind(s.name)) {
        allow_params(s, {"seed", "lanes"});
        Workload w = build_instruction_loop(*kind, param_uint(s, "seed", 0));
        if (s.params.count("lanes")) {
            const unsigned lanes = param_unsigned(s, "lanes");
            if (lanes < 1 || lanes > kIssueWidth)
                throw InvalidArgument(
                    fmt::format("lanes must lie in [1, {}], got {}", kIssueWidth, lanes));
            w.parallelism = lanes;
        }
        return w;
    }
    if (s.name == "add-const") {
        allow_params(s, {"addend"});
        return build_add_constant(param_uint(s, "addend", 1));
    }
    if (s.name == "idle") {
        allow_params(s, {});
        Workload w = build_instruction_loop(InstructionKind::Add);
        w.parallelism = 1;
        w.utilization = 0.0;
        w.description = "idle";
        return w;
    }
    if (s.name == "filter") {
        allow_params(s, {"pixel", "intensity"});
        return build_filter_workload(parse_pixel(param_or(s, "pixel", "white")),
                                     param_double(s, "intensity", 6.0e7));
    }
    if (s.name == "render") {
        allow_params(s, {});
        return build_render_workload();
    }
    for (const SweepFamily &f : make_families()) {
        if (f.name == s.name) {
            allow_params(s, {f.param.c_str()});
            return f.build(param_unsigned(s, f.param));
        }
    }
    throw ConfigError(kSpecSource, 0, fmt::format("unknown workload '{}'", s.name));
}

std::vector<std::pair<std::string, std::string>> workload_registry() {
    std::vector<std::pair<std::string, std::string>> out;
    for (InstructionKind k : kAllInstructionKinds)
        out.emplace_back(std::string(to_string(k)), "instruction loop on mid-weight operands [seed, lanes]");
    out.emplace_back("add-const", "val += addend [addend]");
    out.emplace_back("ror-isolate", "ror on a constant input [shift]");
    out.emplace_back("shift-b", "lsl/lsr, component B varies [shift]");
    out.emplace_back("shift-c", "lsl/lsr, component C varies [shift]");
    out.emplace_back("ror-inplace", "in-place ror, components B and C [shift]");
    out.emplace_back("and-hw", "64-bit and on a value of given weight [hw]");
    out.emplace_back("gpu-shift", "32-bit shift kernel [shift]");
    out.emplace_back("gpu-and", "32-bit and kernel [hw]");
    out.emplace_back("filter", "filter stack over one pixel [pixel, intensity]");
    out.emplace_back("render", "browser rendering load");
    out.emplace_back("idle", "no load");
    return out;
}

const SweepFamily &sweep_family(const std::string &name) {
    static const std::vector<SweepFamily> families = make_families();
    for (const SweepFamily &f : families)
        if (f.name == name)
            return f;
    throw ConfigError(kSpecSource, 0, fmt::format("unknown sweep family '{}'", name));
}

std::vector<std::string> sweep_family_names() {
    std::vector<std::string> out;
    for (const SweepFamily &f : make_families())
        out.push_back(f.name);
    return out;
}

std::vector<SweepPoint> sweep_points(const SweepFamily &family,
                                     const std::vector<double> &params) {
    std::vector<SweepPoint> out;
    for (double p : params) {
        Workload w = family.build(p);
        const double x = family.x(w);
        out.push_back({x, std::move(w)});
    }
    return out;
}

NoiseModel parse_noise(const std::string &text, std::uint64_t seed) {
    NoiseModel n;
    if (text == "none")
        n = NoiseModel::none();
    else if (text != "default" && !text.empty()) {
        std::stringstream ss(text);
        std::string part;
        std::vector<double> v;
        while (std::getline(ss, part, ',')) {
            char *end = nullptr;
            v.push_back(std::strtod(part.c_str(), &end));
            if (end == part.c_str() || *end != '\0')
                throw ConfigError("--noise", 0, fmt::format("'{}' is not a number", part));
        }
        if (v.size() != 3)
            throw ConfigError("--noise", 0,
                              "expected 'default', 'none' or 'power,temp,jitter'");
        n = NoiseModel{v[0], v[1], v[2], 0};
    }
    n.seed = seed;
    try {
        n.validate();
    } catch (const InvalidArgument &e) {
        throw ConfigError("--noise", 0, e.what());
    }
    return n;
}

ExperimentConfig experiment_from_config(const KvConfig &cfg,
                                        const std::filesystem::path &base_dir) {
    ExperimentConfig e;
    for (const KvSection &s : cfg.sections()) {
        const std::string &n = s.name();
        if (n != "experiment" && n != "noise" && n != "sweep" && n != "attack" &&
            n != "output")
            throw ConfigError(cfg.source(), s.line(), fmt::format("unknown section [{}]", n));
    }
    if (const KvSection *s = cfg.find("experiment")) {
        s->reject_unknown({"preset", "workload", "duration", "seed", "clamp"});
        e.preset = s->get_string("preset", "");
        e.workload = s->get_string("workload", "");
        e.duration = s->get_double("duration", e.duration);
        if (s->has("seed")) {
            const std::int64_t seed = s->get_int("seed");
            if (seed < 0)
                throw ConfigError(cfg.source(), s->line_of("seed"), "seed must be >= 0");
            e.seed = static_cast<std::uint64_t>(seed);
        }
        if (s->has("clamp")) {
            const std::int64_t c = s->get_int("clamp");
            if (c < 0)
                throw ConfigError(cfg.source(), s->line_of("clamp"), "clamp must be >= 0");
            e.clamp = static_cast<std::size_t>(c);
        }
    }
    if (const KvSection *s = cfg.find("noise")) {
        s->reject_unknown({"power_sigma", "temp_sigma", "timing_jitter_sigma"});
        e.noise.power_sigma = s->get_double("power_sigma", e.noise.power_sigma);
        e.noise.temp_sigma = s->get_double("temp_sigma", e.noise.temp_sigma);
        e.noise.timing_jitter_sigma =
            s->get_double("timing_jitter_sigma", e.noise.timing_jitter_sigma);
        try {
            e.noise.validate();
        } catch (const InvalidArgument &err) {
            throw ConfigError(cfg.source(), s->line(), err.what());
        }
    }
    if (const KvSection *s = cfg.find("sweep")) {
        s->reject_unknown({"family", "params", "tail"});
        e.sweep_family = s->get_string("family", "");
        if (s->has("params"))
            e.sweep_params = s->get_doubles("params");
        e.sweep_tail = s->get_double("tail", e.sweep_tail);
    }
    if (const KvSection *s = cfg.find("attack")) {
        s->reject_unknown({"image", "links", "catalog", "train_preset", "test_preset",
                           "frames_per_batch", "settle_frames", "intensity",
                           "timer_resolution", "warmup", "min_margin", "use_median",
                           "chunks", "traces_per_profile", "resample_length",
                           "load_duration"});
        e.image = resolve_path(s->get_string("image", ""), base_dir);
        e.links = resolve_path(s->get_string("links", ""), base_dir);
        e.catalog = resolve_path(s->get_string("catalog", ""), base_dir);
        e.train_preset = s->get_string("train_preset", e.train_preset);
        e.test_preset = s->get_string("test_preset", e.test_preset);
        const auto count = [&](const char *key, std::size_t fallback) {
            const std::int64_t v = s->get_int(key, static_cast<std::int64_t>(fallback));
            if (v < 1)
                throw ConfigError(cfg.source(), s->line_of(key),
                                  fmt::format("{} must be >= 1", key));
            return static_cast<std::size_t>(v);
        };
        e.pixel.frames_per_batch = count("frames_per_batch", e.pixel.frames_per_batch);
        e.pixel.settle_frames = static_cast<std::size_t>(
            std::max<std::int64_t>(0, s->get_int("settle_frames",
                                                 static_cast<std::int64_t>(e.pixel.settle_frames))));
        e.pixel.intensity = s->get_double("intensity", e.pixel.intensity);
        e.pixel.timer.resolution = s->get_double("timer_resolution", e.pixel.timer.resolution);
        e.pixel.warmup = s->get_double("warmup", e.pixel.warmup);
        e.pixel.min_margin = s->get_double("min_margin", e.pixel.min_margin);
        e.pixel.use_median = s->get_bool("use_median", e.pixel.use_median);
        e.pixel.chunks = count("chunks", e.pixel.chunks);
        e.fingerprint.traces_per_profile =
            count("traces_per_profile", e.fingerprint.traces_per_profile);
        e.fingerprint.resample_length = count("resample_length", e.fingerprint.resample_length);
        e.fingerprint.duration = s->get_double("load_duration", e.fingerprint.duration);
    }
    if (const KvSection *s = cfg.find("output")) {
        s->reject_unknown({"out"});
        e.out = s->get_string("out", "");
    }
    return e;
}

ExperimentConfig load_experiment_config(const std::filesystem::path &path) {
    return experiment_from_config(KvConfig::load(path), path.parent_path());
}

} // namespace dvfsleak
