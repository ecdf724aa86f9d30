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

#include "dvfsleak/preset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include <fmt/core.h>

#include "dvfsleak/error.hpp"

#ifndef DVFSLEAK_PRESET_DIR
#define DVFSLEAK_PRESET_DIR "presets"
#endif

namespace dvfsleak {

namespace {

constexpr const char *kPresetExt = ".preset";
constexpr const char *kBaseExt = ".base";

std::vector<double> curve_frequencies(const KvSection &s) {
    if (s.has("frequencies_mhz")) {
        std::vector<double> mhz = s.get_doubles("frequencies_mhz");
        for (double &f : mhz)
            f *= 1e6;
        return mhz;
    }
    const double lo = s.get_double("min_mhz");
    const double hi = s.get_double("max_mhz");
    const double step = s.get_double("step_mhz");
    if (!(step > 0.0) || !(hi >= lo))
        throw ConfigError(s.source(), s.line_of("step_mhz"),
                          "need min_mhz <= max_mhz and step_mhz > 0");
    const auto n = static_cast<std::size_t>(std::llround((hi - lo) / step)) + 1;
    if (std::abs(lo + (n - 1) * step - hi) > 1e-6 * step)
        throw ConfigError(s.source(), s.line_of("max_mhz"),
                          "max_mhz is not reachable from min_mhz in step_mhz steps");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = (lo + static_cast<double>(i) * step) * 1e6;
    return out;
}

PerInstruction<double> per_instruction(const KvSection *s, bool required,
                                       const std::string &source) {
    PerInstruction<double> out{};
    if (s == nullptr) {
        if (required)
            throw ConfigError(source, 0, "missing section [instruction_energy]");
        return out;
    }
    std::vector<std::string> allowed;
    for (InstructionKind k : kAllInstructionKinds) {
        const std::string key(to_string(k));
        allowed.push_back(key);
        if (s->has(key))
            out[to_index(k)] = s->get_double(key);
        else if (required)
            throw ConfigError(source, s->line(),
                              fmt::format("[{}] has no entry for '{}'", s->name(), key));
    }
    s->reject_unknown(allowed);
    return out;
}

} // namespace

DevicePreset preset_from_config(const KvConfig &cfg) {
    DevicePreset p;
    const KvSection &dev = cfg.require("device");
    dev.reject_unknown({"name", "class", "extends", "description"});
    p.name = dev.get_string("name");
    const std::string cls = dev.get_string("class");
    if (cls == "cpu")
        p.device_class = DeviceClass::Cpu;
    else if (cls == "gpu")
        p.device_class = DeviceClass::Gpu;
    else
        throw ConfigError(cfg.source(), dev.line_of("class"),
                          fmt::format("class must be 'cpu' or 'gpu', got '{}'", cls));

    const KvSection &dvfs = cfg.require("dvfs");
    dvfs.reject_unknown({"frequencies_mhz", "min_mhz", "max_mhz", "step_mhz",
                         "v_min", "v_max"});
    const std::vector<double> freqs = curve_frequencies(dvfs);
    try {
        p.curve = DvfsCurve::from_frequencies(freqs, dvfs.get_double("v_min"),
                                              dvfs.get_double("v_max"));
    } catch (const InvalidArgument &e) {
        throw ConfigError(cfg.source(), dvfs.line(), e.what());
    }

    const KvSection &pw = cfg.require("power");
    pw.reject_unknown({"idle_power", "leakage_coeff", "dyn_energy_scale",
                       "hd_b_weight", "hd_c_weight", "hw_weight",
                       "governor_data_visibility"});
    p.power.idle_power = pw.get_double("idle_power");
    p.power.leakage_coeff = pw.get_double("leakage_coeff");
    p.power.dyn_energy_scale = pw.get_double("dyn_energy_scale");
    p.power.hd_b_weight = pw.get_double("hd_b_weight");
    p.power.hd_c_weight = pw.get_double("hd_c_weight");
    p.power.hw_weight = pw.get_double("hw_weight");
    p.power.governor_data_visibility = pw.get_double("governor_data_visibility", 1.0);

    const KvSection &th = cfg.require("thermal");
    th.reject_unknown({"ambient", "r_th", "c_th", "r_die", "c_die", "r_hotspot"});
    p.thermal.ambient = th.get_double("ambient");
    p.thermal.r_th = th.get_double("r_th");
    p.thermal.c_th = th.get_double("c_th");
    p.thermal.r_die = th.get_double("r_die");
    p.thermal.c_die = th.get_double("c_die");
    p.thermal.r_hotspot = th.get_double("r_hotspot", 0.0);

    const KvSection &lim = cfg.require("limits");
    lim.reject_unknown({"t_max", "p_max", "f_max_mhz"});
    p.limits.t_max = lim.get_double("t_max");
    p.limits.p_max = lim.get_double("p_max");
    p.limits.f_max = lim.has("f_max_mhz") ? lim.get_double("f_max_mhz") * 1e6
                                          : p.curve.top().frequency;

    if (const KvSection *gov = cfg.find("governor")) {
        gov->reject_unknown({"interval_ticks", "hysteresis"});
        const std::int64_t interval = gov->get_int("interval_ticks", 5);
        if (interval < 1)
            throw ConfigError(cfg.source(), gov->line_of("interval_ticks"),
                              "interval_ticks must be >= 1");
        p.governor.interval_ticks = static_cast<std::size_t>(interval);
        p.governor.hysteresis = gov->get_double("hysteresis", 2.0);
    }

    p.instruction_energy =
        per_instruction(cfg.find("instruction_energy"), true, cfg.source());
    p.instruction_density =
        per_instruction(cfg.find("instruction_density"), false, cfg.source());

    try {
        p.validate();
    } catch (const InvalidArgument &e) {
        throw ConfigError(cfg.source(), 0, e.what());
    }
    return p;
}

DevicePreset load_preset_file(const std::filesystem::path &path) {
    KvConfig cfg = KvConfig::load(path);
    if (const KvSection *dev = cfg.find("device"); dev && dev->has("extends")) {
        const std::filesystem::path base_path =
            path.parent_path() / (dev->get_string("extends") + kBaseExt);
        if (!std::filesystem::exists(base_path))
            throw ConfigError(cfg.source(), dev->line_of("extends"),
                              fmt::format("base file '{}' not found", base_path.string()));
        cfg = KvConfig::overlay(KvConfig::load(base_path), cfg);
    }
    return preset_from_config(cfg);
}

std::string format_preset(const DevicePreset &p) {
    std::string out;
    out += fmt::format("[device]\nname = {}\nclass = {}\n\n", p.name,
                       to_string(p.device_class));
    out += "[dvfs]\nfrequencies_mhz = ";
    for (std::size_t i = 0; i < p.curve.size(); ++i)
        out += fmt::format("{}{}", i ? ", " : "", p.curve.at(i).frequency / 1e6);
    out += fmt::format("\nv_min = {}\nv_max = {}\n\n", p.curve.at(0).voltage,
                       p.curve.top().voltage);
    const PowerParams &w = p.power;
    out += fmt::format(
        "[power]\nidle_power = {}\nleakage_coeff = {}\ndyn_energy_scale = {}\n"
        "hd_b_weight = {}\nhd_c_weight = {}\nhw_weight = {}\n"
        "governor_data_visibility = {}\n\n",
        w.idle_power, w.leakage_coeff, w.dyn_energy_scale, w.hd_b_weight,
        w.hd_c_weight, w.hw_weight, w.governor_data_visibility);
    const ThermalParams &t = p.thermal;
    out += fmt::format(
        "[thermal]\nambient = {}\nr_th = {}\nc_th = {}\nr_die = {}\nc_die = {}\n"
        "r_hotspot = {}\n\n",
        t.ambient, t.r_th, t.c_th, t.r_die, t.c_die, t.r_hotspot);
    out += fmt::format("[limits]\nt_max = {}\np_max = {}\nf_max_mhz = {}\n\n",
                       p.limits.t_max, p.limits.p_max, p.limits.f_max / 1e6);
    out += fmt::format("[governor]\ninterval_ticks = {}\nhysteresis = {}\n\n",
                       p.governor.interval_ticks, p.governor.hysteresis);
    out += "[instruction_energy]\n";
    for (InstructionKind k : kAllInstructionKinds)
        out += fmt::format("{} = {}\n", to_string(k), p.instruction_energy[to_index(k)]);
    out += "\n[instruction_density]\n";
    for (InstructionKind k : kAllInstructionKinds)
        out += fmt::format("{} = {}\n", to_string(k), p.instruction_density[to_index(k)]);
    return out;
}

PresetCatalog::PresetCatalog(std::filesystem::path dir) : dir_(std::move(dir)) {
    if (!std::filesystem::is_directory(dir_))
        throw ConfigError(dir_.string(), 0, "preset catalog directory not found");
}

PresetCatalog PresetCatalog::from_environment() {
    if (const char *env = std::getenv(kCatalogEnvVar); env && *env)
        return PresetCatalog(env);
    return PresetCatalog(DVFSLEAK_PRESET_DIR);
}

std::vector<std::string> PresetCatalog::names() const {
    std::vector<std::string> out;
    for (const auto &entry : std::filesystem::directory_iterator(dir_))
        if (entry.is_regular_file() && entry.path().extension() == kPresetExt)
            out.push_back(entry.path().stem().string());
    std::sort(out.begin(), out.end());
    return out;
}

bool PresetCatalog::contains(const std::string &name) const {
    return std::filesystem::is_regular_file(dir_ / (name + kPresetExt));
}

DevicePreset PresetCatalog::load(const std::string &name) const {
    if (!contains(name))
        throw ConfigError(dir_.string(), 0, fmt::format("unknown preset '{}'", name));
    DevicePreset p = load_preset_file(dir_ / (name + kPresetExt));
    if (p.name != name)
        throw ConfigError((dir_ / (name + kPresetExt)).string(), 0,
                          fmt::format("file declares name '{}'", p.name));
    return p;
}

} // namespace dvfsleak
