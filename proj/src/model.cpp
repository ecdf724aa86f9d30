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

#include "dvfsleak/model.hpp"

#include <cmath>
#include <string>

#include <fmt/core.h>

#include "dvfsleak/error.hpp"

namespace dvfsleak {

namespace {

constexpr std::array<std::string_view, kInstructionKindCount> kMnemonics = {
    "str", "aes", "ror", "lsl", "lsr", "and",
    "add", "fadd", "mul", "fmul", "div", "fdiv",
};

void require(bool ok, const std::string &what) {
    if (!ok)
        throw InvalidArgument(what);
}

bool finite_nonneg(double v) { return std::isfinite(v) && v >= 0.0; }

} // namespace

std::string_view to_string(InstructionKind kind) {
    return kMnemonics[to_index(kind)];
}

std::optional<InstructionKind> parse_instruction_kind(std::string_view name) {
    for (std::size_t i = 0; i < kMnemonics.size(); ++i)
        if (kMnemonics[i] == name)
            return kAllInstructionKinds[i];
    return std::nullopt;
}

std::string_view to_string(ConstraintClass c) {
    switch (c) {
    case ConstraintClass::FrequencyConstrained:
        return "FrequencyConstrained";
    case ConstraintClass::PowerConstrained:
        return "PowerConstrained";
    case ConstraintClass::ThermallyConstrained:
        return "ThermallyConstrained";
    case ConstraintClass::Unconstrained:
        return "Unconstrained";
    }
    return "?";
}

std::string_view to_string(DeviceClass c) {
    return c == DeviceClass::Cpu ? "cpu" : "gpu";
}

DvfsCurve::DvfsCurve(std::vector<PState> pstates) : pstates_(std::move(pstates)) {
    require(!pstates_.empty(), "DVFS curve must contain at least one P-state");
    for (std::size_t i = 0; i < pstates_.size(); ++i) {
        const PState &p = pstates_[i];
        require(p.index == i, fmt::format("P-state {} has index {}", i, p.index));
        require(std::isfinite(p.frequency) && p.frequency > 0.0,
                fmt::format("P-state {} frequency must be positive", i));
        require(std::isfinite(p.voltage) && p.voltage > 0.0,
                fmt::format("P-state {} voltage must be positive", i));
        if (i > 0) {
            require(p.frequency > pstates_[i - 1].frequency,
                    fmt::format("P-state {} frequency not increasing", i));
            require(p.voltage > pstates_[i - 1].voltage,
                    fmt::format("P-state {} voltage not increasing", i));
        }
    }
}

DvfsCurve DvfsCurve::from_frequencies(std::span<const double> frequencies,
                                      double v_min, double v_max) {
    require(!frequencies.empty(), "DVFS curve needs at least one frequency");
    require(v_min > 0.0 && (v_max > v_min || frequencies.size() == 1),
            "voltage range must satisfy 0 < v_min < v_max");
    const double f_lo = frequencies.front();
    const double f_hi = frequencies.back();
    std::vector<PState> out;
    out.reserve(frequencies.size());
    for (std::size_t i = 0; i < frequencies.size(); ++i) {
        const double frac =
            f_hi > f_lo ? (frequencies[i] - f_lo) / (f_hi - f_lo) : 1.0;
        out.push_back({i, frequencies[i], v_min + frac * (v_max - v_min)});
    }
    return DvfsCurve(std::move(out));
}

const PState &DvfsCurve::at(std::size_t index) const {
    if (index >= pstates_.size())
        throw InvalidArgument(fmt::format(
            "P-state index {} outside curve of {} states", index, size()));
    return pstates_[index];
}

void DevicePreset::validate() const {
    require(!name.empty(), "preset name must not be empty");
    require(curve.size() > 0, name + ": empty DVFS curve");

    const PowerParams &p = power;
    require(finite_nonneg(p.idle_power) && finite_nonneg(p.leakage_coeff) &&
                finite_nonneg(p.dyn_energy_scale) &&
                finite_nonneg(p.hd_b_weight) && finite_nonneg(p.hd_c_weight) &&
                finite_nonneg(p.hw_weight),
            name + ": power parameters must be finite and >= 0");
    require(p.governor_data_visibility >= 0.0 &&
                p.governor_data_visibility <= 1.0,
            name + ": governor_data_visibility must lie in [0, 1]");
    if (device_class == DeviceClass::Cpu)
        require(p.hw_weight == 0.0, name + ": CPU presets must have hw_weight 0");
    else
        require(p.hw_weight > 0.0, name + ": GPU presets need hw_weight > 0");

    const ThermalParams &t = thermal;
    require(t.ambient >= 0.0 && t.ambient <= 50.0,
            name + ": ambient must lie in [0, 50] degC");
    require(t.r_th > 0.0 && t.c_th > 0.0 && t.r_die > 0.0 && t.c_die > 0.0,
            name + ": thermal resistances and capacitances must be positive");
    require(t.r_hotspot >= 0.0, name + ": r_hotspot must be >= 0");

    require(limits.t_max > t.ambient, name + ": t_max must exceed ambient");
    require(limits.p_max > p.idle_power, name + ": p_max must exceed idle_power");
    require(std::abs(limits.f_max - curve.top().frequency) <=
                1e-9 * curve.top().frequency,
            name + ": f_max must equal the top P-state frequency");

    require(governor.interval_ticks >= 1, name + ": governor interval must be >= 1");
    require(governor.hysteresis >= 0.0, name + ": hysteresis must be >= 0");

    for (InstructionKind k : kAllInstructionKinds) {
        const double e = instruction_energy[to_index(k)];
        const double d = instruction_density[to_index(k)];
        require(e >= 0.0 && e <= 1.0,
                fmt::format("{}: instruction_energy[{}] must lie in [0, 1]",
                            name, to_string(k)));
        require(d >= 0.0 && d <= 1.0,
                fmt::format("{}: instruction_density[{}] must lie in [0, 1]",
                            name, to_string(k)));
    }
}

namespace {

double switching_scale(const PState &pstate, const PowerParams &params) {
    return params.dyn_energy_scale * pstate.voltage * pstate.voltage *
           pstate.frequency;
}

double data_terms(const ActivityFactor &a, const PowerParams &params) {
    return params.hd_b_weight * a.hd_b + params.hd_c_weight * a.hd_c +
           params.hw_weight * a.hw;
}

} // namespace

double dynamic_power(const PState &pstate, const ActivityFactor &activity,
                     const PowerParams &params) {
    return switching_scale(pstate, params) *
           (activity.base + data_terms(activity, params));
}

double estimated_dynamic_power(const PState &pstate,
                               const ActivityFactor &activity,
                               const PowerParams &params) {
    return switching_scale(pstate, params) *
           (activity.base +
            params.governor_data_visibility * data_terms(activity, params));
}

double hotspot_power(const PState &pstate, const ActivityFactor &activity,
                     double density, const PowerParams &params) {
    return switching_scale(pstate, params) *
           (density * activity.base + data_terms(activity, params));
}

double static_power(double temp, double ambient, const PowerParams &params) {
    if (!(temp >= ambient - 5.0))
        throw InvalidArgument(fmt::format(
            "static_power: temperature {} below ambient {} - 5", temp, ambient));
    return params.idle_power + params.leakage_coeff * (temp - ambient);
}

double thermal_step(double temp, double power, double dt, const RcNode &node) {
    const double tau = node.resistance * node.capacitance;
    if (!(dt > 0.0) || !(dt < tau / 10.0))
        throw InvalidArgument(fmt::format(
            "thermal_step: dt {} violates 0 < dt < R*C/10 = {}", dt, tau / 10.0));
    return temp + dt / node.capacitance *
                      (power - (temp - node.ambient) / node.resistance);
}

double thermal_step(double temp, double total_power, double dt,
                    const ThermalParams &params) {
    return thermal_step(temp, total_power, dt,
                        RcNode{params.ambient, params.r_th, params.c_th});
}

ThermalState thermal_network_step(const ThermalState &state, double power,
                                  double dt, const ThermalParams &params) {
    const double to_case = (state.die - state.case_temp) / params.r_die;
    ThermalState next;
    next.die = thermal_step(state.die, power, dt,
                            RcNode{state.case_temp, params.r_die, params.c_die});
    next.case_temp = thermal_step(state.case_temp, to_case, dt, params);
    return next;
}

double sensor_temperature(double die_temp, double hotspot_power,
                          const ThermalParams &params) {
    return die_temp + params.r_hotspot * hotspot_power;
}

} // namespace dvfsleak
