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

#ifndef DVFSLEAK_MODEL_HPP
#define DVFSLEAK_MODEL_HPP

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dvfsleak/instruction.hpp"

namespace dvfsleak {

/// One voltage/frequency operating point.
struct PState {
    std::size_t index = 0;
    double frequency = 0.0; // Hz
    double voltage = 0.0;   // V (relative units are fine)
};

/// Ordered list of P-states; index 0 is the slowest, back() the fastest.
class DvfsCurve {
public:
    DvfsCurve() = default;

    /// Throws InvalidArgument unless the list is non-empty, indices match
    /// positions and frequency/voltage are positive and strictly increasing.
    explicit DvfsCurve(std::vector<PState> pstates);

    /// Builds a curve whose voltages are an affine function of frequency,
    /// running from `v_min` at the lowest to `v_max` at the highest point.
    static DvfsCurve from_frequencies(std::span<const double> frequencies,
                                      double v_min, double v_max);

    std::size_t size() const noexcept { return pstates_.size(); }
    const PState &at(std::size_t index) const;
    const PState &top() const { return pstates_.back(); }
    std::size_t top_index() const noexcept { return pstates_.size() - 1; }
    std::span<const PState> pstates() const noexcept { return pstates_; }

private:
    std::vector<PState> pstates_;
};

/// Per-tick switching summary. Every component lies in [0, 1]: `base` is
/// occupancy of the issue width (optionally scaled by the preset's
/// per-instruction energy), the rest are Hamming distances/weights
/// normalised by operand width.
struct ActivityFactor {
    double base = 0.0;
    double hd_a = 0.0; // input <-> output of one operation
    double hd_b = 0.0; // consecutive outputs
    double hd_c = 0.0; // consecutive inputs
    double hw = 0.0;   // Hamming weight of outputs

    bool operator==(const ActivityFactor &) const = default;
};

struct PowerParams {
    double idle_power = 0.0;       // W
    double leakage_coeff = 0.0;    // W per degC above ambient
    double dyn_energy_scale = 0.0; // J per (activity unit * V^2) per cycle
    double hd_b_weight = 0.0;
    double hd_c_weight = 0.0;
    double hw_weight = 0.0;
    /// Fraction of operand-dependent switching power that the firmware power
    /// estimate sees. The governor's power limit acts on that estimate; the
    /// power sensor reports the true value.
    double governor_data_visibility = 1.0;
};

/// Lumped die + case thermal network. The case node is the one governed by
/// `r_th`/`c_th` (cooling profile); the die node sits on top of it. The
/// reported temperature adds `r_hotspot` times the concentrated part of the
/// dynamic power to the die temperature.
struct ThermalParams {
    double ambient = 25.0; // degC
    double r_th = 1.0;     // degC/W, case to ambient
    double c_th = 100.0;   // J/degC, case
    double r_die = 0.5;    // degC/W, die to case
    double c_die = 1.0;    // J/degC, die
    double r_hotspot = 0.0; // degC/W, sensor hot spot
};

struct ConstraintLimits {
    double t_max = 100.0; // degC
    double p_max = 100.0; // W
    double f_max = 0.0;   // Hz, equals the top P-state frequency
};

struct GovernorParams {
    std::size_t interval_ticks = 5;
    double hysteresis = 2.0; // degC
};

enum class DeviceClass { Cpu, Gpu };

enum class ConstraintClass {
    FrequencyConstrained,
    PowerConstrained,
    ThermallyConstrained,
    /// No limit binds (the workload is too light).
    Unconstrained,
};

std::string_view to_string(ConstraintClass c);
std::string_view to_string(DeviceClass c);

struct DevicePreset {
    std::string name;
    DeviceClass device_class = DeviceClass::Cpu;
    DvfsCurve curve;
    PowerParams power;
    ThermalParams thermal;
    ConstraintLimits limits;
    GovernorParams governor;
    /// Base activity per instruction kind, relative to a fully busy issue
    /// width. Values lie in [0, 1].
    PerInstruction<double> instruction_energy{};
    /// Share of the base switching power that lands in the sensor hot spot.
    PerInstruction<double> instruction_density{};

    /// Throws InvalidArgument naming the first violated invariant.
    void validate() const;
};

/// Dynamic power for `activity` at `pstate`:
/// scale * V^2 * f * (base + w_b*hd_b + w_c*hd_c + w_hw*hw).
double dynamic_power(const PState &pstate, const ActivityFactor &activity,
                     const PowerParams &params);

/// The part of dynamic power the firmware estimate sees: operand-dependent
/// terms are scaled by `governor_data_visibility`.
double estimated_dynamic_power(const PState &pstate,
                               const ActivityFactor &activity,
                               const PowerParams &params);

/// Concentrated power feeding the sensor hot spot: the `density` share of
/// base switching plus all operand-dependent switching.
double hotspot_power(const PState &pstate, const ActivityFactor &activity,
                     double density, const PowerParams &params);

/// idle + leakage_coeff * (temp - ambient). Requires temp >= ambient - 5.
double static_power(double temp, double ambient, const PowerParams &params);

/// Single RC node relaxing towards `ambient` through `resistance`.
struct RcNode {
    double ambient = 0.0;
    double resistance = 1.0;
    double capacitance = 1.0;
};

/// Explicit Euler step T + dt/C * (P - (T - ambient)/R). Throws
/// InvalidArgument unless 0 < dt < R*C/10.
double thermal_step(double temp, double power, double dt, const RcNode &node);

/// Lumped case node of `params` (ambient, r_th, c_th).
double thermal_step(double temp, double total_power, double dt,
                    const ThermalParams &params);

struct ThermalState {
    double die = 25.0;
    double case_temp = 25.0;
};

/// Advances die and case nodes together by one `dt`.
ThermalState thermal_network_step(const ThermalState &state, double power,
                                  double dt, const ThermalParams &params);

/// Die temperature plus the hot-spot rise; what the temperature sensor reads.
double sensor_temperature(double die_temp, double hotspot_power,
                          const ThermalParams &params);

} // namespace dvfsleak

#endif // DVFSLEAK_MODEL_HPP
