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

#include "dvfsleak/workload.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>

#include <fmt/core.h>

#include "dvfsleak/error.hpp"

namespace dvfsleak {

namespace {

constexpr std::uint64_t width_mask(unsigned width) {
    return width >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << width) - 1;
}

constexpr std::uint64_t rotr64(std::uint64_t v, unsigned s) {
    return std::rotr(v, static_cast<int>(s % 64));
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Random 64-bit value nudged to exactly 32 set bits.
std::uint64_t mid_weight_value(std::uint64_t seed) {
    std::uint64_t v = splitmix64(seed);
    for (unsigned bit = 0; std::popcount(v) > 32; ++bit)
        v &= ~(std::uint64_t{1} << (bit * 7 % 64));
    for (unsigned bit = 0; std::popcount(v) < 32; ++bit)
        v |= std::uint64_t{1} << (bit * 11 % 64);
    return v;
}

Workload make(InstructionKind kind, unsigned lanes, unsigned width,
              OperandStream::Generator gen, std::string desc) {
    OperandStream stream(width, std::move(gen), desc);
    return Workload{kind, std::move(stream), lanes, 1.0, 0.0, std::move(desc)};
}

void check_range(unsigned value, unsigned max, const char *what) {
    if (value > max)
        throw InvalidArgument(
            fmt::format("{} {} outside [0, {}]", what, value, max));
}

// M1 issue ports per instruction family.
unsigned survey_lanes(InstructionKind kind) {
    switch (kind) {
    case InstructionKind::Str:
    case InstructionKind::Mul:
        return 2;
    case InstructionKind::Div:
        return 1;
    case InstructionKind::Ror:
    case InstructionKind::Lsl:
    case InstructionKind::Lsr:
    case InstructionKind::And:
    case InstructionKind::Add:
        return 6;
    case InstructionKind::Aes:
    case InstructionKind::Fadd:
    case InstructionKind::Fmul:
    case InstructionKind::Fdiv:
        return 4;
    }
    return 1;
}

constexpr unsigned kCpuShiftLanes = 6;

} // namespace

OperandStream::OperandStream(unsigned width, Generator generator,
                             std::string description)
    : width_(width), generator_(std::move(generator)),
      description_(std::move(description)) {
    if (width_ == 0 || width_ > 64)
        throw InvalidArgument(fmt::format("operand width {} outside [1, 64]", width_));
    if (!generator_)
        throw InvalidArgument("operand stream needs a generator");
}

OperandPair OperandStream::at(std::uint64_t tick) const {
    const OperandPair p = generator_(tick);
    const std::uint64_t mask = width_mask(width_);
    if ((p.input & ~mask) != 0 || (p.output & ~mask) != 0)
        throw std::logic_error(fmt::format(
            "operand stream '{}' produced a value wider than {} bits",
            description_, width_));
    return p;
}

std::uint32_t hamming_weight(std::uint64_t value) {
    return static_cast<std::uint32_t>(std::popcount(value));
}

std::uint32_t hamming_distance(std::uint64_t a, unsigned width_a,
                               std::uint64_t b, unsigned width_b) {
    if (width_a != width_b)
        throw InvalidArgument(fmt::format(
            "hamming_distance: width mismatch ({} vs {})", width_a, width_b));
    const std::uint64_t mask = width_mask(width_a);
    if ((a & ~mask) != 0 || (b & ~mask) != 0)
        throw InvalidArgument("hamming_distance: value exceeds its width");
    return hamming_weight(a ^ b);
}

namespace {

struct ComponentSums {
    std::uint64_t hd_a = 0, hd_b = 0, hd_c = 0, hw = 0;
};

ActivityFactor finish(const Workload &w, const ComponentSums &s,
                      std::uint64_t ticks) {
    const double width = w.operands.width();
    const double n = static_cast<double>(ticks);
    ActivityFactor a;
    a.base = std::min(1.0, static_cast<double>(w.parallelism) / kIssueWidth);
    a.hd_a = static_cast<double>(s.hd_a) / (n * width);
    a.hd_b = static_cast<double>(s.hd_b) / ((n - 1.0) * width);
    a.hd_c = static_cast<double>(s.hd_c) / ((n - 1.0) * width);
    a.hw = static_cast<double>(s.hw) / (n * width);
    return a;
}

void check_decompose_args(const Workload &w, std::uint64_t ticks) {
    if (ticks < 2)
        throw InvalidArgument("decompose_components needs at least 2 ticks");
    if (w.parallelism < 1)
        throw InvalidArgument("workload parallelism must be >= 1");
}

} // namespace

ActivityFactor decompose_components_serial(const Workload &w,
                                           std::uint64_t ticks) {
    check_decompose_args(w, ticks);
    ComponentSums s;
    OperandPair prev = w.operands.at(0);
    s.hd_a += hamming_weight(prev.input ^ prev.output);
    s.hw += hamming_weight(prev.output);
    for (std::uint64_t k = 1; k < ticks; ++k) {
        const OperandPair cur = w.operands.at(k);
        s.hd_a += hamming_weight(cur.input ^ cur.output);
        s.hw += hamming_weight(cur.output);
        s.hd_b += hamming_weight(cur.output ^ prev.output);
        s.hd_c += hamming_weight(cur.input ^ prev.input);
        prev = cur;
    }
    return finish(w, s, ticks);
}

ActivityFactor decompose_components(const Workload &w, std::uint64_t ticks) {
    check_decompose_args(w, ticks);
    std::uint64_t hd_a = 0, hd_b = 0, hd_c = 0, hw = 0;
    const auto n = static_cast<std::int64_t>(ticks);
#pragma omp parallel for reduction(+ : hd_a, hd_b, hd_c, hw) schedule(static)
    for (std::int64_t k = 0; k < n; ++k) {
        const OperandPair cur = w.operands.at(static_cast<std::uint64_t>(k));
        hd_a += hamming_weight(cur.input ^ cur.output);
        hw += hamming_weight(cur.output);
        if (k > 0) {
            const OperandPair prev =
                w.operands.at(static_cast<std::uint64_t>(k - 1));
            hd_b += hamming_weight(cur.output ^ prev.output);
            hd_c += hamming_weight(cur.input ^ prev.input);
        }
    }
    return finish(w, ComponentSums{hd_a, hd_b, hd_c, hw}, ticks);
}

Workload build_ror_isolation(unsigned shift) {
    check_range(shift, 16, "ror shift");
    constexpr std::uint64_t kInput = 0x0000FFFF0000FFFFull;
    return make(InstructionKind::Ror, kCpuShiftLanes, 64,
                [shift](std::uint64_t) {
                    return OperandPair{kInput, rotr64(kInput, shift)};
                },
                fmt::format("ror-isolate:shift={}", shift));
}

Workload build_lsl_lsr_component_b(unsigned shift) {
    check_range(shift, 16, "lsl/lsr shift");
    constexpr std::uint64_t kX8 = 0x00000000FFFFFFFFull;
    constexpr std::uint64_t kX11 = 0xFFFFFFFF00000000ull;
    return make(InstructionKind::Lsl, kCpuShiftLanes, 64,
                [shift](std::uint64_t tick) {
                    if (tick % 2 == 0)
                        return OperandPair{kX8, kX8 << shift};
                    return OperandPair{kX11, kX11 >> shift};
                },
                fmt::format("shift-b:shift={}", shift));
}

Workload build_lsl_lsr_component_c(unsigned shift) {
    check_range(shift, 16, "lsl/lsr shift");
    constexpr std::uint64_t kCentre = 0x0000FFFFFFFF0000ull;
    return make(InstructionKind::Lsl, kCpuShiftLanes, 64,
                [shift](std::uint64_t tick) {
                    if (tick % 2 == 0) {
                        const std::uint64_t x8 = kCentre >> shift;
                        return OperandPair{x8, x8 << shift};
                    }
                    const std::uint64_t x11 = kCentre << shift;
                    return OperandPair{x11, x11 >> shift};
                },
                fmt::format("shift-c:shift={}", shift));
}

Workload build_ror_inplace(unsigned shift) {
    check_range(shift, 16, "ror shift");
    constexpr std::uint64_t kSeed = 0x0000FFFF0000FFFFull;
    return make(InstructionKind::Ror, kCpuShiftLanes, 64,
                [shift](std::uint64_t tick) {
                    const auto s = static_cast<unsigned>((tick * shift) % 64);
                    const std::uint64_t in = rotr64(kSeed, s);
                    return OperandPair{in, rotr64(in, shift)};
                },
                fmt::format("ror-inplace:shift={}", shift));
}

Workload build_cpu_and(unsigned hw) {
    check_range(hw, 64, "and hw");
    const std::uint64_t v = hw == 0 ? 0 : width_mask(hw);
    return make(InstructionKind::And, kCpuShiftLanes, 64,
                [v](std::uint64_t) { return OperandPair{v, v}; },
                fmt::format("and-hw:hw={}", hw));
}

Workload build_add_constant(std::uint64_t addend) {
    return make(InstructionKind::Add, survey_lanes(InstructionKind::Add), 64,
                [addend](std::uint64_t tick) {
                    return OperandPair{tick * addend, (tick + 1) * addend};
                },
                fmt::format("add-const:addend={}", addend));
}

Workload build_instruction_loop(InstructionKind kind, std::uint64_t seed) {
    const std::uint64_t in = mid_weight_value(seed * 2 + 1);
    const std::uint64_t out = mid_weight_value(seed * 2 + 2);
    return make(kind, survey_lanes(kind), 64,
                [in, out](std::uint64_t) { return OperandPair{in, out}; },
                std::string(to_string(kind)));
}

Workload build_shift_kernel(unsigned shift) {
    check_range(shift, 16, "kernel shift");
    constexpr std::uint64_t kValue = 0x0000FFFFull;
    return make(InstructionKind::Lsl, kIssueWidth, 32,
                [shift](std::uint64_t tick) {
                    const std::uint64_t shifted = (kValue << shift) & 0xFFFFFFFFull;
                    if (tick % 2 == 0)
                        return OperandPair{kValue, shifted};
                    return OperandPair{shifted, shifted >> shift};
                },
                fmt::format("gpu-shift:shift={}", shift));
}

Workload build_and_kernel(unsigned hw) {
    check_range(hw, 32, "kernel hw");
    const std::uint64_t v = hw == 0 ? 0 : width_mask(hw);
    return make(InstructionKind::And, kIssueWidth, 32,
                [v](std::uint64_t) { return OperandPair{v, v}; },
                fmt::format("gpu-and:hw={}", hw));
}

double combined_pair_hd(const Workload &w, std::uint64_t ticks) {
    const ActivityFactor a = decompose_components_serial(w, ticks);
    return 2.0 * a.hd_a * w.operands.width();
}

Workload build_filter_workload(PixelColor pixel, double intensity) {
    if (!(intensity > 0.0))
        throw InvalidArgument("filter intensity must be > 0");
    const std::uint64_t v = pixel.packed();
    Workload w = make(InstructionKind::Fmul, kIssueWidth, 32,
                      [v](std::uint64_t tick) {
                          return tick % 2 == 0 ? OperandPair{v, v}
                                               : OperandPair{0, 0};
                      },
                      fmt::format("filter:pixel={:06x}", v));
    w.work_cycles = intensity;
    return w;
}

Workload build_render_workload() {
    Workload w = build_instruction_loop(InstructionKind::Fmul, 7);
    w.parallelism = kIssueWidth;
    w.description = "render";
    return w;
}

} // namespace dvfsleak
