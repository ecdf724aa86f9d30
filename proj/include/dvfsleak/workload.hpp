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

#ifndef DVFSLEAK_WORKLOAD_HPP
#define DVFSLEAK_WORKLOAD_HPP

#include <cstdint>
#include <functional>
#include <string>

#include "dvfsleak/instruction.hpp"
#include "dvfsleak/model.hpp"

namespace dvfsleak {

/// Issue width a workload's `parallelism` is measured against.
inline constexpr unsigned kIssueWidth = 8;

struct OperandPair {
    std::uint64_t input = 0;
    std::uint64_t output = 0;
};

/// Deterministic operand/result sequence seen by one ALU lane. The value at
/// a tick is a pure function of the tick index, so decompositions can be
/// evaluated in any order.
class OperandStream {
public:
    using Generator = std::function<OperandPair(std::uint64_t tick)>;

    OperandStream(unsigned width, Generator generator, std::string description);

    unsigned width() const noexcept { return width_; }
    const std::string &description() const noexcept { return description_; }

    /// Throws std::logic_error if the generator produced a value wider than
    /// `width()`.
    OperandPair at(std::uint64_t tick) const;

private:
    unsigned width_;
    Generator generator_;
    std::string description_;
};

struct Workload {
    InstructionKind kind = InstructionKind::Add;
    OperandStream operands;
    unsigned parallelism = 1; // busy lanes, e.g. 6 ALU ports
    /// Fraction of time the device is busy; drives the governor's demand.
    double utilization = 1.0;
    /// Cycles of work per rendered frame; only used by render loops.
    double work_cycles = 0.0;
    std::string description;
};

std::uint32_t hamming_weight(std::uint64_t value);

/// Bit vectors of explicit width. Throws InvalidArgument when the widths
/// differ or a value does not fit its width.
std::uint32_t hamming_distance(std::uint64_t a, unsigned width_a,
                               std::uint64_t b, unsigned width_b);

inline std::uint32_t hamming_distance(std::uint64_t a, std::uint64_t b) {
    return hamming_distance(a, 64, b, 64);
}

/// Mean HD_A, HD_B, HD_C and output HW over `ticks` ticks, each normalised
/// by operand width; `base` is parallelism over kIssueWidth. OpenMP
/// parallel reduction; integer accumulation keeps it bit-identical to the
/// serial version. Requires ticks >= 2.
ActivityFactor decompose_components(const Workload &w, std::uint64_t ticks);

/// Single-threaded reference for decompose_components.
ActivityFactor decompose_components_serial(const Workload &w,
                                           std::uint64_t ticks);

// Builders for the measurement workloads. CPU shift workloads run six
// identical instructions (one per ALU port) on 64-bit registers.

/// ror by `shift` on a constant input; only HD_A varies (4 * shift).
Workload build_ror_isolation(unsigned shift);
/// Alternating lsl/lsr on 0x00000000FFFFFFFF / 0xFFFFFFFF00000000:
/// HD_A = 2 * shift, HD_B = 64 - 4 * shift, HD_C = 64.
Workload build_lsl_lsr_component_b(unsigned shift);
/// Inputs pre-shifted so outputs coincide: HD_A = 2 * shift, HD_B = 0,
/// HD_C = 4 * shift.
Workload build_lsl_lsr_component_c(unsigned shift);
/// In-place ror: HD_A = HD_B = HD_C = 4 * shift.
Workload build_ror_inplace(unsigned shift);
/// 64-bit `and x, x` on a value with the low `hw` bits set.
Workload build_cpu_and(unsigned hw);
/// val = val + addend on all cores.
Workload build_add_constant(std::uint64_t addend);
/// Survey workload for `kind` on fixed mid-weight operands.
Workload build_instruction_loop(InstructionKind kind, std::uint64_t seed = 0);

/// 32-bit GPU kernel: 0x0000FFFF << shift then >> shift. Combined HD
/// across the pair is 4 * shift. Throws InvalidArgument if shift > 16.
Workload build_shift_kernel(unsigned shift);
/// 32-bit GPU kernel of element-wise and on a value with `hw` low bits
/// set. Throws InvalidArgument if hw > 32.
Workload build_and_kernel(unsigned hw);

/// Combined HD (bits) of one input->output pair of instructions, i.e.
/// 2 * mean HD_A * width.
double combined_pair_hd(const Workload &w, std::uint64_t ticks = 64);

struct PixelColor {
    std::uint8_t r = 0, g = 0, b = 0;

    static constexpr PixelColor black() { return {0, 0, 0}; }
    static constexpr PixelColor white() { return {255, 255, 255}; }

    std::uint32_t packed() const {
        return (std::uint32_t{r} << 16) | (std::uint32_t{g} << 8) | b;
    }
    std::uint32_t weight() const { return hamming_weight(packed()); }
    bool operator==(const PixelColor &) const = default;
};

/// Filter stack over one pixel, `intensity` cycles of work per frame.
/// Operand-dependent activity scales with the pixel's Hamming weight
/// (0 for black, 24 for white). Throws InvalidArgument unless
/// intensity > 0.
Workload build_filter_workload(PixelColor pixel, double intensity);

/// Default browser rendering load used for website bursts.
Workload build_render_workload();

} // namespace dvfsleak

#endif // DVFSLEAK_WORKLOAD_HPP
