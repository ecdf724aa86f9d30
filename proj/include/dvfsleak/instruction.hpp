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

#ifndef DVFSLEAK_INSTRUCTION_HPP
#define DVFSLEAK_INSTRUCTION_HPP

#include <array>
#include <cstddef>
#include <optional>
#include <string_view>

namespace dvfsleak {

enum class InstructionKind {
    Str,
    Aes,
    Ror,
    Lsl,
    Lsr,
    And,
    Add,
    Fadd,
    Mul,
    Fmul,
    Div,
    Fdiv,
};

inline constexpr std::size_t kInstructionKindCount = 12;

inline constexpr std::array<InstructionKind, kInstructionKindCount>
    kAllInstructionKinds = {
        InstructionKind::Str,  InstructionKind::Aes, InstructionKind::Ror,
        InstructionKind::Lsl,  InstructionKind::Lsr, InstructionKind::And,
        InstructionKind::Add,  InstructionKind::Fadd, InstructionKind::Mul,
        InstructionKind::Fmul, InstructionKind::Div, InstructionKind::Fdiv,
};

constexpr std::size_t to_index(InstructionKind kind) {
    return static_cast<std::size_t>(kind);
}

std::string_view to_string(InstructionKind kind);

/// Accepts the lower-case mnemonic ("add", "fdiv", ...).
std::optional<InstructionKind> parse_instruction_kind(std::string_view name);

/// Dense per-kind table; every kind has a value.
template <typename T>
using PerInstruction = std::array<T, kInstructionKindCount>;

} // namespace dvfsleak

#endif // DVFSLEAK_INSTRUCTION_HPP
