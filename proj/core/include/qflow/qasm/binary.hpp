// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/qasm/circuit.hpp"

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace qflow::qasm {

/// NWQB container, version 1. Little-endian throughout; counts and indices
/// are unsigned LEB128.
///
///   magic "NWQB" | u16 version
///   string table   : count, {length, utf-8 bytes}*
///   registers      : count, {name string index, u8 kind, size}*
///   instructions   : count, {opcode string index, u8 flags, param count,
///                            f64 params*, qubit count, (reg, wire)*,
///                            clbit count, (reg, wire)*,
///                            [creg, value] if flags bit0}*
inline constexpr std::array<std::uint8_t, 4> kBinaryMagic{0x4E, 0x57, 0x51, 0x42};
inline constexpr std::uint16_t kBinaryVersion = 1;

/// Encodes the flattened form of `circuit`. Deterministic: equal circuits
/// produce identical bytes.
std::vector<std::uint8_t> encode_binary(const Circuit& circuit);

/// Strictly validating decoder. Throws DecodeError naming the byte offset.
Circuit decode_binary(std::span<const std::uint8_t> bytes);

/// True when `bytes` starts with the NWQB magic.
bool looks_binary(std::span<const std::uint8_t> bytes) noexcept;

namespace leb128 {
void put(std::vector<std::uint8_t>& out, std::uint64_t value);
}

}  // namespace qflow::qasm
