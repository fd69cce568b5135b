// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/qasm/circuit.hpp"

namespace qflow::qasm {

/// Maximum macro nesting depth before flatten gives up.
inline constexpr int kMaxMacroDepth = 1000;

/// Inlines every user gate macro and expands register-wide operands into
/// per-wire instructions. A broadcast barrier becomes one barrier over all
/// of its wires. The result has no gate_defs and only builtin opcodes.
Circuit flatten(const Circuit& circuit);

/// True when every instruction is a builtin gate or directive with
/// single-wire operands.
bool is_flat(const Circuit& circuit);

}  // namespace qflow::qasm
