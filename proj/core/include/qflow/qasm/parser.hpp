// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/qasm/circuit.hpp"

#include <string>
#include <string_view>

namespace qflow::qasm {

struct ParseOptions {
    /// When false only the primitives U and CX are predefined; used to read
    /// the builtin qelib1 text itself as ordinary macros.
    bool builtin_gates = true;
    std::string source_name;
};

/// Parses OpenQASM 2.0 (plus `delay q[i], cycles;`). Throws ParseError with
/// line and column on any syntax or semantic error.
Circuit parse_qasm(std::string_view text, const ParseOptions& options = {});

}  // namespace qflow::qasm
