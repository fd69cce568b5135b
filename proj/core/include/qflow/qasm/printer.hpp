// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/qasm/circuit.hpp"

#include <string>

namespace qflow::qasm {

/// Renders a circuit as OpenQASM 2.0. Numbers use the shortest decimal that
/// reads back to the same double, so parse(print(c)) == c bit for bit.
std::string print_qasm(const Circuit& circuit);

/// Shortest round-trip decimal form of `v`.
std::string format_number(double v);

}  // namespace qflow::qasm
