// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qflow::qasm {

enum class RegisterKind : std::uint8_t { quantum = 0, classical = 1 };

struct Register {
    std::string name;
    RegisterKind kind = RegisterKind::quantum;
    std::uint32_t size = 1;

    friend bool operator==(const Register&, const Register&) = default;
};

/// Reference to one wire of a register, or to the whole register when
/// `index == kWholeRegister` (QASM broadcast form such as `h q;`).
struct WireRef {
    static constexpr std::uint32_t kWholeRegister = std::numeric_limits<std::uint32_t>::max();

    std::uint32_t reg = 0;
    std::uint32_t index = kWholeRegister;

    bool whole() const noexcept { return index == kWholeRegister; }

    friend bool operator==(const WireRef&, const WireRef&) = default;
    friend auto operator<=>(const WireRef&, const WireRef&) = default;
};

/// `if (creg == value)` guard.
struct Condition {
    std::uint32_t creg = 0;
    std::uint64_t value = 0;

    friend bool operator==(const Condition&, const Condition&) = default;
};

/// One statement of the program. Opcodes are gate names or one of the
/// directives `measure`, `barrier`, `reset`, `delay`.
struct Instruction {
    std::string opcode;
    std::vector<double> params;
    std::vector<WireRef> qubits;
    std::vector<WireRef> clbits;
    std::optional<Condition> condition;

    /// Parameters compare by bit pattern so that -0.0 and 0.0 differ.
    friend bool operator==(const Instruction& a, const Instruction& b);
};

/// Parameter expression inside a gate macro body. Constant subtrees are
/// folded by the parser, so only expressions that mention a formal
/// parameter survive as trees.
struct Expr {
    enum class Kind : std::uint8_t { number, param, negate, add, sub, mul, div, pow, call };

    Kind kind = Kind::number;
    double value = 0.0;
    std::uint32_t param = 0;
    std::string function;
    std::vector<Expr> args;

    static Expr number(double v);
    static Expr parameter(std::uint32_t index);
    static Expr unary(Kind kind, Expr operand);
    static Expr binary(Kind kind, Expr lhs, Expr rhs);
    static Expr call(std::string function, Expr operand);

    double evaluate(std::span<const double> bindings) const;
    bool is_constant() const;

    friend bool operator==(const Expr& a, const Expr& b);
};

/// Applies a unary QASM function by name (sin, cos, tan, exp, ln, sqrt).
std::optional<double> apply_function(std::string_view name, double x);

/// A statement inside a gate macro body. Qubits index the formal qubit list.
struct GateCall {
    std::string name;
    std::vector<Expr> params;
    std::vector<std::uint32_t> qubits;

    friend bool operator==(const GateCall&, const GateCall&) = default;
};

struct GateDef {
    std::string name;
    std::vector<std::string> params;
    std::vector<std::string> qubits;
    std::vector<GateCall> body;
    bool opaque = false;

    friend bool operator==(const GateDef&, const GateDef&) = default;
};

/// The program: registers, user gate macros, and the instruction stream.
struct Circuit {
    std::vector<Register> registers;
    std::vector<GateDef> gate_defs;
    std::vector<Instruction> instructions;
    std::string source_name;

    /// Appends a register and returns its index.
    std::uint32_t add_register(std::string name, RegisterKind kind, std::uint32_t size);

    std::optional<std::uint32_t> find_register(std::string_view name) const;
    const GateDef* find_gate_def(std::string_view name) const;

    std::uint32_t num_qubits() const;
    std::uint32_t num_clbits() const;

    /// Global index offset of each register within its kind (quantum or
    /// classical wires numbered in declaration order).
    std::vector<std::uint32_t> wire_offsets() const;

    /// Structural equality; `source_name` is provenance and is ignored.
    friend bool operator==(const Circuit& a, const Circuit& b);
};

/// Convenience constructor for a gate instruction.
Instruction make_gate(std::string name, std::vector<double> params, std::vector<WireRef> qubits);
Instruction make_measure(WireRef qubit, WireRef clbit);

/// True for the non-gate opcodes `measure`, `barrier`, `reset`, `delay`.
bool is_directive(std::string_view opcode) noexcept;

/// Checks register references, wire bounds, gate arity and parameter
/// counts. Throws CircuitError naming the offending instruction.
void validate(const Circuit& circuit);

}  // namespace qflow::qasm
