// SPDX-License-Identifier: Apache-2.0
#include "qflow/qasm/printer.hpp"

#include <array>
#include <charconv>
#include <cmath>

namespace qflow::qasm {
namespace {

void append_expr(std::string& out, const Expr& e, const GateDef& def) {
    using K = Expr::Kind;
    switch (e.kind) {
        case K::number:
            // A parenthesized negative literal keeps `(-2)^x` from reading
            // back as `-(2^x)`.
            if (std::signbit(e.value)) {
                out += '(';
                out += format_number(e.value);
                out += ')';
            } else {
                out += format_number(e.value);
            }
            return;
        case K::param:
            out += def.params[e.param];
            return;
        case K::negate:
            out += "(-";
            append_expr(out, e.args[0], def);
            out += ')';
            return;
        case K::call:
            out += e.function;
            out += '(';
            append_expr(out, e.args[0], def);
            out += ')';
            return;
        default:
            break;
    }
    char op = '+';
    switch (e.kind) {
        case K::sub: op = '-'; break;
        case K::mul: op = '*'; break;
        case K::div: op = '/'; break;
        case K::pow: op = '^'; break;
        default: break;
    }
    out += '(';
    append_expr(out, e.args[0], def);
    out += op;
    append_expr(out, e.args[1], def);
    out += ')';
}

void append_wire(std::string& out, const Circuit& c, const WireRef& ref) {
    out += c.registers[ref.reg].name;
    if (!ref.whole()) {
        out += '[';
        out += std::to_string(ref.index);
        out += ']';
    }
}

void append_gate_def(std::string& out, const GateDef& def) {
    out += def.opaque ? "opaque " : "gate ";
    out += def.name;
    if (!def.params.empty()) {
        out += '(';
        for (std::size_t i = 0; i < def.params.size(); ++i) {
            if (i) out += ',';
            out += def.params[i];
        }
        out += ')';
    }
    for (std::size_t i = 0; i < def.qubits.size(); ++i) {
        out += i ? "," : " ";
        out += def.qubits[i];
    }
    if (def.opaque) {
        out += ";\n";
        return;
    }
    out += " {";
    for (const GateCall& call : def.body) {
        out += ' ';
        out += call.name;
        if (!call.params.empty()) {
            out += '(';
            for (std::size_t i = 0; i < call.params.size(); ++i) {
                if (i) out += ',';
                append_expr(out, call.params[i], def);
            }
            out += ')';
        }
        for (std::size_t i = 0; i < call.qubits.size(); ++i) {
            out += i ? "," : " ";
            out += def.qubits[call.qubits[i]];
        }
        out += ';';
    }
    out += " }\n";
}

}  // namespace

std::string format_number(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    (void)ec;
    return std::string(buf.data(), ptr);
}

std::string print_qasm(const Circuit& c) {
    std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\n";
    for (const GateDef& def : c.gate_defs) append_gate_def(out, def);
    for (const Register& r : c.registers) {
        out += r.kind == RegisterKind::quantum ? "qreg " : "creg ";
        out += r.name;
        out += '[';
        out += std::to_string(r.size);
        out += "];\n";
    }
    for (const Instruction& instr : c.instructions) {
        if (instr.condition) {
            out += "if (";
            out += c.registers[instr.condition->creg].name;
            out += "==";
            out += std::to_string(instr.condition->value);
            out += ") ";
        }
        out += instr.opcode;
        if (instr.opcode == "measure") {
            out += ' ';
            append_wire(out, c, instr.qubits[0]);
            out += " -> ";
            append_wire(out, c, instr.clbits[0]);
            out += ";\n";
            continue;
        }
        if (instr.opcode == "delay") {
            out += ' ';
            append_wire(out, c, instr.qubits[0]);
            out += ", ";
            out += format_number(instr.params[0]);
            out += ";\n";
            continue;
        }
        if (!instr.params.empty()) {
            out += '(';
            for (std::size_t i = 0; i < instr.params.size(); ++i) {
                if (i) out += ',';
                out += format_number(instr.params[i]);
            }
            out += ')';
        }
        for (std::size_t i = 0; i < instr.qubits.size(); ++i) {
            out += i ? "," : " ";
            append_wire(out, c, instr.qubits[i]);
        }
        out += ";\n";
    }
    return out;
}

}  // namespace qflow::qasm
