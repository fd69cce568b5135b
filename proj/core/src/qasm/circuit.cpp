// SPDX-License-Identifier: Apache-2.0
#include "qflow/qasm/circuit.hpp"

#include "qflow/error.hpp"
#include "qflow/gates/gate_library.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace qflow::qasm {
namespace {

bool same_bits(double a, double b) noexcept {
    return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b);
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) noexcept {
    return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                      [](double x, double y) { return same_bits(x, y); });
}

std::string describe(const Instruction& instr, std::size_t position) {
    return "instruction #" + std::to_string(position) + " ('" + instr.opcode + "')";
}

}  // namespace

bool operator==(const Instruction& a, const Instruction& b) {
    return a.opcode == b.opcode && same_bits(a.params, b.params) && a.qubits == b.qubits &&
           a.clbits == b.clbits && a.condition == b.condition;
}

Expr Expr::number(double v) {
    Expr e;
    e.value = v;
    return e;
}

Expr Expr::parameter(std::uint32_t index) {
    Expr e;
    e.kind = Kind::param;
    e.param = index;
    return e;
}

Expr Expr::unary(Kind kind, Expr operand) {
    Expr e;
    e.kind = kind;
    e.args.push_back(std::move(operand));
    return e;
}

Expr Expr::binary(Kind kind, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = kind;
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
}

Expr Expr::call(std::string function, Expr operand) {
    Expr e;
    e.kind = Kind::call;
    e.function = std::move(function);
    e.args.push_back(std::move(operand));
    return e;
}

std::optional<double> apply_function(std::string_view name, double x) {
    if (name == "sin") return std::sin(x);
    if (name == "cos") return std::cos(x);
    if (name == "tan") return std::tan(x);
    if (name == "exp") return std::exp(x);
    if (name == "ln") return std::log(x);
    if (name == "sqrt") return std::sqrt(x);
    return std::nullopt;
}

double Expr::evaluate(std::span<const double> bindings) const {
    switch (kind) {
        case Kind::number:
            return value;
        case Kind::param:
            if (param >= bindings.size()) throw CircuitError("unbound gate parameter");
            return bindings[param];
        case Kind::negate:
            return -args[0].evaluate(bindings);
        case Kind::add:
            return args[0].evaluate(bindings) + args[1].evaluate(bindings);
        case Kind::sub:
            return args[0].evaluate(bindings) - args[1].evaluate(bindings);
        case Kind::mul:
            return args[0].evaluate(bindings) * args[1].evaluate(bindings);
        case Kind::div:
            return args[0].evaluate(bindings) / args[1].evaluate(bindings);
        case Kind::pow:
            return std::pow(args[0].evaluate(bindings), args[1].evaluate(bindings));
        case Kind::call: {
            auto r = apply_function(function, args[0].evaluate(bindings));
            if (!r) throw CircuitError("unknown function '" + function + "'");
            return *r;
        }
    }
    return 0.0;
}

bool Expr::is_constant() const {
    if (kind == Kind::param) return false;
    return std::all_of(args.begin(), args.end(), [](const Expr& a) { return a.is_constant(); });
}

bool operator==(const Expr& a, const Expr& b) {
    return a.kind == b.kind && same_bits(a.value, b.value) && a.param == b.param &&
           a.function == b.function && a.args == b.args;
}

std::uint32_t Circuit::add_register(std::string name, RegisterKind kind, std::uint32_t size) {
    registers.push_back(Register{std::move(name), kind, size});
    return static_cast<std::uint32_t>(registers.size() - 1);
}

std::optional<std::uint32_t> Circuit::find_register(std::string_view name) const {
    for (std::size_t i = 0; i < registers.size(); ++i) {
        if (registers[i].name == name) return static_cast<std::uint32_t>(i);
    }
    return std::nullopt;
}

const GateDef* Circuit::find_gate_def(std::string_view name) const {
    auto it = std::find_if(gate_defs.begin(), gate_defs.end(),
                           [&](const GateDef& g) { return g.name == name; });
    return it == gate_defs.end() ? nullptr : &*it;
}

std::uint32_t Circuit::num_qubits() const {
    std::uint32_t n = 0;
    for (const auto& r : registers) {
        if (r.kind == RegisterKind::quantum) n += r.size;
    }
    return n;
}

std::uint32_t Circuit::num_clbits() const {
    std::uint32_t n = 0;
    for (const auto& r : registers) {
        if (r.kind == RegisterKind::classical) n += r.size;
    }
    return n;
}

std::vector<std::uint32_t> Circuit::wire_offsets() const {
    std::vector<std::uint32_t> offsets(registers.size());
    std::uint32_t q = 0;
    std::uint32_t c = 0;
    for (std::size_t i = 0; i < registers.size(); ++i) {
        auto& counter = registers[i].kind == RegisterKind::quantum ? q : c;
        offsets[i] = counter;
        counter += registers[i].size;
    }
    return offsets;
}

bool operator==(const Circuit& a, const Circuit& b) {
    return a.registers == b.registers && a.gate_defs == b.gate_defs &&
           a.instructions == b.instructions;
}

Instruction make_gate(std::string name, std::vector<double> params, std::vector<WireRef> qubits) {
    Instruction instr;
    instr.opcode = std::move(name);
    instr.params = std::move(params);
    instr.qubits = std::move(qubits);
    return instr;
}

Instruction make_measure(WireRef qubit, WireRef clbit) {
    Instruction instr;
    instr.opcode = "measure";
    instr.qubits = {qubit};
    instr.clbits = {clbit};
    return instr;
}

bool is_directive(std::string_view opcode) noexcept {
    return opcode == "measure" || opcode == "barrier" || opcode == "reset" || opcode == "delay";
}

void validate(const Circuit& circuit) {
    for (std::size_t i = 0; i < circuit.registers.size(); ++i) {
        const Register& r = circuit.registers[i];
        if (r.size == 0) throw CircuitError("register '" + r.name + "' has size 0");
        for (std::size_t j = 0; j < i; ++j) {
            if (circuit.registers[j].name == r.name) {
                throw CircuitError("duplicate register name '" + r.name + "'");
            }
        }
    }
    auto check_ref = [&](const WireRef& ref, RegisterKind kind, const Instruction& instr,
                         std::size_t pos) {
        if (ref.reg >= circuit.registers.size()) {
            throw CircuitError(describe(instr, pos) + " references undeclared register #" +
                               std::to_string(ref.reg));
        }
        const Register& r = circuit.registers[ref.reg];
        if (r.kind != kind) {
            throw CircuitError(describe(instr, pos) + " uses register '" + r.name +
                               "' of the wrong kind");
        }
        if (!ref.whole() && ref.index >= r.size) {
            throw CircuitError(describe(instr, pos) + " index " + std::to_string(ref.index) +
                               " out of range for register '" + r.name + "'");
        }
    };

    for (std::size_t pos = 0; pos < circuit.instructions.size(); ++pos) {
        const Instruction& instr = circuit.instructions[pos];
        for (const auto& q : instr.qubits) check_ref(q, RegisterKind::quantum, instr, pos);
        for (const auto& c : instr.clbits) check_ref(c, RegisterKind::classical, instr, pos);
        if (instr.condition) {
            if (instr.condition->creg >= circuit.registers.size() ||
                circuit.registers[instr.condition->creg].kind != RegisterKind::classical) {
                throw CircuitError(describe(instr, pos) + " has an invalid condition register");
            }
        }

        std::size_t arity = 0;
        std::size_t params = 0;
        std::size_t clbits = 0;
        if (instr.opcode == "measure") {
            arity = 1;
            clbits = 1;
        } else if (instr.opcode == "reset") {
            arity = 1;
        } else if (instr.opcode == "delay") {
            arity = 1;
            params = 1;
            if (instr.params.size() == 1 &&
                (!(instr.params[0] >= 0.0) || instr.params[0] != std::floor(instr.params[0]))) {
                throw CircuitError(describe(instr, pos) +
                                   " needs a nonnegative integer cycle count");
            }
        } else if (instr.opcode == "barrier") {
            if (instr.qubits.empty()) throw CircuitError(describe(instr, pos) + " has no operands");
            if (!instr.params.empty() || !instr.clbits.empty()) {
                throw CircuitError(describe(instr, pos) + " takes only qubit operands");
            }
            continue;
        } else if (const GateDef* def = circuit.find_gate_def(instr.opcode)) {
            arity = def->qubits.size();
            params = def->params.size();
        } else if (const gates::GateSpec* spec = gates::find_gate(instr.opcode)) {
            arity = spec->arity;
            params = spec->param_count;
        } else {
            throw CircuitError(describe(instr, pos) + " uses an undefined gate");
        }
        if (instr.qubits.size() != arity) {
            throw CircuitError(describe(instr, pos) + " expects " + std::to_string(arity) +
                               " qubit operand(s), got " + std::to_string(instr.qubits.size()));
        }
        if (instr.params.size() != params) {
            throw CircuitError(describe(instr, pos) + " expects " + std::to_string(params) +
                               " parameter(s), got " + std::to_string(instr.params.size()));
        }
        if (instr.clbits.size() != clbits) {
            throw CircuitError(describe(instr, pos) + " has a wrong classical operand count");
        }
        for (std::size_t a = 0; a < instr.qubits.size(); ++a) {
            for (std::size_t b = a + 1; b < instr.qubits.size(); ++b) {
                const WireRef& x = instr.qubits[a];
                const WireRef& y = instr.qubits[b];
                if (x.reg == y.reg && (x.index == y.index || x.whole() || y.whole())) {
                    throw CircuitError(describe(instr, pos) + " repeats a qubit operand");
                }
            }
        }
    }
}

}  // namespace qflow::qasm
