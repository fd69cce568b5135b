// SPDX-License-Identifier: Apache-2.0
#include "qflow/qasm/flatten.hpp"

#include "qflow/error.hpp"
#include "qflow/gates/gate_library.hpp"

#include <unordered_map>

namespace qflow::qasm {
namespace {

class Flattener {
  public:
    explicit Flattener(const Circuit& in) : in_(in) {
        for (std::size_t i = 0; i < in.gate_defs.size(); ++i) defs_[in.gate_defs[i].name] = i;
        out_.registers = in.registers;
        out_.source_name = in.source_name;
        out_.instructions.reserve(in.instructions.size());
    }

    Circuit run() {
        for (const Instruction& instr : in_.instructions) top_level(instr);
        return std::move(out_);
    }

  private:
    const GateDef* user_def(std::string_view name) const {
        auto it = defs_.find(std::string(name));
        return it == defs_.end() ? nullptr : &in_.gate_defs[it->second];
    }

    void top_level(const Instruction& instr) {
        if (instr.opcode == "barrier") {
            Instruction b = instr;
            b.qubits.clear();
            for (const WireRef& q : instr.qubits) {
                if (q.whole()) {
                    for (std::uint32_t i = 0; i < in_.registers[q.reg].size; ++i) {
                        b.qubits.push_back({q.reg, i});
                    }
                } else {
                    b.qubits.push_back(q);
                }
            }
            out_.instructions.push_back(std::move(b));
            return;
        }

        std::uint32_t broadcast = 1;
        bool any_whole = false;
        for (const WireRef& q : instr.qubits) {
            if (q.whole()) {
                broadcast = in_.registers[q.reg].size;
                any_whole = true;
            }
        }
        for (const WireRef& c : instr.clbits) {
            if (c.whole()) any_whole = true;
        }
        if (!any_whole) {
            emit(instr, 0);
            return;
        }
        for (std::uint32_t k = 0; k < broadcast; ++k) {
            Instruction one = instr;
            for (WireRef& q : one.qubits) {
                if (q.whole()) q.index = k;
            }
            for (WireRef& c : one.clbits) {
                if (c.whole()) c.index = k;
            }
            emit(one, 0);
        }
    }

    void emit(const Instruction& instr, int depth) {
        if (depth > kMaxMacroDepth) {
            throw CircuitError("macro expansion of '" + instr.opcode +
                               "' exceeded the recursion limit of " +
                               std::to_string(kMaxMacroDepth));
        }
        const GateDef* def = user_def(instr.opcode);
        if (!def) {
            if (!is_directive(instr.opcode) && !gates::find_gate(instr.opcode)) {
                throw CircuitError("undefined gate '" + instr.opcode + "'");
            }
            out_.instructions.push_back(instr);
            return;
        }
        if (def->opaque) {
            throw CircuitError("cannot flatten call to opaque gate '" + def->name + "'");
        }
        if (instr.params.size() != def->params.size() || instr.qubits.size() != def->qubits.size()) {
            throw CircuitError("call to '" + def->name + "' does not match its signature");
        }
        for (const GateCall& call : def->body) {
            Instruction sub;
            sub.opcode = call.name;
            sub.params.reserve(call.params.size());
            for (const Expr& e : call.params) sub.params.push_back(e.evaluate(instr.params));
            sub.qubits.reserve(call.qubits.size());
            for (std::uint32_t formal : call.qubits) sub.qubits.push_back(instr.qubits[formal]);
            sub.condition = instr.condition;
            if (sub.opcode == "barrier") {
                out_.instructions.push_back(std::move(sub));
            } else {
                emit(sub, depth + 1);
            }
        }
    }

    const Circuit& in_;
    Circuit out_;
    std::unordered_map<std::string, std::size_t> defs_;
};

}  // namespace

Circuit flatten(const Circuit& circuit) { return Flattener(circuit).run(); }

bool is_flat(const Circuit& circuit) {
    if (!circuit.gate_defs.empty()) return false;
    for (const Instruction& instr : circuit.instructions) {
        if (!is_directive(instr.opcode) && !gates::find_gate(instr.opcode)) return false;
        for (const WireRef& q : instr.qubits) {
            if (q.whole()) return false;
        }
        for (const WireRef& c : instr.clbits) {
            if (c.whole()) return false;
        }
    }
    return true;
}

}  // namespace qflow::qasm
