// SPDX-License-Identifier: Apache-2.0
#include "qflow/error.hpp"
#include "qflow/metrics/metrics.hpp"
#include "qflow/qasm/flatten.hpp"
#include "qflow/transpile/transpile.hpp"

#include <algorithm>
#include <unordered_set>

namespace qflow::transpile {
namespace {

using gates::LocalGate;

class EdgeSet {
  public:
    explicit EdgeSet(const device::DeviceConfig& d) : n_(d.num_qubits) {
        for (const auto& [a, b] : d.coupling_map) edges_.insert(key(a, b));
    }
    bool has(std::uint32_t a, std::uint32_t b) const { return edges_.count(key(a, b)) > 0; }

  private:
    std::uint64_t key(std::uint64_t a, std::uint64_t b) const { return a * n_ + b; }
    std::uint64_t n_;
    std::unordered_set<std::uint64_t> edges_;
};

void emit_local(const std::vector<LocalGate>& seq, std::span<const qasm::WireRef> operands,
                const std::optional<qasm::Condition>& condition, std::vector<qasm::Instruction>& out) {
    for (const LocalGate& g : seq) {
        qasm::Instruction in;
        in.opcode = g.name;
        in.params = g.params;
        for (std::uint32_t k : g.qubits) in.qubits.push_back(operands[k]);
        in.condition = condition;
        out.push_back(std::move(in));
    }
}

struct Retargeter {
    const gates::BasisSet& basis;
    const EdgeSet& edges;
    std::vector<LocalGate> forward;   // cx(0,1) on a native (0,1) edge
    std::vector<LocalGate> backward;  // cx(0,1) when only (1,0) is native

    Retargeter(const gates::BasisSet& b, const EdgeSet& e) : basis(b), edges(e) {
        forward = gates::retarget_2q(b).cx_equivalent;
        if (b.entangler() == "cz") {
            // cz is symmetric: the backward form only flips the cz operands.
            backward = forward;
            for (auto& g : backward) {
                if (g.qubits.size() == 2) g.qubits = {1, 0};
            }
        } else {
            backward = gates::reversed_cx(b);
        }
    }

    void cx(qasm::WireRef a, qasm::WireRef b, const std::optional<qasm::Condition>& cond,
            std::vector<qasm::Instruction>& out) const {
        const std::array<qasm::WireRef, 2> ops{a, b};
        if (edges.has(a.index, b.index)) {
            emit_local(forward, ops, cond, out);
        } else if (edges.has(b.index, a.index)) {
            emit_local(backward, ops, cond, out);
        } else {
            throw TranspileError("cx on uncoupled physical qubits " + std::to_string(a.index) + ", " +
                                 std::to_string(b.index));
        }
    }
};

}  // namespace

qasm::Circuit retarget(const qasm::Circuit& routed, const device::DeviceConfig& device,
                       const gates::BasisSet& basis) {
    const EdgeSet edges(device);
    const Retargeter rt(basis, edges);
    qasm::Circuit out;
    out.registers = routed.registers;
    out.source_name = routed.source_name;
    out.instructions.reserve(routed.instructions.size() * 2);
    for (const qasm::Instruction& in : routed.instructions) {
        if (qasm::is_directive(in.opcode)) {
            out.instructions.push_back(in);
        } else if (in.opcode == "u3") {
            const auto seq = gates::retarget_1q_local(in.params[0], in.params[1], in.params[2], basis);
            emit_local(seq, in.qubits, in.condition, out.instructions);
        } else if (in.opcode == "cx") {
            rt.cx(in.qubits[0], in.qubits[1], in.condition, out.instructions);
        } else if (in.opcode == "swap") {
            qasm::WireRef a = in.qubits[0];
            qasm::WireRef b = in.qubits[1];
            // Orient so that the outer two cx run along a native edge.
            if (!edges.has(a.index, b.index) && edges.has(b.index, a.index)) std::swap(a, b);
            rt.cx(a, b, in.condition, out.instructions);
            rt.cx(b, a, in.condition, out.instructions);
            rt.cx(a, b, in.condition, out.instructions);
        } else {
            throw TranspileError("retarget expects {u3, cx, swap}, found '" + in.opcode + "'");
        }
    }
    return out;
}

qasm::Circuit peephole_1q(const qasm::Circuit& circuit, const gates::BasisSet& basis) {
    const auto offsets = circuit.wire_offsets();
    const std::uint32_t n = circuit.num_qubits();

    struct Run {
        std::vector<qasm::Instruction> gates;
        gates::Mat2 product = gates::Mat2::Identity();
    };
    std::vector<Run> pending(n);

    qasm::Circuit out;
    out.registers = circuit.registers;
    out.source_name = circuit.source_name;
    out.instructions.reserve(circuit.instructions.size());

    auto flush = [&](std::uint32_t q) {
        Run& run = pending[q];
        if (run.gates.empty()) return;
        const gates::EulerAngles e = gates::zyz_angles(run.product);
        const qasm::WireRef wire = run.gates.front().qubits[0];
        if (gates::is_zero_angle(e.theta) && gates::is_zero_angle(e.phi + e.lambda)) {
            // identity up to global phase
        } else {
            auto seq = gates::retarget_1q_local(e.theta, e.phi, e.lambda, basis);
            if (seq.size() <= run.gates.size()) {
                emit_local(seq, std::span<const qasm::WireRef>(&wire, 1), std::nullopt, out.instructions);
            } else {
                for (auto& g : run.gates) out.instructions.push_back(std::move(g));
            }
        }
        run.gates.clear();
        run.product = gates::Mat2::Identity();
    };

    for (const qasm::Instruction& in : circuit.instructions) {
        const bool mergeable = !qasm::is_directive(in.opcode) && in.qubits.size() == 1 && !in.condition;
        if (mergeable) {
            const std::uint32_t q = offsets[in.qubits[0].reg] + in.qubits[0].index;
            const gates::Matrix u = gates::unitary_of(in.opcode, in.params);
            pending[q].product = gates::Mat2(u) * pending[q].product;
            pending[q].gates.push_back(in);
            continue;
        }
        for (const auto& w : in.qubits) {
            if (w.whole()) {
                for (std::uint32_t k = 0; k < circuit.registers[w.reg].size; ++k) flush(offsets[w.reg] + k);
            } else {
                flush(offsets[w.reg] + w.index);
            }
        }
        out.instructions.push_back(in);
    }
    for (std::uint32_t q = 0; q < n; ++q) flush(q);
    return out;
}

Schedule schedule_asap(const qasm::Circuit& circuit, const device::DeviceConfig& device) {
    const auto offsets = circuit.wire_offsets();
    std::vector<double> ready(circuit.num_qubits(), 0.0);
    Schedule s;
    s.start_ns.reserve(circuit.instructions.size());
    s.duration_ns.reserve(circuit.instructions.size());
    std::vector<std::uint32_t> qs;
    for (const qasm::Instruction& in : circuit.instructions) {
        qs.clear();
        for (const auto& w : in.qubits) {
            if (w.whole()) {
                for (std::uint32_t k = 0; k < circuit.registers[w.reg].size; ++k) qs.push_back(offsets[w.reg] + k);
            } else {
                qs.push_back(offsets[w.reg] + w.index);
            }
        }
        double start = 0.0;
        for (std::uint32_t q : qs) start = std::max(start, ready[q]);
        double duration = 0.0;
        if (in.opcode == "barrier") {
            duration = 0.0;
        } else if (in.opcode == "delay") {
            duration = in.params[0] * device.cycle_time_ns;
        } else if (in.opcode == "measure" || in.opcode == "reset") {
            duration = device.find_duration(in.opcode, qs).value_or(0.0);
        } else {
            const auto d = device.find_duration(in.opcode, qs);
            if (!d) {
                throw TranspileError("device '" + device.name + "' has no duration for gate '" + in.opcode + "'");
            }
            duration = *d;
        }
        for (std::uint32_t q : qs) ready[q] = start + duration;
        s.start_ns.push_back(start);
        s.duration_ns.push_back(duration);
        s.makespan_ns = std::max(s.makespan_ns, start + duration);
    }
    return s;
}

TranspileResult transpile(const qasm::Circuit& circuit, const device::DeviceConfig& device,
                          std::uint64_t seed, int opt_level) {
    if (opt_level != 0 && opt_level != 1) throw TranspileError("opt level must be 0 or 1");
    if (circuit.num_qubits() > device.num_qubits) {
        throw TranspileError("too many qubits: circuit has " + std::to_string(circuit.num_qubits()) +
                             ", device '" + device.name + "' has " + std::to_string(device.num_qubits));
    }

    gates::BasisSet basis;
    try {
        basis = gates::BasisSet::from_names(device.basis_gates);
    } catch (const GateError& e) {
        throw TranspileError(e.what());
    }

    TranspileResult r;
    qasm::Circuit lowered;
    std::uint64_t depth_in = 0;
    try {
        const qasm::Circuit flat = qasm::flatten(circuit);
        depth_in = metrics::depth(flat);
        lowered = lower_to_u_cx(flat);
    } catch (const CircuitError& e) {
        throw TranspileError(e.what());
    } catch (const GateError& e) {
        throw TranspileError(e.what());
    }

    r.initial_layout = initial_mapping(lowered, device.topology, seed);
    const Layout trivial = Layout::identity(lowered.num_qubits(), device.num_qubits);
    if (device.topology.connected() &&
        mapping_cost(lowered, trivial, device.topology) < mapping_cost(lowered, r.initial_layout, device.topology)) {
        r.initial_layout = trivial;
    }
    RouteResult routed = route(lowered, r.initial_layout, device.topology, seed);
    r.final_layout = routed.final_layout;
    r.circuit = retarget(routed.circuit, device, basis);
    routed.circuit = qasm::Circuit{};
    if (opt_level >= 1) r.circuit = peephole_1q(r.circuit, basis);
    r.schedule = schedule_asap(r.circuit, device);

    const metrics::MetricsReport m = metrics::analyze(r.circuit);
    TranspileReport& rep = r.report;
    rep.basis_histogram = m.basis_histogram;
    rep.n_1q = m.n_1q;
    rep.n_2q = m.n_2q;
    rep.n_swap = routed.swaps;
    rep.depth_in = depth_in;
    rep.depth_out = m.depth;
    rep.layout_initial = r.initial_layout.logical_view();
    rep.layout_final = r.final_layout.logical_view();
    rep.makespan_ns = r.schedule.makespan_ns;
    return r;
}

}  // namespace qflow::transpile
