// SPDX-License-Identifier: Apache-2.0
#include "qflow/gates/decompose.hpp"

#include "qflow/error.hpp"
#include "qflow/qasm/parser.hpp"

#include <cmath>
#include <numbers>

namespace qflow::gates {
namespace {

using std::numbers::pi;

const qasm::Circuit& qelib1_defs() {
    static const qasm::Circuit defs = [] {
        qasm::ParseOptions options;
        options.builtin_gates = false;
        options.source_name = "qelib1.inc";
        return qasm::parse_qasm("OPENQASM 2.0;\n" + qelib1_source(), options);
    }();
    return defs;
}

void expand(std::string_view name, std::span<const double> params,
            std::span<const std::uint32_t> qubits, std::vector<LocalGate>& out) {
    if (name == "cx" || name == "CX") {
        out.push_back({"cx", {}, {qubits[0], qubits[1]}});
        return;
    }
    const GateSpec& spec = require_gate(name);
    if (params.size() != spec.param_count) {
        throw GateError("gate '" + std::string(name) + "' expects " +
                        std::to_string(spec.param_count) + " parameter(s)");
    }
    if (spec.arity == 1) {
        const EulerAngles e = zyz_angles(unitary_of(spec, params));
        out.push_back({"u3", {e.theta, e.phi, e.lambda}, {qubits[0]}});
        return;
    }
    const qasm::GateDef* def = qelib1_defs().find_gate_def(name);
    if (!def) throw GateError("no decomposition for gate '" + std::string(name) + "'");
    for (const qasm::GateCall& call : def->body) {
        std::vector<double> sub_params;
        sub_params.reserve(call.params.size());
        for (const qasm::Expr& e : call.params) sub_params.push_back(e.evaluate(params));
        std::vector<std::uint32_t> sub_qubits;
        sub_qubits.reserve(call.qubits.size());
        for (std::uint32_t formal : call.qubits) sub_qubits.push_back(qubits[formal]);
        expand(call.name, sub_params, sub_qubits, out);
    }
}

LocalGate rz(double angle) { return {"rz", {normalize_angle(angle)}, {0}}; }

void push_rz(std::vector<LocalGate>& out, double angle) {
    if (!is_zero_angle(angle)) out.push_back(rz(angle));
}

// Embeds a k-qubit matrix acting on `targets` into an n-qubit operator.
Matrix embed(const Matrix& g, std::span<const std::uint32_t> targets, std::uint32_t n) {
    const Eigen::Index dim = Eigen::Index{1} << n;
    const Eigen::Index k = static_cast<Eigen::Index>(targets.size());
    Matrix out = Matrix::Zero(dim, dim);
    for (Eigen::Index col = 0; col < dim; ++col) {
        Eigen::Index local_col = 0;
        for (Eigen::Index t = 0; t < k; ++t) local_col |= ((col >> targets[t]) & 1) << t;
        for (Eigen::Index local_row = 0; local_row < (Eigen::Index{1} << k); ++local_row) {
            Eigen::Index row = col;
            for (Eigen::Index t = 0; t < k; ++t) {
                row &= ~(Eigen::Index{1} << targets[t]);
                row |= ((local_row >> t) & 1) << targets[t];
            }
            out(row, col) = g(local_row, local_col);
        }
    }
    return out;
}

}  // namespace

double normalize_angle(double angle) {
    double a = std::remainder(angle, 2 * pi);
    const double quarter = pi / 2;
    const double k = std::round(a / quarter);
    if (std::abs(a - k * quarter) < kSnapTolerance) a = k * quarter;
    if (a <= -pi) a = pi;
    return a;
}

bool is_zero_angle(double angle) { return normalize_angle(angle) == 0.0; }

EulerAngles zyz_angles(const Mat2& u) {
    const double c = std::abs(u(0, 0));
    const double s = std::abs(u(1, 0));
    EulerAngles e;
    e.theta = 2 * std::atan2(s, c);
    const double half_sin = std::sin(e.theta / 2);
    const double half_cos = std::cos(e.theta / 2);
    if (std::abs(half_sin) < kGimbalTolerance) {
        e.theta = 0.0;
        e.phase = std::arg(u(0, 0));
        e.phi = std::arg(u(1, 1)) - e.phase;
        e.lambda = 0.0;
    } else if (std::abs(half_cos) < kGimbalTolerance) {
        e.theta = pi;
        e.phase = std::arg(-u(0, 1));
        e.phi = std::arg(u(1, 0)) - e.phase;
        e.lambda = 0.0;
    } else {
        e.phase = std::arg(u(0, 0));
        e.phi = std::arg(u(1, 0)) - e.phase;
        e.lambda = std::arg(-u(0, 1)) - e.phase;
    }
    e.theta = normalize_angle(e.theta);
    e.phi = normalize_angle(e.phi);
    e.lambda = normalize_angle(e.lambda);
    return e;
}

std::vector<LocalGate> decompose_local(std::string_view name, std::span<const double> params) {
    const GateSpec& spec = require_gate(name);
    std::vector<std::uint32_t> qubits(spec.arity);
    for (std::uint32_t i = 0; i < spec.arity; ++i) qubits[i] = i;
    std::vector<LocalGate> out;
    expand(name, params, qubits, out);
    return out;
}

std::vector<qasm::Instruction> decompose_to_u_cx(const qasm::Instruction& instr) {
    if (qasm::is_directive(instr.opcode)) return {instr};
    std::vector<qasm::Instruction> out;
    for (const LocalGate& g : decompose_local(instr.opcode, instr.params)) {
        qasm::Instruction sub;
        sub.opcode = g.name;
        sub.params = g.params;
        for (std::uint32_t q : g.qubits) sub.qubits.push_back(instr.qubits[q]);
        sub.condition = instr.condition;
        out.push_back(std::move(sub));
    }
    return out;
}

BasisSet BasisSet::from_names(std::span<const std::string> names) {
    BasisSet b;
    for (const std::string& name : names) {
        if (qasm::is_directive(name)) continue;
        const GateSpec* spec = find_gate(name);
        if (!spec) throw GateError("basis gate '" + name + "' is not in the gate library");
        if (spec->arity == 1) {
            b.one_qubit_.insert(name);
        } else if (spec->arity == 2) {
            b.two_qubit_.insert(name);
        } else {
            throw GateError("basis gate '" + name + "' acts on more than two qubits");
        }
    }
    if (b.one_qubit_.empty() && b.two_qubit_.empty()) throw GateError("empty basis gate set");

    auto has = [&](const char* n) { return b.one_qubit_.count(n) > 0; };
    if (has("u3") || has("u") || has("U")) {
        b.family_ = OneQubitFamily::u3;
        b.u3_name_ = has("u3") ? "u3" : has("u") ? "u" : "U";
    } else if (has("rz") && has("sx")) {
        b.family_ = OneQubitFamily::rz_sx_x;
    } else if (has("rz") && has("rx")) {
        b.family_ = OneQubitFamily::rz_rx;
    } else if (has("rz") && has("ry")) {
        b.family_ = OneQubitFamily::rz_ry;
    } else {
        throw GateError(
            "unsupported basis: single-qubit gates must include u3, {rz,sx}, {rz,rx} or {rz,ry}");
    }

    if (b.two_qubit_.count("cx")) {
        b.entangler_ = "cx";
    } else if (b.two_qubit_.count("CX")) {
        b.entangler_ = "CX";
    } else if (b.two_qubit_.count("cz")) {
        b.entangler_ = "cz";
    } else {
        throw GateError("unsupported basis: two-qubit gates must include cx or cz");
    }
    return b;
}

bool BasisSet::contains(std::string_view name) const {
    const std::string key(name);
    return one_qubit_.count(key) > 0 || two_qubit_.count(key) > 0;
}

std::vector<LocalGate> retarget_1q_local(double theta, double phi, double lambda,
                                         const BasisSet& basis) {
    theta = normalize_angle(theta);
    phi = normalize_angle(phi);
    lambda = normalize_angle(lambda);
    // U(-t, p, l) == U(t, p + pi, l + pi) exactly.
    if (theta < 0) {
        theta = -theta;
        phi = normalize_angle(phi + pi);
        lambda = normalize_angle(lambda + pi);
    }

    std::vector<LocalGate> out;
    const bool flat = theta == 0.0;
    switch (basis.family()) {
        case OneQubitFamily::u3:
            out.push_back({basis.u3_name(), {theta, phi, lambda}, {0}});
            break;
        case OneQubitFamily::rz_sx_x:
            if (flat) {
                push_rz(out, phi + lambda);
            } else if (theta == pi / 2) {
                push_rz(out, lambda - pi / 2);
                out.push_back({"sx", {}, {0}});
                push_rz(out, phi + pi / 2);
            } else if (theta == pi && basis.contains("x")) {
                out.push_back({"x", {}, {0}});
                push_rz(out, phi - lambda + pi);
            } else {
                push_rz(out, lambda);
                out.push_back({"sx", {}, {0}});
                push_rz(out, theta + pi);
                out.push_back({"sx", {}, {0}});
                push_rz(out, phi + pi);
            }
            break;
        case OneQubitFamily::rz_rx:
            if (flat) {
                push_rz(out, phi + lambda);
            } else {
                push_rz(out, lambda - pi / 2);
                out.push_back({"rx", {theta}, {0}});
                push_rz(out, phi + pi / 2);
            }
            break;
        case OneQubitFamily::rz_ry:
            if (flat) {
                push_rz(out, phi + lambda);
            } else {
                push_rz(out, lambda);
                out.push_back({"ry", {theta}, {0}});
                push_rz(out, phi);
            }
            break;
    }
    return out;
}

std::vector<qasm::Instruction> retarget_1q(double theta, double phi, double lambda,
                                           const BasisSet& basis, qasm::WireRef qubit) {
    std::vector<qasm::Instruction> out;
    for (LocalGate& g : retarget_1q_local(theta, phi, lambda, basis)) {
        out.push_back(qasm::make_gate(std::move(g.name), std::move(g.params), {qubit}));
    }
    return out;
}

TwoQubitTemplate retarget_2q(const BasisSet& basis) {
    TwoQubitTemplate t;
    t.gate = basis.entangler();
    if (t.gate != "cz") {
        t.cx_equivalent.push_back({t.gate, {}, {0, 1}});
        return t;
    }
    auto h = retarget_1q_local(pi / 2, 0.0, pi, basis);
    for (auto& g : h) g.qubits = {1};
    t.cx_equivalent = h;
    t.cx_equivalent.push_back({"cz", {}, {0, 1}});
    t.cx_equivalent.insert(t.cx_equivalent.end(), h.begin(), h.end());
    return t;
}

std::vector<LocalGate> reversed_cx(const BasisSet& basis) {
    if (basis.entangler() == "cz") {
        auto h = retarget_1q_local(pi / 2, 0.0, pi, basis);
        for (auto& g : h) g.qubits = {1};
        std::vector<LocalGate> out = h;
        out.push_back({"cz", {}, {1, 0}});
        out.insert(out.end(), h.begin(), h.end());
        return out;
    }
    const auto h = retarget_1q_local(pi / 2, 0.0, pi, basis);
    std::vector<LocalGate> layer;
    for (std::uint32_t q : {0u, 1u}) {
        for (LocalGate g : h) {
            g.qubits = {q};
            layer.push_back(std::move(g));
        }
    }
    std::vector<LocalGate> out = layer;
    out.push_back({basis.entangler(), {}, {1, 0}});
    out.insert(out.end(), layer.begin(), layer.end());
    return out;
}

Matrix compose(std::span<const LocalGate> gates, std::uint32_t arity) {
    const Eigen::Index dim = Eigen::Index{1} << arity;
    Matrix total = Matrix::Identity(dim, dim);
    for (const LocalGate& g : gates) {
        total = embed(unitary_of(g.name, g.params), g.qubits, arity) * total;
    }
    return total;
}

}  // namespace qflow::gates
