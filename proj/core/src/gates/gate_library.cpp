// SPDX-License-Identifier: Apache-2.0
#include "qflow/gates/gate_library.hpp"

#include "qflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qflow::gates {
namespace {

constexpr Complex kI{0.0, 1.0};

// clang-format off
constexpr GateSpec kLibrary[] = {
    {"U",     1, 3, false, {"theta", "phi", "lambda"}, ""},
    {"CX",    2, 0, true,  {}, ""},
    {"u3",    1, 3, false, {"theta", "phi", "lambda"}, "{ U(theta,phi,lambda) q0; }"},
    {"u2",    1, 2, false, {"phi", "lambda"}, "{ U(pi/2,phi,lambda) q0; }"},
    {"u1",    1, 1, false, {"lambda"}, "{ U(0,0,lambda) q0; }"},
    {"u",     1, 3, false, {"theta", "phi", "lambda"}, "{ U(theta,phi,lambda) q0; }"},
    {"p",     1, 1, false, {"lambda"}, "{ U(0,0,lambda) q0; }"},
    {"cx",    2, 0, true,  {}, "{ CX q0,q1; }"},
    {"id",    1, 0, true,  {}, "{ U(0,0,0) q0; }"},
    {"u0",    1, 1, false, {"gamma"}, "{ U(0,0,0) q0; }"},
    {"x",     1, 0, true,  {}, "{ u3(pi,0,pi) q0; }"},
    {"y",     1, 0, true,  {}, "{ u3(pi,pi/2,pi/2) q0; }"},
    {"z",     1, 0, true,  {}, "{ u1(pi) q0; }"},
    {"h",     1, 0, true,  {}, "{ u2(0,pi) q0; }"},
    {"s",     1, 0, true,  {}, "{ u1(pi/2) q0; }"},
    {"sdg",   1, 0, true,  {}, "{ u1(-pi/2) q0; }"},
    {"t",     1, 0, false, {}, "{ u1(pi/4) q0; }"},
    {"tdg",   1, 0, false, {}, "{ u1(-pi/4) q0; }"},
    {"sx",    1, 0, true,  {}, "{ sdg q0; h q0; sdg q0; }"},
    {"sxdg",  1, 0, true,  {}, "{ s q0; h q0; s q0; }"},
    {"rx",    1, 1, false, {"theta"}, "{ u3(theta,-pi/2,pi/2) q0; }"},
    {"ry",    1, 1, false, {"theta"}, "{ u3(theta,0,0) q0; }"},
    {"rz",    1, 1, false, {"phi"}, "{ u1(phi) q0; }"},
    {"cz",    2, 0, true,  {}, "{ h q1; cx q0,q1; h q1; }"},
    {"cy",    2, 0, true,  {}, "{ sdg q1; cx q0,q1; s q1; }"},
    {"swap",  2, 0, true,  {}, "{ cx q0,q1; cx q1,q0; cx q0,q1; }"},
    {"ch",    2, 0, false, {}, "{ h q1; sdg q1; cx q0,q1; h q1; t q1; cx q0,q1; t q1; h q1; s q1; x q1; s q0; }"},
    {"ccx",   3, 0, false, {}, "{ h q2; cx q1,q2; tdg q2; cx q0,q2; t q2; cx q1,q2; tdg q2; cx q0,q2; t q1; t q2; h q2; cx q0,q1; t q0; tdg q1; cx q0,q1; }"},
    {"cswap", 3, 0, false, {}, "{ cx q2,q1; ccx q0,q1,q2; cx q2,q1; }"},
    {"crx",   2, 1, false, {"lambda"}, "{ u1(pi/2) q1; cx q0,q1; u3(-lambda/2,0,0) q1; cx q0,q1; u3(lambda/2,-pi/2,0) q1; }"},
    {"cry",   2, 1, false, {"lambda"}, "{ ry(lambda/2) q1; cx q0,q1; ry(-lambda/2) q1; cx q0,q1; }"},
    {"crz",   2, 1, false, {"lambda"}, "{ rz(lambda/2) q1; cx q0,q1; rz(-lambda/2) q1; cx q0,q1; }"},
    {"cu1",   2, 1, false, {"lambda"}, "{ u1(lambda/2) q0; cx q0,q1; u1(-lambda/2) q1; cx q0,q1; u1(lambda/2) q1; }"},
    {"cu3",   2, 3, false, {"theta", "phi", "lambda"}, "{ u1((lambda+phi)/2) q0; u1((lambda-phi)/2) q1; cx q0,q1; u3(-theta/2,0,-(phi+lambda)/2) q1; cx q0,q1; u3(theta/2,phi,0) q1; }"},
    {"rxx",   2, 1, false, {"theta"}, "{ u3(pi/2,theta,0) q0; h q1; cx q0,q1; u1(-theta) q1; cx q0,q1; h q1; u2(-pi,pi-theta) q0; }"},
    {"rzz",   2, 1, false, {"theta"}, "{ cx q0,q1; u1(theta) q1; cx q0,q1; }"},
};
// clang-format on

Mat2 diag2(Complex a, Complex b) {
    Mat2 m;
    m << a, 0.0, 0.0, b;
    return m;
}

// Control on operand 0 (low bit), target on operand 1.
Matrix controlled(const Mat2& u) {
    Matrix m = Matrix::Identity(4, 4);
    m(1, 1) = u(0, 0);
    m(1, 3) = u(0, 1);
    m(3, 1) = u(1, 0);
    m(3, 3) = u(1, 1);
    return m;
}

Matrix permutation(int dim, std::initializer_list<std::pair<int, int>> swaps) {
    Matrix m = Matrix::Identity(dim, dim);
    for (auto [a, b] : swaps) {
        m(a, a) = 0.0;
        m(b, b) = 0.0;
        m(a, b) = 1.0;
        m(b, a) = 1.0;
    }
    return m;
}

Mat2 one_qubit(std::string_view name, std::span<const double> p) {
    using std::numbers::pi;
    const double r = 1.0 / std::sqrt(2.0);
    Mat2 m;
    if (name == "U" || name == "u3" || name == "u") return u3_matrix(p[0], p[1], p[2]);
    if (name == "u2") return u3_matrix(pi / 2, p[0], p[1]);
    if (name == "u1" || name == "p") return diag2(1.0, std::polar(1.0, p[0]));
    if (name == "id" || name == "u0") return Mat2::Identity();
    if (name == "x") {
        m << 0.0, 1.0, 1.0, 0.0;
        return m;
    }
    if (name == "y") {
        m << 0.0, -kI, kI, 0.0;
        return m;
    }
    if (name == "z") return diag2(1.0, -1.0);
    if (name == "h") {
        m << r, r, r, -r;
        return m;
    }
    if (name == "s") return diag2(1.0, kI);
    if (name == "sdg") return diag2(1.0, -kI);
    if (name == "t") return diag2(1.0, std::polar(1.0, pi / 4));
    if (name == "tdg") return diag2(1.0, std::polar(1.0, -pi / 4));
    if (name == "sx") {
        m << Complex(0.5, 0.5), Complex(0.5, -0.5), Complex(0.5, -0.5), Complex(0.5, 0.5);
        return m;
    }
    if (name == "sxdg") {
        m << Complex(0.5, -0.5), Complex(0.5, 0.5), Complex(0.5, 0.5), Complex(0.5, -0.5);
        return m;
    }
    const double c = std::cos(p.empty() ? 0.0 : p[0] / 2);
    const double s = std::sin(p.empty() ? 0.0 : p[0] / 2);
    if (name == "rx") {
        m << c, -kI * s, -kI * s, c;
        return m;
    }
    if (name == "ry") {
        m << c, -s, s, c;
        return m;
    }
    if (name == "rz") return diag2(std::polar(1.0, -p[0] / 2), std::polar(1.0, p[0] / 2));
    throw GateError("no single-qubit matrix for gate '" + std::string(name) + "'");
}

}  // namespace

std::span<const GateSpec> library() noexcept { return kLibrary; }

const GateSpec* find_gate(std::string_view name) noexcept {
    auto it = std::find_if(std::begin(kLibrary), std::end(kLibrary),
                           [&](const GateSpec& g) { return g.name == name; });
    return it == std::end(kLibrary) ? nullptr : &*it;
}

const GateSpec& require_gate(std::string_view name) {
    if (const GateSpec* g = find_gate(name)) return *g;
    throw GateError("unknown gate '" + std::string(name) + "'");
}

Mat2 u3_matrix(double theta, double phi, double lambda) {
    const double c = std::cos(theta / 2);
    const double s = std::sin(theta / 2);
    Mat2 m;
    m << c, -std::polar(1.0, lambda) * s, std::polar(1.0, phi) * s, std::polar(1.0, phi + lambda) * c;
    return m;
}

Matrix unitary_of(const GateSpec& gate, std::span<const double> params) {
    if (params.size() != gate.param_count) {
        throw GateError("gate '" + std::string(gate.name) + "' expects " +
                        std::to_string(gate.param_count) + " parameter(s), got " +
                        std::to_string(params.size()));
    }
    const std::string_view n = gate.name;
    if (gate.arity == 1) return one_qubit(n, params);
    if (n == "CX" || n == "cx") return controlled(one_qubit("x", {}));
    if (n == "cz") return controlled(one_qubit("z", {}));
    if (n == "cy") return controlled(one_qubit("y", {}));
    if (n == "ch") return controlled(one_qubit("h", {}));
    if (n == "crx") return controlled(one_qubit("rx", params));
    if (n == "cry") return controlled(one_qubit("ry", params));
    if (n == "crz") return controlled(one_qubit("rz", params));
    if (n == "cu1") return controlled(one_qubit("u1", params));
    if (n == "cu3") return controlled(u3_matrix(params[0], params[1], params[2]));
    if (n == "swap") return permutation(4, {{1, 2}});
    if (n == "rxx") {
        const double c = std::cos(params[0] / 2);
        const Complex s = -kI * std::sin(params[0] / 2);
        Matrix m = Matrix::Zero(4, 4);
        for (int i = 0; i < 4; ++i) {
            m(i, i) = c;
            m(i, 3 - i) = s;
        }
        return m;
    }
    if (n == "rzz") {
        const Complex a = std::polar(1.0, -params[0] / 2);
        const Complex b = std::polar(1.0, params[0] / 2);
        Matrix m = Matrix::Zero(4, 4);
        m(0, 0) = a;
        m(1, 1) = b;
        m(2, 2) = b;
        m(3, 3) = a;
        return m;
    }
    if (n == "ccx") return permutation(8, {{3, 7}});
    if (n == "cswap") return permutation(8, {{3, 5}});
    throw GateError("no matrix for gate '" + std::string(n) + "'");
}

Matrix unitary_of(std::string_view name, std::span<const double> params) {
    return unitary_of(require_gate(name), params);
}

bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    Eigen::Index r = 0;
    Eigen::Index c = 0;
    b.cwiseAbs().maxCoeff(&r, &c);
    if (std::abs(b(r, c)) < tol) return (a - b).cwiseAbs().maxCoeff() <= tol;
    if (std::abs(a(r, c)) < tol) return false;
    const Complex phase = a(r, c) / b(r, c);
    const Complex unit = phase / std::abs(phase);
    return (a - unit * b).cwiseAbs().maxCoeff() <= tol;
}

std::string qelib1_source() {
    std::string out = "// qelib1.inc (builtin copy)\n";
    for (const GateSpec& g : kLibrary) {
        if (g.definition.empty()) continue;
        out += "gate ";
        out += g.name;
        if (g.param_count > 0) {
            out += '(';
            for (std::size_t i = 0; i < g.param_count; ++i) {
                if (i) out += ',';
                out += g.param_names[i];
            }
            out += ')';
        }
        for (std::size_t i = 0; i < g.arity; ++i) {
            out += i ? ",q" : " q";
            out += std::to_string(i);
        }
        out += ' ';
        out += g.definition;
        out += '\n';
    }
    return out;
}

}  // namespace qflow::gates
