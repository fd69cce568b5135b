// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>

namespace qflow::gates {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Mat2 = Eigen::Matrix2cd;

/// Entry of the builtin gate library.
///
/// Matrices use little-endian operand order: operand k contributes bit k of
/// the local basis index, so for `cx a,b` the control `a` is the least
/// significant bit.
struct GateSpec {
    std::string_view name;
    std::uint8_t arity = 1;
    std::uint8_t param_count = 0;
    /// Parameter-free Clifford gate. Parameterized gates are never flagged;
    /// the stabilizer backend snaps their angles separately.
    bool is_clifford = false;
    std::array<std::string_view, 3> param_names{};
    /// qelib1-style body `{ ... }` in terms of earlier gates; empty for the
    /// primitives U and CX.
    std::string_view definition;
};

/// All builtin gates in definition order (U, CX first).
std::span<const GateSpec> library() noexcept;

const GateSpec* find_gate(std::string_view name) noexcept;

/// Throws GateError for unknown names.
const GateSpec& require_gate(std::string_view name);

/// Unitary of a builtin gate. Throws GateError on a parameter-count mismatch.
Matrix unitary_of(const GateSpec& gate, std::span<const double> params);
Matrix unitary_of(std::string_view name, std::span<const double> params);

/// U(theta, phi, lambda) under the OpenQASM 2.0 convention.
Mat2 u3_matrix(double theta, double phi, double lambda);

/// True when `a = e^{i alpha} b` for some alpha, elementwise within `tol`.
bool equal_up_to_phase(const Matrix& a, const Matrix& b, double tol);

/// The qelib1.inc text matching this library (everything except U and CX).
std::string qelib1_source();

}  // namespace qflow::gates
