// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/gates/gate_library.hpp"
#include "qflow/qasm/circuit.hpp"

#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace qflow::gates {

/// Angles within this distance of a multiple of pi/2 are snapped onto it.
inline constexpr double kSnapTolerance = 1e-9;
/// |sin(theta/2)| or |cos(theta/2)| below this takes the gimbal-lock branch.
inline constexpr double kGimbalTolerance = 1e-12;

/// Wraps into (-pi, pi] and snaps near-lattice values exactly onto k*pi/2.
double normalize_angle(double angle);

/// True when `angle` is within kSnapTolerance of 0 modulo 2*pi.
bool is_zero_angle(double angle);

/// u = e^{i phase} U(theta, phi, lambda). theta lands in [0, pi].
struct EulerAngles {
    double theta = 0.0;
    double phi = 0.0;
    double lambda = 0.0;
    double phase = 0.0;
};

/// ZYZ Euler extraction. In the degenerate cases (theta ~ 0 or pi) lambda
/// is set to 0 and the whole z rotation is folded into phi.
EulerAngles zyz_angles(const Mat2& u);

/// A gate over local operand slots 0..arity-1.
struct LocalGate {
    std::string name;
    std::vector<double> params;
    std::vector<std::uint32_t> qubits;

    friend bool operator==(const LocalGate&, const LocalGate&) = default;
};

/// Rewrites a builtin gate into {u3, cx}. Single-qubit gates become one u3
/// from their ZYZ angles; wider gates expand through their qelib1 bodies.
std::vector<LocalGate> decompose_local(std::string_view name, std::span<const double> params);

/// Instruction-level wrapper of decompose_local; the condition is copied
/// onto every output instruction. Directives pass through unchanged.
std::vector<qasm::Instruction> decompose_to_u_cx(const qasm::Instruction& instr);

enum class OneQubitFamily { u3, rz_sx_x, rz_rx, rz_ry };

/// Device basis gate vocabulary.
class BasisSet {
  public:
    /// Validates names against the library and requires a supported
    /// single-qubit family plus cx or cz. Throws GateError otherwise.
    static BasisSet from_names(std::span<const std::string> names);

    const std::set<std::string>& one_qubit() const noexcept { return one_qubit_; }
    const std::set<std::string>& two_qubit() const noexcept { return two_qubit_; }
    bool contains(std::string_view name) const;

    OneQubitFamily family() const noexcept { return family_; }
    /// Name used for the u3 family ("u3", "u" or "U").
    const std::string& u3_name() const noexcept { return u3_name_; }
    /// The native entangling gate: "cx" (preferred) or "cz".
    const std::string& entangler() const noexcept { return entangler_; }

  private:
    std::set<std::string> one_qubit_;
    std::set<std::string> two_qubit_;
    OneQubitFamily family_ = OneQubitFamily::u3;
    std::string u3_name_ = "u3";
    std::string entangler_ = "cx";
};

/// Shortest sequence (time order) in the basis family realizing
/// U(theta, phi, lambda) up to global phase. Zero rotations are dropped.
std::vector<LocalGate> retarget_1q_local(double theta, double phi, double lambda,
                                         const BasisSet& basis);

std::vector<qasm::Instruction> retarget_1q(double theta, double phi, double lambda,
                                           const BasisSet& basis, qasm::WireRef qubit);

/// How cx(0,1) is written in the device basis.
struct TwoQubitTemplate {
    std::string gate;
    std::vector<LocalGate> cx_equivalent;
};

TwoQubitTemplate retarget_2q(const BasisSet& basis);

/// cx(0,1) realized with the native entangler acting on (1,0); used when
/// only the reverse direction is coupled.
std::vector<LocalGate> reversed_cx(const BasisSet& basis);

/// Product of a local gate sequence (time order) as a 2^arity matrix.
Matrix compose(std::span<const LocalGate> gates, std::uint32_t arity);

}  // namespace qflow::gates
