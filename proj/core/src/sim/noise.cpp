// SPDX-License-Identifier: Apache-2.0
#include "qflow/sim/noise.hpp"

#include "qflow/error.hpp"

#include <cmath>
#include <string>

namespace qflow::sim {
namespace {

using gates::Complex;

gates::Matrix pauli(int k) {
    gates::Matrix m(2, 2);
    switch (k) {
        case 0: m << 1, 0, 0, 1; break;
        case 1: m << 0, 1, 1, 0; break;
        case 2: m << 0, Complex(0, -1), Complex(0, 1), 0; break;
        default: m << 1, 0, 0, -1; break;
    }
    return m;
}

}  // namespace

KrausSet depolarizing_kraus(double p, std::uint32_t k) {
    if (!(p >= 0.0 && p <= 1.0)) throw BackendError("depolarizing probability " + std::to_string(p) + " outside [0, 1]");
    if (k < 1 || k > 3) throw BackendError("depolarizing channel supports 1 to 3 qubits");
    const std::uint32_t terms = 1u << (2 * k);
    const double w_rest = std::sqrt(p / terms);
    const double w_id = std::sqrt(1.0 - p + p / terms);
    KrausSet out;
    for (std::uint32_t t = 0; t < terms; ++t) {
        // Operand j takes Pauli digit j; Kronecker order puts operand 0 lowest.
        gates::Matrix m = gates::Matrix::Identity(1, 1);
        for (std::uint32_t j = 0; j < k; ++j) {
            const gates::Matrix pj = pauli(static_cast<int>((t >> (2 * j)) & 3u));
            gates::Matrix next(m.rows() * 2, m.cols() * 2);
            for (Eigen::Index r = 0; r < 2; ++r) {
                for (Eigen::Index c = 0; c < 2; ++c) next.block(r * m.rows(), c * m.cols(), m.rows(), m.cols()) = pj(r, c) * m;
            }
            m = next;
        }
        out.push_back((t == 0 ? w_id : w_rest) * m);
    }
    return out;
}

KrausSet thermal_relaxation_kraus(double t_ns, double t1_ns, double t2_ns) {
    if (!(t_ns >= 0.0)) throw BackendError("relaxation time must be non-negative");
    if (!(t1_ns > 0.0) || !(t2_ns > 0.0)) throw BackendError("T1 and T2 must be positive");
    if (t2_ns > 2.0 * t1_ns) {
        throw BackendError("T2 (" + std::to_string(t2_ns) + " ns) exceeds 2*T1 (" + std::to_string(2.0 * t1_ns) + " ns)");
    }
    gates::Matrix id = gates::Matrix::Identity(2, 2);
    if (t_ns == 0.0) return {id};

    const double gamma = std::isinf(t1_ns) ? 0.0 : 1.0 - std::exp(-t_ns / t1_ns);
    // Dephasing on top of what amplitude damping already causes.
    const double rate = (std::isinf(t2_ns) ? 0.0 : 1.0 / t2_ns) - (std::isinf(t1_ns) ? 0.0 : 0.5 / t1_ns);
    const double f = rate <= 0.0 ? 1.0 : std::exp(-t_ns * rate);

    gates::Matrix a0(2, 2);
    a0 << 1, 0, 0, std::sqrt(1.0 - gamma);
    gates::Matrix a1(2, 2);
    a1 << 0, std::sqrt(gamma), 0, 0;
    const double keep = std::sqrt((1.0 + f) / 2.0);
    const double flip = std::sqrt((1.0 - f) / 2.0);
    const gates::Matrix z = pauli(3);

    KrausSet out;
    out.push_back(keep * a0);
    if (flip > 0.0) out.push_back(flip * (z * a0));
    if (gamma > 0.0) {
        out.push_back(keep * a1);
        if (flip > 0.0) out.push_back(flip * (z * a1));
    }
    return out;
}

gates::Matrix kraus_completeness(const KrausSet& kraus) {
    gates::Matrix s = gates::Matrix::Zero(kraus.front().rows(), kraus.front().cols());
    for (const auto& k : kraus) s += k.adjoint() * k;
    return s;
}

}  // namespace qflow::sim
