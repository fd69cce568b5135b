// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/gates/gate_library.hpp"

#include <vector>

namespace qflow::sim {

using KrausSet = std::vector<gates::Matrix>;

/// rho -> (1 - p) rho + p I/2^k on k qubits, as 4^k scaled Pauli products.
/// Throws BackendError unless 0 <= p <= 1 and 1 <= k <= 3.
KrausSet depolarizing_kraus(double p, std::uint32_t k);

/// Amplitude damping with gamma = 1 - e^{-t/T1} followed by the pure
/// dephasing that brings the coherence factor to e^{-t/T2}. Infinite T1 or
/// T2 mean no decay of that kind. t = 0 gives the single identity operator;
/// operators with zero weight are omitted. Throws BackendError when
/// T2 > 2 T1, t < 0, or a time constant is not positive.
KrausSet thermal_relaxation_kraus(double t_ns, double t1_ns, double t2_ns);

/// Sum of K^dagger K, for completeness checks.
gates::Matrix kraus_completeness(const KrausSet& kraus);

}  // namespace qflow::sim
