// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/qasm/circuit.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace qflow::metrics {

/// Circuit statistics over unit-duration ASAP layers.
///
///   depth                  number of layers; barriers synchronize their qubits
///                          and take no layer
///   gate_density           n_gates / (depth * n_qubits)
///   retention_lifespan     max over active qubits of (last - first + 1) / depth
///   entanglement_variance  population variance over all qubits of the number of
///                          two-qubit gates touching each qubit
///   measurement_density    n_measure / n_qubits
///
/// Barriers are not counted as gates. Everything else (including measure,
/// reset, delay and three-qubit gates) is.
struct MetricsReport {
    std::uint32_t n_qubits = 0;
    std::uint64_t n_gates = 0;
    std::uint64_t n_1q = 0;
    std::uint64_t n_2q = 0;
    std::uint64_t n_measure = 0;
    std::uint64_t n_other = 0;
    std::uint64_t depth = 0;
    double gate_density = 0.0;
    double retention_lifespan = 0.0;
    double entanglement_variance = 0.0;
    double measurement_density = 0.0;
    std::map<std::string, std::uint64_t> basis_histogram;
};

/// Requires a flat circuit (see qasm::flatten); throws CircuitError otherwise.
MetricsReport analyze(const qasm::Circuit& circuit);

/// Unit-duration ASAP depth alone.
std::uint64_t depth(const qasm::Circuit& circuit);

}  // namespace qflow::metrics
