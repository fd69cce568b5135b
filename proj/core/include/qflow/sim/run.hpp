// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/device/device.hpp"
#include "qflow/qasm/circuit.hpp"
#include "qflow/sim/density_matrix.hpp"
#include "qflow/sim/stabilizer.hpp"
#include "qflow/sim/statevector.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace qflow::sim {

using Counts = std::map<std::string, std::uint64_t>;

struct RunOptions {
    std::uint64_t seed = 42;
    std::uint64_t shots = 1024;
    /// Attach the final amplitudes (state vector backend, no mid-circuit
    /// measurement).
    bool amplitudes = false;
    /// dm_run: compute fidelity against the noiseless state vector.
    bool fidelity = false;
    /// Record wall time; otherwise wall_time_ms stays 0 so output is
    /// reproducible byte for byte.
    bool timing = false;
};

struct RunResult {
    std::string backend;
    std::uint32_t n_qubits = 0;
    std::uint64_t shots = 0;
    std::uint64_t seed = 0;
    /// Keys list classical bits from the highest global index down to 0.
    Counts counts;
    std::optional<double> fidelity;
    double wall_time_ms = 0.0;
    std::uint64_t mem_bytes_estimate = 0;
    std::optional<std::vector<Complex>> amplitudes;
};

/// Qubit caps; QFLOW_QUBIT_CAP_SV and QFLOW_QUBIT_CAP_DM override the
/// defaults of 26 and 13.
std::uint32_t sv_qubit_cap();
std::uint32_t dm_qubit_cap();
inline constexpr std::uint32_t kStabilizerQubitCap = 10000;

/// Final pure state of a measurement-free prefix: measure instructions are
/// skipped, barrier and delay are identity. Throws BackendError on reset or
/// conditions.
StateVector sv_final_state(const qasm::Circuit& circuit);

/// Final mixed state without measurement, with the noise of `device`
/// (nullptr for noiseless). Resets act as channels; conditions and
/// mid-circuit measurement throw BackendError.
DensityMatrix dm_final_state(const qasm::Circuit& circuit, const device::DeviceConfig* device);

/// Exact distribution over classical register values (index bit c is
/// clbit c) for a circuit whose measurements can all be deferred, after
/// readout confusion. Throws BackendError for mid-circuit measurement or
/// more than 24 classical bits.
std::vector<double> dm_outcome_probabilities(const qasm::Circuit& circuit, const device::DeviceConfig* device);

/// Circuits without classical bits are measured in full at the end.
RunResult sv_run(const qasm::Circuit& circuit, const RunOptions& options);
RunResult dm_run(const qasm::Circuit& circuit, const device::DeviceConfig* device, const RunOptions& options);
RunResult stab_run(const qasm::Circuit& circuit, const RunOptions& options);

/// Tableau after the unitary part of a Clifford circuit (measurements
/// skipped). Throws BackendError naming any non-Clifford instruction.
StabilizerTableau stab_final_tableau(const qasm::Circuit& circuit);

/// Seeded multinomial draw over outcomes 0..probs.size()-1, printed as
/// `width`-bit strings. Throws BackendError on a probability below -1e-9 or
/// a total off 1 by more than 1e-9.
Counts sample_counts(std::span<const double> probs, std::uint32_t width, std::uint64_t shots, std::uint64_t seed);

}  // namespace qflow::sim
