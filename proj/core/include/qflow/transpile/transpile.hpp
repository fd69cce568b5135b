// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/device/device.hpp"
#include "qflow/gates/decompose.hpp"
#include "qflow/qasm/circuit.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace qflow::transpile {

/// Logical-to-physical assignment. `l2p` always has one entry per physical
/// qubit: entries below `n_logical` are the circuit's qubits, the rest are
/// placeholders for idle physical qubits so the map stays a permutation
/// while swaps move things around.
struct Layout {
    std::vector<std::uint32_t> l2p;
    std::uint32_t n_logical = 0;

    static Layout identity(std::uint32_t n_logical, std::uint32_t n_physical);

    std::uint32_t n_physical() const noexcept { return static_cast<std::uint32_t>(l2p.size()); }
    std::vector<std::uint32_t> p2l() const;
    /// Physical positions of the circuit's own qubits.
    std::vector<std::uint32_t> logical_view() const;
    /// True when l2p is a permutation of 0..n_physical-1.
    bool is_permutation() const;

    friend bool operator==(const Layout&, const Layout&) = default;
};

struct Schedule {
    std::vector<double> start_ns;
    std::vector<double> duration_ns;
    double makespan_ns = 0.0;
};

struct TranspileReport {
    std::map<std::string, std::uint64_t> basis_histogram;
    std::uint64_t n_1q = 0;
    std::uint64_t n_2q = 0;
    std::uint64_t n_swap = 0;
    std::uint64_t depth_in = 0;
    std::uint64_t depth_out = 0;
    std::vector<std::uint32_t> layout_initial;
    std::vector<std::uint32_t> layout_final;
    double makespan_ns = 0.0;
};

struct TranspileResult {
    qasm::Circuit circuit;
    TranspileReport report;
    Layout initial_layout;
    Layout final_layout;
    Schedule schedule;
};

/// Flattens, renumbers all qubits into one register `q` (classical
/// registers keep their order) and rewrites every gate into {u3, cx}.
qasm::Circuit lower_to_u_cx(const qasm::Circuit& circuit);

/// Greedy interaction-graph placement. Logical qubits are ranked by their
/// two-qubit gate count; the first goes to the physical qubit of highest
/// degree, and each following one (preferring qubits that already have a
/// placed partner) takes the free physical qubit minimizing the summed
/// distance to its placed partners. Ties go to the lower physical index.
/// Circuits without two-qubit gates get the identity layout. `seed` is
/// accepted for interface stability; every choice is deterministic.
Layout initial_mapping(const qasm::Circuit& circuit, const device::Topology& topology,
                       std::uint64_t seed);

/// Sum over two-qubit gates of the hop distance between their placed
/// operands; the routing pressure of a layout before any swap.
std::uint64_t mapping_cost(const qasm::Circuit& circuit, const Layout& layout, const device::Topology& topology);

struct RouteResult {
    qasm::Circuit circuit;
    Layout final_layout;
    std::uint64_t swaps = 0;
};

/// SABRE-style swap insertion on an undirected topology. Input is a
/// {u3, cx} circuit in the single-register form of lower_to_u_cx; output
/// acts on physical qubits and contains inserted `swap` gates.
RouteResult route(const qasm::Circuit& circuit, const Layout& initial,
                  const device::Topology& topology, std::uint64_t seed);

/// Rewrites a routed {u3, cx, swap} circuit into the device basis,
/// honoring the direction of the coupling map.
qasm::Circuit retarget(const qasm::Circuit& routed, const device::DeviceConfig& device,
                       const gates::BasisSet& basis);

/// Merges runs of adjacent unconditioned single-qubit gates per qubit and
/// re-expresses each run in the basis. A run is only replaced when the new
/// form is not longer; runs equal to the identity are dropped.
qasm::Circuit peephole_1q(const qasm::Circuit& circuit, const gates::BasisSet& basis);

/// ASAP list schedule with device durations. Barriers synchronize their
/// qubits, delays last cycles * cycle_time_ns, and measure/reset default to
/// zero duration when the device lists none.
Schedule schedule_asap(const qasm::Circuit& circuit, const device::DeviceConfig& device);

/// Full pipeline: lower, map, route, retarget, optimize (opt_level 1),
/// schedule. The identity layout replaces the greedy one when its
/// mapping_cost is strictly lower.
TranspileResult transpile(const qasm::Circuit& circuit, const device::DeviceConfig& device,
                          std::uint64_t seed = 42, int opt_level = 1);

}  // namespace qflow::transpile
