// SPDX-License-Identifier: Apache-2.0
#include "qflow/metrics/metrics.hpp"

#include "qflow/error.hpp"
#include "qflow/gates/gate_library.hpp"
#include "qflow/qasm/flatten.hpp"

#include <algorithm>
#include <vector>

namespace qflow::metrics {
namespace {

struct Layering {
    std::vector<std::uint64_t> ready;
    std::vector<std::uint64_t> first;
    std::vector<std::uint64_t> last;
    std::vector<std::uint32_t> scratch;
    std::uint64_t depth = 0;

    explicit Layering(std::uint32_t n) : ready(n, 0), first(n, 0), last(n, 0) {}

    // Returns the 1-based layer of a counted instruction, or 0 for a barrier.
    std::uint64_t place(const qasm::Instruction& in, const std::vector<std::uint32_t>& offsets) {
        scratch.clear();
        for (const auto& w : in.qubits) scratch.push_back(offsets[w.reg] + w.index);
        std::uint64_t start = 0;
        for (std::uint32_t q : scratch) start = std::max(start, ready[q]);
        if (in.opcode == "barrier") {
            for (std::uint32_t q : scratch) ready[q] = start;
            return 0;
        }
        const std::uint64_t layer = start + 1;
        for (std::uint32_t q : scratch) {
            ready[q] = layer;
            if (first[q] == 0) first[q] = layer;
            last[q] = layer;
        }
        depth = std::max(depth, layer);
        return layer;
    }
};

void require_flat(const qasm::Circuit& c) {
    if (!qasm::is_flat(c)) throw CircuitError("metrics need a flattened circuit");
}

}  // namespace

std::uint64_t depth(const qasm::Circuit& circuit) {
    require_flat(circuit);
    const auto offsets = circuit.wire_offsets();
    Layering layers(circuit.num_qubits());
    for (const auto& in : circuit.instructions) layers.place(in, offsets);
    return layers.depth;
}

MetricsReport analyze(const qasm::Circuit& circuit) {
    require_flat(circuit);
    const auto offsets = circuit.wire_offsets();
    const std::uint32_t n = circuit.num_qubits();
    MetricsReport r;
    r.n_qubits = n;
    Layering layers(n);
    std::vector<std::uint64_t> entangling(n, 0);

    for (const auto& in : circuit.instructions) {
        layers.place(in, offsets);
        if (in.opcode == "barrier") continue;
        ++r.n_gates;
        ++r.basis_histogram[in.opcode];
        if (in.opcode == "measure") {
            ++r.n_measure;
        } else if (qasm::is_directive(in.opcode)) {
            ++r.n_other;
        } else if (in.qubits.size() == 1) {
            ++r.n_1q;
        } else if (in.qubits.size() == 2) {
            ++r.n_2q;
            for (const auto& w : in.qubits) ++entangling[offsets[w.reg] + w.index];
        } else {
            ++r.n_other;
        }
    }
    r.depth = layers.depth;
    if (n == 0 || r.depth == 0) return r;

    const double d = static_cast<double>(r.depth);
    r.gate_density = static_cast<double>(r.n_gates) / (d * n);
    for (std::uint32_t q = 0; q < n; ++q) {
        if (layers.first[q] == 0) continue;
        r.retention_lifespan =
            std::max(r.retention_lifespan, static_cast<double>(layers.last[q] - layers.first[q] + 1) / d);
    }
    double mean = 0.0;
    for (auto c : entangling) mean += static_cast<double>(c);
    mean /= n;
    double var = 0.0;
    for (auto c : entangling) var += (static_cast<double>(c) - mean) * (static_cast<double>(c) - mean);
    r.entanglement_variance = var / n;
    r.measurement_density = static_cast<double>(r.n_measure) / n;
    return r;
}

}  // namespace qflow::metrics
