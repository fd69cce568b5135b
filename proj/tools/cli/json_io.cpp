// SPDX-License-Identifier: Apache-2.0
#include "json_io.hpp"

#include "qflow/gates/gate_library.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace qflow::cli {

Json to_json(const transpile::TranspileReport& r) {
    Json j;
    j["basis_histogram"] = r.basis_histogram;
    j["n_1q"] = r.n_1q;
    j["n_2q"] = r.n_2q;
    j["n_swap"] = r.n_swap;
    j["depth_in"] = r.depth_in;
    j["depth_out"] = r.depth_out;
    j["layout_initial"] = r.layout_initial;
    j["layout_final"] = r.layout_final;
    j["makespan_ns"] = r.makespan_ns;
    return j;
}

Json to_json(const metrics::MetricsReport& r) {
    Json j;
    j["n_qubits"] = r.n_qubits;
    j["n_gates"] = r.n_gates;
    j["n_1q"] = r.n_1q;
    j["n_2q"] = r.n_2q;
    j["n_measure"] = r.n_measure;
    j["n_other"] = r.n_other;
    j["depth"] = r.depth;
    j["gate_density"] = r.gate_density;
    j["retention_lifespan"] = r.retention_lifespan;
    j["entanglement_variance"] = r.entanglement_variance;
    j["measurement_density"] = r.measurement_density;
    j["basis_histogram"] = r.basis_histogram;
    return j;
}

Json to_json(const sim::RunResult& r) {
    Json j;
    j["backend"] = r.backend;
    j["n_qubits"] = r.n_qubits;
    j["shots"] = r.shots;
    j["seed"] = r.seed;
    j["counts"] = r.counts;
    if (r.fidelity) j["fidelity"] = *r.fidelity;
    j["wall_time_ms"] = r.wall_time_ms;
    j["mem_bytes_estimate"] = r.mem_bytes_estimate;
    if (r.amplitudes) {
        Json amps = Json::array();
        for (const auto& a : *r.amplitudes) amps.push_back({a.real(), a.imag()});
        j["amplitudes"] = std::move(amps);
    }
    return j;
}

std::vector<std::string> adjacency_lines(const device::DeviceConfig& d) {
    std::vector<std::string> lines;
    lines.reserve(d.num_qubits);
    for (std::uint32_t q = 0; q < d.num_qubits; ++q) {
        auto nbrs = d.topology.neighbors(q);
        std::sort(nbrs.begin(), nbrs.end());
        std::string line = "q" + std::to_string(q) + ":";
        for (auto b : nbrs) line += " " + std::to_string(b);
        lines.push_back(std::move(line));
    }
    return lines;
}

Json device_summary(const device::DeviceConfig& d) {
    Json j;
    j["name"] = d.name;
    j["n_qubits"] = d.num_qubits;
    j["basis_gates"] = d.basis_gates;
    Json edges = Json::array();
    for (const auto& [a, b] : d.topology.edges()) edges.push_back({a, b});
    j["edges"] = std::move(edges);
    Json directed = Json::array();
    for (const auto& [a, b] : d.coupling_map) directed.push_back({a, b});
    j["coupling_map"] = std::move(directed);
    j["connected"] = d.topology.connected();
    j["noiseless"] = d.noiseless();
    j["cycle_time_ns"] = d.cycle_time_ns;
    j["adjacency"] = adjacency_lines(d);
    j["warnings"] = d.warnings;
    return j;
}

namespace {

std::string definition_line(const gates::GateSpec& g) {
    std::string s = "gate " + std::string(g.name);
    if (g.param_count > 0) {
        s += '(';
        for (std::uint8_t i = 0; i < g.param_count; ++i) {
            if (i) s += ',';
            s += g.param_names[i];
        }
        s += ')';
    }
    s += ' ';
    for (std::uint8_t i = 0; i < g.arity; ++i) {
        if (i) s += ',';
        s += "q" + std::to_string(i);
    }
    s += ' ';
    s += g.definition.empty() ? std::string_view("{ primitive }") : g.definition;
    return s;
}

}  // namespace

Json gate_manifest() {
    Json gates = Json::array();
    for (const auto& g : gates::library()) {
        Json e;
        e["name"] = g.name;
        e["arity"] = g.arity;
        Json params = Json::array();
        for (std::uint8_t i = 0; i < g.param_count; ++i) params.push_back(g.param_names[i]);
        e["params"] = std::move(params);
        e["clifford"] = g.is_clifford;
        if (g.param_count == 0) {
            const auto m = gates::unitary_of(g, {});
            Json rows = Json::array();
            for (Eigen::Index r = 0; r < m.rows(); ++r) {
                for (Eigen::Index c = 0; c < m.cols(); ++c) rows.push_back({m(r, c).real(), m(r, c).imag()});
            }
            e["matrix"] = std::move(rows);
        } else {
            e["definition"] = definition_line(g);
        }
        gates.push_back(std::move(e));
    }
    Json j;
    j["gates"] = std::move(gates);
    return j;
}

std::string histogram_text(const sim::Counts& counts, std::size_t width) {
    std::vector<std::pair<std::string, std::uint64_t>> rows(counts.begin(), counts.end());
    std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::uint64_t total = 0;
    std::uint64_t top = 0;
    std::size_t key_width = 0;
    for (const auto& [k, v] : rows) {
        total += v;
        top = std::max(top, v);
        key_width = std::max(key_width, k.size());
    }
    std::ostringstream os;
    for (const auto& [k, v] : rows) {
        const auto bar = top == 0 ? 0 : static_cast<std::size_t>((v * width + top / 2) / top);
        os << k << std::string(key_width - k.size(), ' ') << " | " << std::string(std::max<std::size_t>(bar, 1), '#')
           << ' ' << v;
        char pct[32];
        std::snprintf(pct, sizeof pct, " (%.2f%%)", total ? 100.0 * static_cast<double>(v) / static_cast<double>(total) : 0.0);
        os << pct << '\n';
    }
    return os.str();
}

}  // namespace qflow::cli
