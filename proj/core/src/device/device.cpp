// SPDX-License-Identifier: Apache-2.0
#include "qflow/device/device.hpp"

#include "qflow/error.hpp"
#include "qflow/gates/gate_library.hpp"
#include "qflow/qasm/circuit.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <sstream>

namespace qflow::device {

using json = nlohmann::json;

Topology::Topology(std::uint32_t num_qubits,
                   std::span<const std::pair<std::uint32_t, std::uint32_t>> edges)
    : n_(num_qubits), adj_(num_qubits) {
    for (const auto& [a, b] : edges) {
        if (a >= n_ || b >= n_) throw DeviceError("topology edge out of range");
        if (a == b) continue;
        adj_[a].push_back(b);
        adj_[b].push_back(a);
    }
    for (auto& list : adj_) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }

    dist_.assign(static_cast<std::size_t>(n_) * n_, kUnreachable);
    std::vector<std::uint32_t> queue(n_);
    for (std::uint32_t src = 0; src < n_; ++src) {
        std::uint32_t* row = dist_.data() + static_cast<std::size_t>(src) * n_;
        row[src] = 0;
        std::size_t head = 0;
        std::size_t tail = 0;
        queue[tail++] = src;
        while (head < tail) {
            const std::uint32_t u = queue[head++];
            for (std::uint32_t v : adj_[u]) {
                if (row[v] == kUnreachable) {
                    row[v] = row[u] + 1;
                    queue[tail++] = v;
                }
            }
        }
        if (src == 0 && tail != n_) connected_ = false;
    }
}

std::uint32_t Topology::distance(std::uint32_t a, std::uint32_t b) const {
    if (a >= n_ || b >= n_) {
        throw DeviceError("qubit index out of range: distance(" + std::to_string(a) + ", " +
                          std::to_string(b) + ") on " + std::to_string(n_) + " qubits");
    }
    return distance_unchecked(a, b);
}

bool Topology::adjacent(std::uint32_t a, std::uint32_t b) const noexcept {
    if (a >= n_ || b >= n_) return false;
    return std::binary_search(adj_[a].begin(), adj_[a].end(), b);
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> Topology::edges() const {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
    for (std::uint32_t a = 0; a < n_; ++a) {
        for (std::uint32_t b : adj_[a]) {
            if (a < b) out.emplace_back(a, b);
        }
    }
    return out;
}

bool DeviceConfig::has_edge(std::uint32_t a, std::uint32_t b) const noexcept {
    return std::find(coupling_map.begin(), coupling_map.end(), std::pair{a, b}) != coupling_map.end();
}

namespace {

template <typename Map>
const double* lookup(const Map& table, std::string_view gate, std::span<const std::uint32_t> qubits) {
    auto try_key = [&](const std::string& key) -> const double* {
        auto it = table.find(key);
        return it == table.end() ? nullptr : &it->second;
    };
    std::string base(gate);
    if (qubits.size() == 1) {
        if (auto* v = try_key(base + ":" + std::to_string(qubits[0]))) return v;
    } else if (qubits.size() == 2) {
        const std::string a = std::to_string(qubits[0]);
        const std::string b = std::to_string(qubits[1]);
        if (auto* v = try_key(base + ":" + a + "_" + b)) return v;
        if (auto* v = try_key(base + ":" + b + "_" + a)) return v;
    }
    return try_key(base);
}

}  // namespace

std::optional<double> DeviceConfig::find_duration(std::string_view gate,
                                                  std::span<const std::uint32_t> qubits) const {
    if (const double* v = lookup(gate_durations_ns, gate, qubits)) return *v;
    return std::nullopt;
}

double DeviceConfig::duration(std::string_view gate, std::span<const std::uint32_t> qubits) const {
    if (auto v = find_duration(gate, qubits)) return *v;
    throw DeviceError("device '" + name + "' has no duration for gate '" + std::string(gate) + "'");
}

double DeviceConfig::error(std::string_view gate, std::span<const std::uint32_t> qubits) const {
    if (const double* v = lookup(gate_errors, gate, qubits)) return *v;
    return 0.0;
}

bool DeviceConfig::noiseless() const {
    for (const auto& [key, p] : gate_errors) {
        if (p != 0.0) return false;
    }
    for (double t : t1_us) {
        if (std::isfinite(t)) return false;
    }
    for (double t : t2_us) {
        if (std::isfinite(t)) return false;
    }
    for (const Readout& r : readout) {
        if (r.p0_given_0 != 1.0 || r.p1_given_1 != 1.0) return false;
    }
    return true;
}

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& message) {
    throw DeviceError(path + ": " + message);
}

const json& require(const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) fail(key, "required field is missing");
    return *it;
}

double number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
}

std::uint32_t index(const json& v, const std::string& path) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0 ||
        v.get<std::int64_t>() > std::numeric_limits<std::uint32_t>::max()) {
        fail(path, "expected a nonnegative integer");
    }
    return static_cast<std::uint32_t>(v.get<std::int64_t>());
}

void check_gate_key(const std::string& key, const std::string& path, std::uint32_t n) {
    const auto colon = key.find(':');
    const std::string gate = key.substr(0, colon);
    if (!qasm::is_directive(gate) && !gates::find_gate(gate)) fail(path, "unknown gate '" + gate + "'");
    if (colon == std::string::npos) return;
    const std::string rest = key.substr(colon + 1);
    std::vector<std::string> parts;
    std::stringstream ss(rest);
    for (std::string part; std::getline(ss, part, '_');) parts.push_back(part);
    if (parts.empty() || parts.size() > 2) fail(path, "override key must look like gate:q or gate:a_b");
    for (const std::string& p : parts) {
        if (p.empty() || !std::all_of(p.begin(), p.end(), [](unsigned char c) { return std::isdigit(c); })) {
            fail(path, "override key must look like gate:q or gate:a_b");
        }
        if (std::stoull(p) >= n) fail(path, "qubit index out of range");
    }
}

std::vector<double> per_qubit(const json& root, const char* key, std::uint32_t n, double fallback) {
    auto it = root.find(key);
    if (it == root.end()) return std::vector<double>(n, fallback);
    if (!it->is_array()) fail(key, "expected an array");
    if (it->size() != n) {
        fail(key, "expected " + std::to_string(n) + " entries, got " + std::to_string(it->size()));
    }
    std::vector<double> out;
    for (std::size_t q = 0; q < n; ++q) {
        const std::string path = std::string(key) + "[" + std::to_string(q) + "]";
        const double v = number((*it)[q], path);
        if (!(v > 0)) fail(path, "must be positive");
        out.push_back(v);
    }
    return out;
}

}  // namespace

DeviceConfig load_device(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw DeviceError(std::string("invalid JSON: ") + e.what());
    }
    if (!root.is_object()) fail("$", "device description must be a JSON object");

    DeviceConfig d;
    const json& name = require(root, "name");
    if (!name.is_string() || name.get<std::string>().empty()) fail("name", "expected a non-empty string");
    d.name = name.get<std::string>();

    const json& nq = require(root, "num_qubits");
    d.num_qubits = index(nq, "num_qubits");
    if (d.num_qubits == 0) fail("num_qubits", "must be positive");
    const std::uint32_t n = d.num_qubits;

    const json& basis = require(root, "basis_gates");
    if (!basis.is_array() || basis.empty()) fail("basis_gates", "expected a non-empty array of gate names");
    for (std::size_t i = 0; i < basis.size(); ++i) {
        const std::string path = "basis_gates[" + std::to_string(i) + "]";
        if (!basis[i].is_string()) fail(path, "expected a string");
        const std::string g = basis[i].get<std::string>();
        if (!qasm::is_directive(g) && !gates::find_gate(g)) fail(path, "unknown gate '" + g + "'");
        if (std::find(d.basis_gates.begin(), d.basis_gates.end(), g) != d.basis_gates.end()) {
            fail(path, "duplicate gate '" + g + "'");
        }
        d.basis_gates.push_back(g);
    }

    const json& coupling = require(root, "coupling_map");
    if (!coupling.is_array()) fail("coupling_map", "expected an array of [i, j] pairs");
    for (std::size_t i = 0; i < coupling.size(); ++i) {
        const std::string path = "coupling_map[" + std::to_string(i) + "]";
        const json& e = coupling[i];
        if (!e.is_array() || e.size() != 2) fail(path, "expected a pair [i, j]");
        const std::uint32_t a = index(e[0], path + "[0]");
        const std::uint32_t b = index(e[1], path + "[1]");
        if (a >= n) fail(path + "[0]", "qubit index out of range");
        if (b >= n) fail(path + "[1]", "qubit index out of range");
        if (a == b) fail(path, "self-loop");
        if (!d.has_edge(a, b)) d.coupling_map.emplace_back(a, b);
    }

    auto read_table = [&](const json& table, const char* key, auto&& check_value) {
        if (!table.is_object()) fail(key, "expected an object mapping gate names to numbers");
        std::map<std::string, double, std::less<>> out;
        for (auto it = table.begin(); it != table.end(); ++it) {
            const std::string path = std::string(key) + "." + it.key();
            check_gate_key(it.key(), path, n);
            const double v = number(it.value(), path);
            check_value(v, path);
            out.emplace(it.key(), v);
        }
        return out;
    };

    d.gate_durations_ns = read_table(require(root, "gate_durations_ns"), "gate_durations_ns",
                                     [](double v, const std::string& path) {
                                         if (v < 0) fail(path, "duration must be nonnegative");
                                     });
    for (const std::string& g : d.basis_gates) {
        if (qasm::is_directive(g)) continue;
        if (!d.gate_durations_ns.count(g)) fail("gate_durations_ns", "missing duration for basis gate '" + g + "'");
    }

    if (auto it = root.find("gate_errors"); it != root.end()) {
        d.gate_errors = read_table(*it, "gate_errors", [](double v, const std::string& path) {
            if (v < 0 || v > 1) fail(path, "error probability must lie in [0, 1]");
        });
    }

    const double inf = std::numeric_limits<double>::infinity();
    d.t1_us = per_qubit(root, "t1_us", n, inf);
    d.t2_us = per_qubit(root, "t2_us", n, inf);
    for (std::uint32_t q = 0; q < n; ++q) {
        if (d.t2_us[q] > 2 * d.t1_us[q]) {
            fail("t2_us[" + std::to_string(q) + "]", "T2 must not exceed 2*T1 (t2=" +
                                                        std::to_string(d.t2_us[q]) + ", t1=" +
                                                        std::to_string(d.t1_us[q]) + ")");
        }
    }

    if (auto it = root.find("readout"); it != root.end()) {
        if (!it->is_array() || it->size() != n) {
            fail("readout", "expected " + std::to_string(n) + " [p0|0, p1|1] pairs");
        }
        for (std::uint32_t q = 0; q < n; ++q) {
            const std::string path = "readout[" + std::to_string(q) + "]";
            const json& r = (*it)[q];
            if (!r.is_array() || r.size() != 2) fail(path, "expected a pair [p0|0, p1|1]");
            Readout ro{number(r[0], path + "[0]"), number(r[1], path + "[1]")};
            if (ro.p0_given_0 < 0 || ro.p0_given_0 > 1) fail(path + "[0]", "probability must lie in [0, 1]");
            if (ro.p1_given_1 < 0 || ro.p1_given_1 > 1) fail(path + "[1]", "probability must lie in [0, 1]");
            d.readout.push_back(ro);
        }
    } else {
        d.readout.assign(n, Readout{});
    }

    d.cycle_time_ns = number(require(root, "cycle_time_ns"), "cycle_time_ns");
    if (!(d.cycle_time_ns > 0)) fail("cycle_time_ns", "must be positive");

    d.topology = Topology(n, d.coupling_map);
    if (!d.topology.connected()) d.warnings.push_back("coupling graph is not connected");
    return d;
}

DeviceConfig load_device_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DeviceError("cannot open device file '" + path.string() + "'");
    std::stringstream buffer;
    buffer << in.rdbuf();
    return load_device(buffer.str());
}

DeviceConfig ideal_device(std::uint32_t n) {
    DeviceConfig d;
    d.name = "ideal";
    d.num_qubits = n;
    d.basis_gates = {"u3", "cx"};
    for (std::uint32_t a = 0; a < n; ++a) {
        for (std::uint32_t b = 0; b < n; ++b) {
            if (a != b) d.coupling_map.emplace_back(a, b);
        }
    }
    d.gate_durations_ns = {{"u3", 0.0}, {"cx", 0.0}};
    const double inf = std::numeric_limits<double>::infinity();
    d.t1_us.assign(n, inf);
    d.t2_us.assign(n, inf);
    d.readout.assign(n, Readout{});
    d.topology = Topology(n, d.coupling_map);
    return d;
}

}  // namespace qflow::device
