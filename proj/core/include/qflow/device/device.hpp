// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace qflow::device {

/// Distance between qubits in different connected components.
inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();

/// Undirected connectivity with all-pairs hop distances (BFS from every node).
class Topology {
  public:
    Topology() = default;
    Topology(std::uint32_t num_qubits, std::span<const std::pair<std::uint32_t, std::uint32_t>> edges);

    std::uint32_t num_qubits() const noexcept { return n_; }

    /// Hop count, or kUnreachable. Throws DeviceError for indices out of range.
    std::uint32_t distance(std::uint32_t a, std::uint32_t b) const;
    /// Unchecked variant for hot loops.
    std::uint32_t distance_unchecked(std::uint32_t a, std::uint32_t b) const noexcept {
        return dist_[static_cast<std::size_t>(a) * n_ + b];
    }

    const std::vector<std::uint32_t>& neighbors(std::uint32_t q) const { return adj_[q]; }
    std::uint32_t degree(std::uint32_t q) const { return static_cast<std::uint32_t>(adj_[q].size()); }

    bool adjacent(std::uint32_t a, std::uint32_t b) const noexcept;
    bool connected() const noexcept { return connected_; }

    /// Undirected edges as (low, high), sorted.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges() const;

  private:
    std::uint32_t n_ = 0;
    std::vector<std::vector<std::uint32_t>> adj_;
    std::vector<std::uint32_t> dist_;
    bool connected_ = true;
};

struct Readout {
    double p0_given_0 = 1.0;
    double p1_given_1 = 1.0;
};

struct DeviceConfig {
    std::string name;
    std::uint32_t num_qubits = 0;
    std::vector<std::string> basis_gates;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> coupling_map;
    /// Keys are gate names or overrides "gate:q" / "gate:a_b".
    std::map<std::string, double, std::less<>> gate_durations_ns;
    std::map<std::string, double, std::less<>> gate_errors;
    std::vector<double> t1_us;
    std::vector<double> t2_us;
    std::vector<Readout> readout;
    double cycle_time_ns = 1.0;
    /// Non-fatal findings such as a disconnected coupling graph.
    std::vector<std::string> warnings;
    Topology topology;

    /// Directed membership in the coupling map.
    bool has_edge(std::uint32_t a, std::uint32_t b) const noexcept;

    /// Duration lookup: "gate:a_b" (operand order as given), then the reversed
    /// pair, then the plain gate name.
    std::optional<double> find_duration(std::string_view gate, std::span<const std::uint32_t> qubits) const;
    /// Like find_duration but throws DeviceError when nothing matches.
    double duration(std::string_view gate, std::span<const std::uint32_t> qubits) const;
    /// Depolarizing probability with the same key lookup; 0 when absent.
    double error(std::string_view gate, std::span<const std::uint32_t> qubits) const;

    double t1_ns(std::uint32_t q) const { return t1_us[q] * 1000.0; }
    double t2_ns(std::uint32_t q) const { return t2_us[q] * 1000.0; }

    /// No gate errors, infinite T1/T2 and perfect readout.
    bool noiseless() const;
};

/// Parses and validates a device description. Errors name the offending
/// field path, e.g. `t2_us[0]`.
DeviceConfig load_device(std::string_view json_text);
DeviceConfig load_device_file(const std::filesystem::path& path);

/// A device with `n` qubits, all-to-all coupling, basis {u3, cx} and no noise.
DeviceConfig ideal_device(std::uint32_t n);

}  // namespace qflow::device
