// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "qflow/device/device.hpp"
#include "qflow/metrics/metrics.hpp"
#include "qflow/sim/run.hpp"
#include "qflow/transpile/transpile.hpp"

#include <json.hpp>

namespace qflow::cli {

using Json = nlohmann::ordered_json;

Json to_json(const transpile::TranspileReport& r);
Json to_json(const metrics::MetricsReport& r);
Json to_json(const sim::RunResult& r);
Json device_summary(const device::DeviceConfig& d);
Json gate_manifest();

/// One bar per outcome, most frequent first (ties by bitstring).
std::string histogram_text(const sim::Counts& counts, std::size_t width = 40);

/// Neighbor list per qubit, e.g. "q1: 0 2".
std::vector<std::string> adjacency_lines(const device::DeviceConfig& d);

}  // namespace qflow::cli
