// SPDX-License-Identifier: Apache-2.0
#include "qflow/error.hpp"
#include "qflow/qasm/flatten.hpp"
#include "qflow/transpile/transpile.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <unordered_map>

namespace qflow::transpile {

Layout Layout::identity(std::uint32_t n_logical, std::uint32_t n_physical) {
    Layout l;
    l.n_logical = n_logical;
    l.l2p.resize(n_physical);
    std::iota(l.l2p.begin(), l.l2p.end(), 0u);
    return l;
}

std::vector<std::uint32_t> Layout::p2l() const {
    std::vector<std::uint32_t> out(l2p.size());
    for (std::uint32_t l = 0; l < l2p.size(); ++l) out[l2p[l]] = l;
    return out;
}

std::vector<std::uint32_t> Layout::logical_view() const {
    return {l2p.begin(), l2p.begin() + n_logical};
}

bool Layout::is_permutation() const {
    std::vector<bool> seen(l2p.size(), false);
    for (std::uint32_t p : l2p) {
        if (p >= l2p.size() || seen[p]) return false;
        seen[p] = true;
    }
    return n_logical <= l2p.size();
}

std::uint64_t mapping_cost(const qasm::Circuit& circuit, const Layout& layout, const device::Topology& topology) {
    const auto offsets = circuit.wire_offsets();
    std::uint64_t cost = 0;
    for (const auto& in : circuit.instructions) {
        if (in.qubits.size() != 2 || qasm::is_directive(in.opcode)) continue;
        const auto a = layout.l2p[offsets[in.qubits[0].reg] + in.qubits[0].index];
        const auto b = layout.l2p[offsets[in.qubits[1].reg] + in.qubits[1].index];
        cost += topology.distance_unchecked(a, b);
    }
    return cost;
}

qasm::Circuit lower_to_u_cx(const qasm::Circuit& input) {
    const qasm::Circuit flat = qasm::flatten(input);
    const auto offsets = flat.wire_offsets();

    qasm::Circuit out;
    out.source_name = flat.source_name;
    std::string qname = "q";
    while (flat.find_register(qname) &&
           flat.registers[*flat.find_register(qname)].kind == qasm::RegisterKind::classical) {
        qname += "_";
    }
    const std::uint32_t n = flat.num_qubits();
    if (n > 0) out.add_register(qname, qasm::RegisterKind::quantum, n);

    std::vector<std::uint32_t> creg_map(flat.registers.size(), 0);
    for (std::uint32_t r = 0; r < flat.registers.size(); ++r) {
        if (flat.registers[r].kind == qasm::RegisterKind::classical) {
            creg_map[r] = out.add_register(flat.registers[r].name, qasm::RegisterKind::classical,
                                           flat.registers[r].size);
        }
    }

    std::unordered_map<std::string, std::vector<gates::LocalGate>> fixed;
    out.instructions.reserve(flat.instructions.size());
    for (const qasm::Instruction& in : flat.instructions) {
        qasm::Instruction base;
        base.opcode = in.opcode;
        base.params = in.params;
        for (const auto& w : in.qubits) base.qubits.push_back({0, offsets[w.reg] + w.index});
        for (const auto& w : in.clbits) base.clbits.push_back({creg_map[w.reg], w.index});
        if (in.condition) base.condition = qasm::Condition{creg_map[in.condition->creg], in.condition->value};

        if (qasm::is_directive(in.opcode)) {
            out.instructions.push_back(std::move(base));
            continue;
        }
        const std::vector<gates::LocalGate>* seq = nullptr;
        std::vector<gates::LocalGate> local;
        if (in.params.empty()) {
            auto it = fixed.find(in.opcode);
            if (it == fixed.end()) it = fixed.emplace(in.opcode, gates::decompose_local(in.opcode, {})).first;
            seq = &it->second;
        } else {
            local = gates::decompose_local(in.opcode, in.params);
            seq = &local;
        }
        for (const gates::LocalGate& g : *seq) {
            qasm::Instruction sub;
            sub.opcode = g.name;
            sub.params = g.params;
            for (std::uint32_t k : g.qubits) sub.qubits.push_back(base.qubits[k]);
            sub.condition = base.condition;
            out.instructions.push_back(std::move(sub));
        }
    }
    return out;
}

Layout initial_mapping(const qasm::Circuit& circuit, const device::Topology& topology,
                       std::uint64_t /*seed*/) {
    const std::uint32_t n_phys = topology.num_qubits();
    const std::uint32_t n_log = circuit.num_qubits();
    if (n_log > n_phys) {
        throw TranspileError("too many qubits: circuit has " + std::to_string(n_log) +
                             ", device has " + std::to_string(n_phys));
    }
    const auto offsets = circuit.wire_offsets();

    std::vector<std::uint64_t> degree(n_log, 0);
    std::vector<std::vector<std::uint32_t>> partners(n_log);
    for (const qasm::Instruction& in : circuit.instructions) {
        if (in.qubits.size() != 2 || qasm::is_directive(in.opcode)) continue;
        const std::uint32_t a = offsets[in.qubits[0].reg] + in.qubits[0].index;
        const std::uint32_t b = offsets[in.qubits[1].reg] + in.qubits[1].index;
        ++degree[a];
        ++degree[b];
        partners[a].push_back(b);
        partners[b].push_back(a);
    }
    for (auto& p : partners) {
        std::sort(p.begin(), p.end());
        p.erase(std::unique(p.begin(), p.end()), p.end());
    }
    const bool any_2q = std::any_of(degree.begin(), degree.end(), [](auto d) { return d > 0; });
    if (!any_2q) return Layout::identity(n_log, n_phys);

    // Rank: higher gate count first, then lower logical index.
    auto ranks_before = [&](std::uint32_t a, std::uint32_t b) {
        return degree[a] != degree[b] ? degree[a] > degree[b] : a < b;
    };
    std::vector<std::uint32_t> order(n_log);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), ranks_before);

    constexpr std::uint32_t kFree = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> pos(n_log, kFree);
    std::vector<bool> used(n_phys, false);

    auto best_free_by_degree = [&] {
        std::uint32_t best = kFree;
        for (std::uint32_t p = 0; p < n_phys; ++p) {
            if (used[p]) continue;
            if (best == kFree || topology.degree(p) > topology.degree(best)) best = p;
        }
        return best;
    };

    auto place = [&](std::uint32_t l, std::uint32_t p) {
        pos[l] = p;
        used[p] = true;
    };

    // Frontier of unplaced qubits with at least one placed partner.
    auto cmp = [&](std::uint32_t a, std::uint32_t b) { return ranks_before(b, a); };
    std::priority_queue<std::uint32_t, std::vector<std::uint32_t>, decltype(cmp)> frontier(cmp);
    std::vector<bool> queued(n_log, false);
    auto enqueue_partners = [&](std::uint32_t l) {
        for (std::uint32_t m : partners[l]) {
            if (pos[m] == kFree && !queued[m]) {
                queued[m] = true;
                frontier.push(m);
            }
        }
    };

    std::size_t next_in_order = 0;
    std::uint32_t placed = 0;
    while (placed < n_log) {
        std::uint32_t l = kFree;
        if (!frontier.empty()) {
            l = frontier.top();
            frontier.pop();
        } else {
            while (pos[order[next_in_order]] != kFree) ++next_in_order;
            l = order[next_in_order];
        }

        std::uint32_t target = kFree;
        bool has_placed_partner = false;
        for (std::uint32_t m : partners[l]) has_placed_partner |= pos[m] != kFree;
        if (!has_placed_partner) {
            target = best_free_by_degree();
        } else {
            std::uint64_t best_cost = std::numeric_limits<std::uint64_t>::max();
            for (std::uint32_t p = 0; p < n_phys; ++p) {
                if (used[p]) continue;
                std::uint64_t cost = 0;
                for (std::uint32_t m : partners[l]) {
                    if (pos[m] == kFree) continue;
                    const std::uint32_t d = topology.distance_unchecked(p, pos[m]);
                    cost += d == device::kUnreachable ? std::uint64_t{1} << 40 : d;
                }
                if (cost < best_cost) {
                    best_cost = cost;
                    target = p;
                }
            }
        }
        place(l, target);
        ++placed;
        enqueue_partners(l);
    }

    Layout layout;
    layout.n_logical = n_log;
    layout.l2p = pos;
    for (std::uint32_t p = 0; p < n_phys; ++p) {
        if (!used[p]) layout.l2p.push_back(p);
    }
    return layout;
}

}  // namespace qflow::transpile
