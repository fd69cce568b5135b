// SPDX-License-Identifier: Apache-2.0
#include "qflow/error.hpp"
#include "qflow/transpile/transpile.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace qflow::transpile {
namespace {

constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr std::size_t kLookahead = 20;
constexpr double kLookaheadWeight = 0.5;
constexpr double kDecayStep = 0.001;

class Router {
  public:
    Router(const qasm::Circuit& c, const Layout& initial, const device::Topology& topo)
        : in_(c), topo_(topo), n_phys_(topo.num_qubits()), l2p_(initial.l2p), p2l_(initial.p2l()) {
        n_log_ = c.num_qubits();
        build_registers();
        build_wires();
        decay_.assign(n_phys_, 1.0);
        front_of_.assign(n_phys_, kNone);
        la_mask_.assign(n_phys_, 0);
    }

    RouteResult run() {
        for (std::uint32_t w = 0; w < wire_start_.size() - 1; ++w) {
            if (wire_start_[w] != wire_start_[w + 1]) arrive(wire_ops_[wire_start_[w]]);
        }
        drain();
        const std::uint64_t guard = static_cast<std::uint64_t>(n_phys_) * n_phys_;
        const std::uint64_t valve = std::max<std::uint64_t>(n_phys_, 8);
        while (!front_.empty()) {
            if (stalled_ >= guard) {
                throw TranspileError("routing failed: no progress after " + std::to_string(stalled_) +
                                     " swaps");
            }
            if (stalled_ >= valve) {
                force_closest();
            } else {
                const auto [p, q] = choose_swap();
                apply_swap(p, q);
            }
            drain();
        }

        RouteResult r;
        r.circuit = std::move(out_);
        r.final_layout.n_logical = n_log_;
        r.final_layout.l2p = l2p_;
        r.swaps = swaps_;
        return r;
    }

  private:
    // --- setup -------------------------------------------------------------

    void build_registers() {
        reg_map_.assign(in_.registers.size(), 0);
        std::string qname = "q";
        for (const auto& r : in_.registers) {
            if (r.kind == qasm::RegisterKind::quantum) qname = r.name;
        }
        if (n_phys_ > 0) out_.add_register(qname, qasm::RegisterKind::quantum, n_phys_);
        for (std::uint32_t r = 0; r < in_.registers.size(); ++r) {
            const auto& reg = in_.registers[r];
            if (reg.kind == qasm::RegisterKind::quantum) {
                if (r != 0) throw TranspileError("route expects a single quantum register");
                continue;
            }
            reg_map_[r] = out_.add_register(reg.name, reg.kind, reg.size);
        }
        out_.source_name = in_.source_name;
        out_.instructions.reserve(in_.instructions.size() + in_.instructions.size() / 4);
    }

    void build_wires() {
        const std::size_t n_ops = in_.instructions.size();
        const std::uint32_t n_wires = n_log_ + static_cast<std::uint32_t>(in_.registers.size());
        need_.assign(n_ops, 0);
        have_.assign(n_ops, 0);
        std::vector<std::uint32_t> count(n_wires + 1, 0);
        std::vector<std::uint32_t> scratch;

        auto wires_of = [&](const qasm::Instruction& in, std::vector<std::uint32_t>& w) {
            w.clear();
            for (const auto& q : in.qubits) w.push_back(q.index);
            for (const auto& c : in.clbits) w.push_back(n_log_ + c.reg);
            if (in.condition) w.push_back(n_log_ + in.condition->creg);
            std::sort(w.begin(), w.end());
            w.erase(std::unique(w.begin(), w.end()), w.end());
        };

        for (std::size_t i = 0; i < n_ops; ++i) {
            const auto& in = in_.instructions[i];
            const bool gate = !qasm::is_directive(in.opcode);
            if (gate && (in.qubits.size() > 2 || (in.qubits.size() == 2 && in.opcode != "cx"))) {
                throw TranspileError("route expects a {u3, cx} circuit, found '" + in.opcode + "'");
            }
            wires_of(in, scratch);
            need_[i] = static_cast<std::uint32_t>(scratch.size());
            for (std::uint32_t w : scratch) ++count[w + 1];
        }
        wire_start_.assign(n_wires + 1, 0);
        for (std::uint32_t w = 0; w < n_wires; ++w) wire_start_[w + 1] = wire_start_[w] + count[w + 1];
        wire_ops_.assign(wire_start_.back(), 0);
        std::vector<std::uint32_t> fill(wire_start_.begin(), wire_start_.end() - 1);
        for (std::size_t i = 0; i < n_ops; ++i) {
            wires_of(in_.instructions[i], scratch);
            for (std::uint32_t w : scratch) wire_ops_[fill[w]++] = static_cast<std::uint32_t>(i);
        }
        head_.assign(wire_start_.begin(), wire_start_.end() - 1);

        // Program-order list of not yet executed two-qubit gates.
        next2q_.assign(n_ops, kNone);
        prev2q_.assign(n_ops, kNone);
        in_front_.assign(n_ops, false);
        front_pos_.assign(n_ops, 0);
        std::uint32_t last = kNone;
        for (std::uint32_t i = 0; i < n_ops; ++i) {
            if (!is_2q(i)) continue;
            if (last == kNone) {
                list_head_ = i;
            } else {
                next2q_[last] = i;
                prev2q_[i] = last;
            }
            last = i;
        }
    }

    bool is_2q(std::uint32_t i) const {
        const auto& in = in_.instructions[i];
        return in.qubits.size() == 2 && in.opcode != "barrier";
    }

    std::uint32_t log_q(std::uint32_t i, int k) const { return in_.instructions[i].qubits[k].index; }

    // --- execution ---------------------------------------------------------

    void arrive(std::uint32_t op) {
        if (++have_[op] == need_[op]) ready_.push_back(op);
    }

    void emit(std::uint32_t i) {
        const auto& in = in_.instructions[i];
        qasm::Instruction o;
        o.opcode = in.opcode;
        o.params = in.params;
        o.qubits.reserve(in.qubits.size());
        for (const auto& q : in.qubits) o.qubits.push_back({0, l2p_[q.index]});
        for (const auto& c : in.clbits) o.clbits.push_back({reg_map_[c.reg], c.index});
        if (in.condition) o.condition = qasm::Condition{reg_map_[in.condition->creg], in.condition->value};
        out_.instructions.push_back(std::move(o));
    }

    void execute(std::uint32_t i) {
        emit(i);
        if (is_2q(i)) {
            // unlink from the pending two-qubit list
            if (prev2q_[i] == kNone) {
                list_head_ = next2q_[i];
            } else {
                next2q_[prev2q_[i]] = next2q_[i];
            }
            if (next2q_[i] != kNone) prev2q_[next2q_[i]] = prev2q_[i];
            stalled_ = 0;
            for (std::uint32_t p : decayed_) decay_[p] = 1.0;
            decayed_.clear();
        }
        const auto& in = in_.instructions[i];
        auto advance = [&](std::uint32_t w) {
            const std::uint32_t pos = ++head_[w];
            if (pos < wire_start_[w + 1]) arrive(wire_ops_[pos]);
        };
        // Same wire set as build_wires, deduplicated the same way.
        wires_.clear();
        for (const auto& q : in.qubits) wires_.push_back(q.index);
        for (const auto& c : in.clbits) wires_.push_back(n_log_ + c.reg);
        if (in.condition) wires_.push_back(n_log_ + in.condition->creg);
        std::sort(wires_.begin(), wires_.end());
        wires_.erase(std::unique(wires_.begin(), wires_.end()), wires_.end());
        for (std::uint32_t w : wires_) advance(w);
    }

    bool executable(std::uint32_t i) const {
        return topo_.adjacent(l2p_[log_q(i, 0)], l2p_[log_q(i, 1)]);
    }

    void drain() {
        while (!ready_.empty()) {
            const std::uint32_t i = ready_.front();
            ready_.pop_front();
            if (!is_2q(i) || executable(i)) {
                execute(i);
                continue;
            }
            const std::uint32_t pa = l2p_[log_q(i, 0)];
            const std::uint32_t pb = l2p_[log_q(i, 1)];
            if (topo_.distance_unchecked(pa, pb) == device::kUnreachable) {
                throw TranspileError("routing impossible: physical qubits " + std::to_string(pa) + " and " +
                                     std::to_string(pb) + " are not connected");
            }
            add_front(i);
        }
    }

    void add_front(std::uint32_t i) {
        in_front_[i] = true;
        front_pos_[i] = static_cast<std::uint32_t>(front_.size());
        front_.push_back(i);
        front_of_[log_q(i, 0)] = i;
        front_of_[log_q(i, 1)] = i;
    }

    void remove_front(std::uint32_t i) {
        const std::uint32_t pos = front_pos_[i];
        const std::uint32_t last = front_.back();
        front_[pos] = last;
        front_pos_[last] = pos;
        front_.pop_back();
        in_front_[i] = false;
        front_of_[log_q(i, 0)] = kNone;
        front_of_[log_q(i, 1)] = kNone;
    }

    // --- swap selection ----------------------------------------------------

    std::uint32_t dist_of(std::uint32_t op) const {
        return topo_.distance_unchecked(l2p_[log_q(op, 0)], l2p_[log_q(op, 1)]);
    }

    // Distance of `op` if the physical qubits p and q traded places.
    std::uint32_t dist_after(std::uint32_t op, std::uint32_t p, std::uint32_t q) const {
        auto moved = [&](std::uint32_t phys) { return phys == p ? q : phys == q ? p : phys; };
        return topo_.distance_unchecked(moved(l2p_[log_q(op, 0)]), moved(l2p_[log_q(op, 1)]));
    }

    void collect_lookahead() {
        lookahead_.clear();
        for (std::uint32_t i = list_head_; i != kNone && lookahead_.size() < kLookahead; i = next2q_[i]) {
            if (in_front_[i]) continue;
            const auto bit = static_cast<std::uint32_t>(1u << lookahead_.size());
            la_mask_[log_q(i, 0)] |= bit;
            la_mask_[log_q(i, 1)] |= bit;
            lookahead_.push_back(i);
        }
    }

    void clear_lookahead() {
        for (std::uint32_t i : lookahead_) {
            la_mask_[log_q(i, 0)] = 0;
            la_mask_[log_q(i, 1)] = 0;
        }
    }

    std::pair<std::uint32_t, std::uint32_t> choose_swap() {
        collect_lookahead();
        double front_sum = 0;
        for (std::uint32_t f : front_) front_sum += dist_of(f);
        double la_sum = 0;
        for (std::uint32_t l : lookahead_) la_sum += dist_of(l);

        double best = std::numeric_limits<double>::infinity();
        std::pair<std::uint32_t, std::uint32_t> best_pair{kNone, kNone};

        auto consider = [&](std::uint32_t p, std::uint32_t q) {
            if (p > q) std::swap(p, q);
            const std::uint32_t lp = p2l_[p];
            const std::uint32_t lq = p2l_[q];
            double df = 0;
            const std::uint32_t fp = front_of_[lp];
            const std::uint32_t fq = front_of_[lq];
            if (fp != kNone) df += static_cast<double>(dist_after(fp, p, q)) - dist_of(fp);
            if (fq != kNone && fq != fp) df += static_cast<double>(dist_after(fq, p, q)) - dist_of(fq);
            double dl = 0;
            for (std::uint32_t mask = la_mask_[lp] | la_mask_[lq]; mask; mask &= mask - 1) {
                const std::uint32_t op = lookahead_[static_cast<std::size_t>(__builtin_ctz(mask))];
                dl += static_cast<double>(dist_after(op, p, q)) - dist_of(op);
            }
            const double score =
                std::max(decay_[p], decay_[q]) * ((front_sum + df) + kLookaheadWeight * (la_sum + dl));
            if (score < best || (score == best && std::pair{p, q} < best_pair)) {
                best = score;
                best_pair = {p, q};
            }
        };

        for (std::uint32_t f : front_) {
            for (int k = 0; k < 2; ++k) {
                const std::uint32_t p = l2p_[log_q(f, k)];
                for (std::uint32_t x : topo_.neighbors(p)) consider(p, x);
            }
        }
        clear_lookahead();
        return best_pair;
    }

    void apply_swap(std::uint32_t p, std::uint32_t q) {
        out_.instructions.push_back(qasm::make_gate("swap", {}, {{0, p}, {0, q}}));
        ++swaps_;
        ++stalled_;
        const std::uint32_t lp = p2l_[p];
        const std::uint32_t lq = p2l_[q];
        std::swap(p2l_[p], p2l_[q]);
        l2p_[lp] = q;
        l2p_[lq] = p;
        for (std::uint32_t x : {p, q}) {
            if (decay_[x] == 1.0) decayed_.push_back(x);
            decay_[x] += kDecayStep;
        }
        for (std::uint32_t l : {lp, lq}) {
            const std::uint32_t f = front_of_[l];
            if (f != kNone && executable(f)) {
                remove_front(f);
                ready_.push_back(f);
            }
        }
    }

    // Walks the closest front gate together along a shortest path.
    void force_closest() {
        std::uint32_t pick = kNone;
        std::uint32_t pick_d = kNone;
        for (std::uint32_t f : front_) {
            const std::uint32_t d = dist_of(f);
            if (d < pick_d || (d == pick_d && f < pick)) {
                pick = f;
                pick_d = d;
            }
        }
        while (!executable(pick)) {
            const std::uint32_t a = l2p_[log_q(pick, 0)];
            const std::uint32_t b = l2p_[log_q(pick, 1)];
            std::uint32_t step = kNone;
            for (std::uint32_t x : topo_.neighbors(a)) {
                if (topo_.distance_unchecked(x, b) + 1 == topo_.distance_unchecked(a, b)) {
                    step = x;
                    break;
                }
            }
            apply_swap(std::min(a, step), std::max(a, step));
        }
    }

    const qasm::Circuit& in_;
    const device::Topology& topo_;
    std::uint32_t n_phys_;
    std::uint32_t n_log_ = 0;
    std::vector<std::uint32_t> l2p_;
    std::vector<std::uint32_t> p2l_;
    std::vector<std::uint32_t> reg_map_;

    std::vector<std::uint32_t> wire_start_;
    std::vector<std::uint32_t> wire_ops_;
    std::vector<std::uint32_t> head_;
    std::vector<std::uint32_t> need_;
    std::vector<std::uint32_t> have_;
    std::deque<std::uint32_t> ready_;
    std::vector<std::uint32_t> wires_;

    std::vector<std::uint32_t> next2q_;
    std::vector<std::uint32_t> prev2q_;
    std::uint32_t list_head_ = kNone;

    std::vector<std::uint32_t> front_;
    std::vector<std::uint32_t> front_pos_;
    std::vector<bool> in_front_;
    std::vector<std::uint32_t> front_of_;

    std::vector<std::uint32_t> lookahead_;
    std::vector<std::uint32_t> la_mask_;

    std::vector<double> decay_;
    std::vector<std::uint32_t> decayed_;
    std::uint64_t stalled_ = 0;
    std::uint64_t swaps_ = 0;

    qasm::Circuit out_;
};

}  // namespace

RouteResult route(const qasm::Circuit& circuit, const Layout& initial, const device::Topology& topology,
                  std::uint64_t /*seed*/) {
    if (initial.n_physical() != topology.num_qubits() || !initial.is_permutation()) {
        throw TranspileError("initial layout does not match the device");
    }
    if (circuit.num_qubits() != initial.n_logical) {
        throw TranspileError("initial layout does not match the circuit");
    }
    return Router(circuit, initial, topology).run();
}

}  // namespace qflow::transpile
