// SPDX-License-Identifier: Apache-2.0
#include "qflow/sim/run.hpp"

#include "qflow/error.hpp"
#include "qflow/gates/decompose.hpp"
#include "qflow/qasm/flatten.hpp"
#include "qflow/qasm/printer.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <unordered_map>

namespace qflow::sim {
namespace {

constexpr std::uint32_t kDefaultSvCap = 26;
constexpr std::uint32_t kDefaultDmCap = 13;

std::uint32_t cap_from_env(const char* name, std::uint32_t fallback) {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return fallback;
    std::uint32_t out = 0;
    const char* end = v + std::char_traits<char>::length(v);
    const auto [ptr, ec] = std::from_chars(v, end, out);
    if (ec != std::errc{} || ptr != end) return fallback;
    return out;
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::string describe(const qasm::Instruction& in) {
    std::string s = in.opcode;
    if (!in.params.empty()) {
        s += '(';
        for (std::size_t i = 0; i < in.params.size(); ++i) {
            if (i) s += ',';
            s += qasm::format_number(in.params[i]);
        }
        s += ')';
    }
    return s;
}

// Flat circuit with every operand resolved to a global wire index.
struct Program {
    qasm::Circuit circuit;
    std::vector<std::vector<std::uint32_t>> qubits;
    std::vector<std::vector<std::uint32_t>> clbits;
    std::vector<std::uint32_t> offsets;
    std::uint32_t n_qubits = 0;
    std::uint32_t n_clbits = 0;
};

Program prepare(const qasm::Circuit& input, bool measure_all_if_no_clbits) {
    Program p;
    p.circuit = qasm::flatten(input);
    if (measure_all_if_no_clbits && p.circuit.num_clbits() == 0 && p.circuit.num_qubits() > 0) {
        const auto offsets = p.circuit.wire_offsets();
        const std::uint32_t n = p.circuit.num_qubits();
        const std::uint32_t creg = p.circuit.add_register("meas", qasm::RegisterKind::classical, n);
        for (std::uint32_t r = 0; r < creg; ++r) {
            if (p.circuit.registers[r].kind != qasm::RegisterKind::quantum) continue;
            for (std::uint32_t k = 0; k < p.circuit.registers[r].size; ++k) {
                p.circuit.instructions.push_back(qasm::make_measure({r, k}, {creg, offsets[r] + k}));
            }
        }
    }
    p.offsets = p.circuit.wire_offsets();
    p.n_qubits = p.circuit.num_qubits();
    p.n_clbits = p.circuit.num_clbits();
    p.qubits.reserve(p.circuit.instructions.size());
    p.clbits.reserve(p.circuit.instructions.size());
    for (const auto& in : p.circuit.instructions) {
        std::vector<std::uint32_t> qs;
        for (const auto& w : in.qubits) qs.push_back(p.offsets[w.reg] + w.index);
        std::vector<std::uint32_t> cs;
        for (const auto& w : in.clbits) cs.push_back(p.offsets[w.reg] + w.index);
        p.qubits.push_back(std::move(qs));
        p.clbits.push_back(std::move(cs));
    }
    return p;
}

bool condition_holds(const Program& p, const qasm::Condition& cond, const std::vector<std::uint8_t>& bits) {
    const std::uint32_t off = p.offsets[cond.creg];
    const std::uint32_t size = p.circuit.registers[cond.creg].size;
    std::uint64_t value = 0;
    for (std::uint32_t k = 0; k < size; ++k) {
        if (!bits[off + k]) continue;
        if (k >= 64) return false;
        value |= std::uint64_t{1} << k;
    }
    return value == cond.value;
}

std::string bitstring(const std::vector<std::uint8_t>& bits) {
    std::string s(bits.size(), '0');
    for (std::size_t c = 0; c < bits.size(); ++c) {
        if (bits[c]) s[bits.size() - 1 - c] = '1';
    }
    return s;
}

// Whether all measurement can be deferred to the end, and where the first
// instruction that needs per-shot execution sits.
struct Dynamics {
    bool terminal = true;
    std::size_t first_dynamic = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> measures;  // (qubit, clbit)
};

Dynamics analyze_dynamics(const Program& p, bool reset_is_channel) {
    Dynamics d;
    const std::size_t m = p.circuit.instructions.size();
    d.first_dynamic = m;
    std::vector<bool> measured(p.n_qubits, false);
    for (std::size_t i = 0; i < m; ++i) {
        const auto& in = p.circuit.instructions[i];
        const auto& qs = p.qubits[i];
        if (in.condition) {
            d.terminal = false;
            d.first_dynamic = std::min(d.first_dynamic, i);
        }
        if (in.opcode == "measure") {
            measured[qs[0]] = true;
            d.measures.emplace_back(qs[0], p.clbits[i][0]);
            d.first_dynamic = std::min(d.first_dynamic, i);
            continue;
        }
        if (in.opcode == "barrier") continue;
        if (in.opcode == "reset" && !reset_is_channel) {
            d.terminal = false;
            d.first_dynamic = std::min(d.first_dynamic, i);
        }
        for (std::uint32_t q : qs) {
            if (measured[q]) d.terminal = false;
        }
    }
    return d;
}

std::map<std::uint64_t, std::uint64_t> sample_indices(std::span<const double> probs, std::uint64_t shots,
                                                      std::mt19937_64& rng) {
    std::vector<double> cum(probs.size());
    double total = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (probs[i] < -1e-9) {
            throw BackendError("negative probability " + std::to_string(probs[i]) + " at outcome " + std::to_string(i));
        }
        total += std::max(probs[i], 0.0);
        cum[i] = total;
    }
    std::map<std::uint64_t, std::uint64_t> out;
    for (std::uint64_t s = 0; s < shots; ++s) {
        const double u = uniform01(rng) * total;
        auto it = std::upper_bound(cum.begin(), cum.end(), u);
        if (it == cum.end()) --it;
        ++out[static_cast<std::uint64_t>(it - cum.begin())];
    }
    return out;
}

// Marginal distribution of the measured qubits (in ascending qubit order).
std::vector<double> marginal(std::span<const double> full, const std::vector<std::uint32_t>& mq) {
    std::vector<double> out(std::size_t{1} << mq.size(), 0.0);
    for (std::uint64_t i = 0; i < full.size(); ++i) {
        std::uint64_t v = 0;
        for (std::size_t j = 0; j < mq.size(); ++j) v |= ((i >> mq[j]) & 1u) << j;
        out[v] += full[i];
    }
    return out;
}

// Applies per-qubit readout confusion to a distribution over measured qubits.
void apply_readout(std::vector<double>& probs, const std::vector<std::uint32_t>& mq, const device::DeviceConfig& dev) {
    for (std::size_t j = 0; j < mq.size(); ++j) {
        if (mq[j] >= dev.readout.size()) continue;
        const auto& ro = dev.readout[mq[j]];
        if (ro.p0_given_0 == 1.0 && ro.p1_given_1 == 1.0) continue;
        const std::uint64_t bit = std::uint64_t{1} << j;
        for (std::uint64_t v = 0; v < probs.size(); ++v) {
            if (v & bit) continue;
            const double p0 = probs[v];
            const double p1 = probs[v | bit];
            probs[v] = ro.p0_given_0 * p0 + (1.0 - ro.p1_given_1) * p1;
            probs[v | bit] = (1.0 - ro.p0_given_0) * p0 + ro.p1_given_1 * p1;
        }
    }
}

// Samples terminal measurements from a distribution over all qubits.
Counts sample_terminal(const Program& p, const Dynamics& d, std::span<const double> full,
                       const device::DeviceConfig* readout_device, std::uint64_t shots, std::mt19937_64& rng) {
    std::vector<std::uint32_t> mq;
    for (auto [q, c] : d.measures) mq.push_back(q);
    std::sort(mq.begin(), mq.end());
    mq.erase(std::unique(mq.begin(), mq.end()), mq.end());
    std::vector<double> probs = marginal(full, mq);
    if (readout_device) apply_readout(probs, mq, *readout_device);

    Counts counts;
    std::vector<std::uint8_t> bits(p.n_clbits);
    for (auto [v, k] : sample_indices(probs, shots, rng)) {
        std::fill(bits.begin(), bits.end(), 0);
        for (auto [q, c] : d.measures) {
            const auto j = static_cast<std::size_t>(std::lower_bound(mq.begin(), mq.end(), q) - mq.begin());
            bits[c] = static_cast<std::uint8_t>((v >> j) & 1u);
        }
        counts[bitstring(bits)] += k;
    }
    return counts;
}

class GateCache {
  public:
    const gates::Matrix& get(const qasm::Instruction& in) {
        if (!in.params.empty()) {
            scratch_ = gates::unitary_of(in.opcode, in.params);
            return scratch_;
        }
        auto it = fixed_.find(in.opcode);
        if (it == fixed_.end()) it = fixed_.emplace(in.opcode, gates::unitary_of(in.opcode, {})).first;
        return it->second;
    }

  private:
    std::unordered_map<std::string, gates::Matrix> fixed_;
    gates::Matrix scratch_;
};

void check_cap(std::uint32_t n, std::uint32_t cap, const char* backend) {
    if (n > cap) {
        throw BackendError("circuit has " + std::to_string(n) + " qubits, " + backend + " backend cap is " +
                           std::to_string(cap));
    }
}

class Stopwatch {
  public:
    explicit Stopwatch(bool on) : on_(on), start_(std::chrono::steady_clock::now()) {}
    double ms() const {
        if (!on_) return 0.0;
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    }

  private:
    bool on_;
    std::chrono::steady_clock::time_point start_;
};

// ---------------------------------------------------------------- state vector

void sv_gate(StateVector& sv, GateCache& cache, const qasm::Instruction& in, const std::vector<std::uint32_t>& qs) {
    if (in.opcode == "barrier" || in.opcode == "delay") return;
    sv.apply(cache.get(in), qs);
}

bool sv_measure(StateVector& sv, std::uint32_t q, std::mt19937_64& rng) {
    const double p1 = sv.probability_one(q);
    const bool outcome = uniform01(rng) < p1;
    sv.collapse(q, outcome, outcome ? p1 : 1.0 - p1);
    return outcome;
}

// -------------------------------------------------------------- density matrix

class NoiseModel {
  public:
    explicit NoiseModel(const device::DeviceConfig* dev) : dev_(dev), enabled_(dev && !dev->noiseless()) {}

    const device::DeviceConfig* device() const { return dev_; }

    void after_gate(DensityMatrix& rho, const qasm::Instruction& in, const std::vector<std::uint32_t>& qs) const {
        if (!enabled_) return;
        const double p = dev_->error(in.opcode, qs);
        if (p > 0.0) rho.depolarize(p, qs);
        const auto t = dev_->find_duration(in.opcode, qs);
        if (!t) {
            throw BackendError("device '" + dev_->name + "' has no duration for gate '" + in.opcode + "'");
        }
        relax(rho, qs, *t);
    }

    void delay(DensityMatrix& rho, const qasm::Instruction& in, const std::vector<std::uint32_t>& qs) const {
        if (!enabled_) return;
        relax(rho, qs, in.params[0] * dev_->cycle_time_ns);
    }

    /// Recorded bit after readout confusion.
    bool readout(std::uint32_t q, bool outcome, std::mt19937_64& rng) const {
        if (!dev_ || q >= dev_->readout.size()) return outcome;
        const auto& ro = dev_->readout[q];
        const double keep = outcome ? ro.p1_given_1 : ro.p0_given_0;
        if (keep >= 1.0) return outcome;
        return uniform01(rng) < keep ? outcome : !outcome;
    }

  private:
    void relax(DensityMatrix& rho, const std::vector<std::uint32_t>& qs, double t) const {
        if (t <= 0.0) return;
        for (std::uint32_t q : qs) {
            const double t1 = dev_->t1_ns(q);
            const double t2 = dev_->t2_ns(q);
            if (std::isinf(t1) && std::isinf(t2)) continue;
            const std::uint32_t target[1] = {q};
            rho.apply_kraus(thermal_relaxation_kraus(t, t1, t2), target);
        }
    }

    const device::DeviceConfig* dev_;
    bool enabled_;
};

void dm_op(DensityMatrix& rho, GateCache& cache, const NoiseModel& noise, const qasm::Instruction& in,
           const std::vector<std::uint32_t>& qs) {
    if (in.opcode == "barrier") return;
    if (in.opcode == "delay") {
        noise.delay(rho, in, qs);
        return;
    }
    if (in.opcode == "reset") {
        rho.reset(qs[0]);
        return;
    }
    rho.apply_unitary(cache.get(in), qs);
    noise.after_gate(rho, in, qs);
}

void check_device_width(const Program& p, const device::DeviceConfig* dev) {
    if (dev && p.n_qubits > dev->num_qubits) {
        throw BackendError("circuit has " + std::to_string(p.n_qubits) + " qubits, device '" + dev->name + "' has " +
                           std::to_string(dev->num_qubits));
    }
}

// ------------------------------------------------------------------ stabilizer

enum class Prim : std::uint8_t { h, s, sdg, x, y, z, cx, cz, swap, measure, reset };

struct StabOp {
    Prim prim;
    std::uint32_t a = 0;
    std::uint32_t b = 0;  // second qubit, or clbit for measure
    std::int32_t condition = -1;
};

struct StabProgram {
    std::vector<StabOp> ops;
    std::vector<qasm::Condition> conditions;
    std::size_t first_dynamic = 0;
};

int quarter_turns(double angle) {
    const double snapped = gates::normalize_angle(angle);
    const double k = snapped / (std::numbers::pi / 2);
    const double r = std::round(k);
    if (std::abs(k - r) > 1e-12) return -1;
    return ((static_cast<int>(r) % 4) + 4) % 4;
}

void emit_u3(std::vector<StabOp>& out, std::uint32_t q, int kt, int kp, int kl, std::int32_t cond) {
    auto z_power = [&](int k) {
        if (k == 1) out.push_back({Prim::s, q, 0, cond});
        if (k == 2) out.push_back({Prim::z, q, 0, cond});
        if (k == 3) out.push_back({Prim::sdg, q, 0, cond});
    };
    // u3(theta, phi, lambda) ~ rz(phi) ry(theta) rz(lambda); ry(pi/2) = X H.
    z_power(kl);
    for (int i = 0; i < kt; ++i) {
        out.push_back({Prim::h, q, 0, cond});
        out.push_back({Prim::x, q, 0, cond});
    }
    z_power(kp);
}

StabProgram compile_stabilizer(const Program& p) {
    static const std::unordered_map<std::string, std::vector<std::pair<Prim, std::array<std::uint32_t, 2>>>> kDirect = {
        {"id", {}},
        {"h", {{Prim::h, {0, 0}}}},
        {"s", {{Prim::s, {0, 0}}}},
        {"sdg", {{Prim::sdg, {0, 0}}}},
        {"x", {{Prim::x, {0, 0}}}},
        {"y", {{Prim::y, {0, 0}}}},
        {"z", {{Prim::z, {0, 0}}}},
        {"sx", {{Prim::sdg, {0, 0}}, {Prim::h, {0, 0}}, {Prim::sdg, {0, 0}}}},
        {"sxdg", {{Prim::s, {0, 0}}, {Prim::h, {0, 0}}, {Prim::s, {0, 0}}}},
        {"cx", {{Prim::cx, {0, 1}}}},
        {"CX", {{Prim::cx, {0, 1}}}},
        {"cz", {{Prim::cz, {0, 1}}}},
        {"swap", {{Prim::swap, {0, 1}}}},
        {"cy", {{Prim::sdg, {1, 1}}, {Prim::cx, {0, 1}}, {Prim::s, {1, 1}}}},
    };
    StabProgram sp;
    sp.first_dynamic = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < p.circuit.instructions.size(); ++i) {
        const auto& in = p.circuit.instructions[i];
        const auto& qs = p.qubits[i];
        std::int32_t cond = -1;
        if (in.condition) {
            cond = static_cast<std::int32_t>(sp.conditions.size());
            sp.conditions.push_back(*in.condition);
        }
        const bool dynamic = in.condition || in.opcode == "measure" || in.opcode == "reset";
        if (dynamic) sp.first_dynamic = std::min(sp.first_dynamic, sp.ops.size());
        if (in.opcode == "barrier" || in.opcode == "delay") continue;
        if (in.opcode == "measure") {
            sp.ops.push_back({Prim::measure, qs[0], p.clbits[i][0], cond});
            continue;
        }
        if (in.opcode == "reset") {
            sp.ops.push_back({Prim::reset, qs[0], 0, cond});
            continue;
        }
        if (auto it = kDirect.find(in.opcode); it != kDirect.end()) {
            for (const auto& [prim, slots] : it->second) sp.ops.push_back({prim, qs[slots[0]], qs[slots[1]], cond});
            continue;
        }
        std::vector<gates::LocalGate> seq;
        try {
            seq = gates::decompose_local(in.opcode, in.params);
        } catch (const GateError& e) {
            throw BackendError(e.what());
        }
        std::vector<StabOp> local;
        for (const auto& g : seq) {
            if (g.name == "cx") {
                local.push_back({Prim::cx, qs[g.qubits[0]], qs[g.qubits[1]], cond});
                continue;
            }
            const int kt = quarter_turns(g.params[0]);
            const int kp = quarter_turns(g.params[1]);
            const int kl = quarter_turns(g.params[2]);
            if (kt < 0 || kp < 0 || kl < 0) throw BackendError("non-Clifford gate " + describe(in));
            emit_u3(local, qs[g.qubits[0]], kt, kp, kl, cond);
        }
        sp.ops.insert(sp.ops.end(), local.begin(), local.end());
    }
    sp.first_dynamic = std::min(sp.first_dynamic, sp.ops.size());
    return sp;
}

void stab_apply(StabilizerTableau& t, const StabOp& op) {
    switch (op.prim) {
        case Prim::h: t.h(op.a); break;
        case Prim::s: t.s(op.a); break;
        case Prim::sdg: t.sdg(op.a); break;
        case Prim::x: t.x_gate(op.a); break;
        case Prim::y: t.y_gate(op.a); break;
        case Prim::z: t.z_gate(op.a); break;
        case Prim::cx: t.cx(op.a, op.b); break;
        case Prim::cz: t.cz(op.a, op.b); break;
        case Prim::swap: t.swap(op.a, op.b); break;
        case Prim::measure:
        case Prim::reset: break;
    }
}

}  // namespace

std::uint32_t sv_qubit_cap() { return cap_from_env("QFLOW_QUBIT_CAP_SV", kDefaultSvCap); }
std::uint32_t dm_qubit_cap() { return cap_from_env("QFLOW_QUBIT_CAP_DM", kDefaultDmCap); }

Counts sample_counts(std::span<const double> probs, std::uint32_t width, std::uint64_t shots, std::uint64_t seed) {
    double total = 0.0;
    for (double p : probs) total += p;
    if (std::abs(total - 1.0) > 1e-9) throw BackendError("probabilities sum to " + std::to_string(total));
    std::mt19937_64 rng(seed);
    Counts out;
    for (auto [v, k] : sample_indices(probs, shots, rng)) {
        std::vector<std::uint8_t> bits(width);
        for (std::uint32_t b = 0; b < width && b < 64; ++b) bits[b] = static_cast<std::uint8_t>((v >> b) & 1u);
        out[bitstring(bits)] += k;
    }
    return out;
}

StateVector sv_final_state(const qasm::Circuit& circuit) {
    const Program p = prepare(circuit, false);
    check_cap(p.n_qubits, sv_qubit_cap(), "sv");
    StateVector sv(p.n_qubits);
    GateCache cache;
    for (std::size_t i = 0; i < p.circuit.instructions.size(); ++i) {
        const auto& in = p.circuit.instructions[i];
        if (in.condition) throw BackendError("conditioned instruction has no single final state");
        if (in.opcode == "measure") continue;
        if (in.opcode == "reset") throw BackendError("reset has no single final state");
        sv_gate(sv, cache, in, p.qubits[i]);
    }
    return sv;
}

DensityMatrix dm_final_state(const qasm::Circuit& circuit, const device::DeviceConfig* device) {
    const Program p = prepare(circuit, false);
    check_cap(p.n_qubits, dm_qubit_cap(), "dm");
    check_device_width(p, device);
    if (!analyze_dynamics(p, true).terminal) {
        throw BackendError("mid-circuit measurement or conditions have no single final state");
    }
    DensityMatrix rho(p.n_qubits);
    GateCache cache;
    const NoiseModel noise(device);
    for (std::size_t i = 0; i < p.circuit.instructions.size(); ++i) {
        if (p.circuit.instructions[i].opcode == "measure") continue;
        dm_op(rho, cache, noise, p.circuit.instructions[i], p.qubits[i]);
    }
    return rho;
}

std::vector<double> dm_outcome_probabilities(const qasm::Circuit& circuit, const device::DeviceConfig* device) {
    const Program p = prepare(circuit, true);
    check_cap(p.n_qubits, dm_qubit_cap(), "dm");
    check_device_width(p, device);
    if (p.n_clbits > 24) throw BackendError("too many classical bits for an explicit distribution");
    const Dynamics dyn = analyze_dynamics(p, true);
    if (!dyn.terminal) throw BackendError("mid-circuit measurement has no single outcome distribution");
    DensityMatrix rho(p.n_qubits);
    GateCache cache;
    const NoiseModel noise(device);
    for (std::size_t i = 0; i < p.circuit.instructions.size(); ++i) {
        if (p.circuit.instructions[i].opcode == "measure") continue;
        dm_op(rho, cache, noise, p.circuit.instructions[i], p.qubits[i]);
    }
    std::vector<std::uint32_t> mq;
    for (auto [q, c] : dyn.measures) mq.push_back(q);
    std::sort(mq.begin(), mq.end());
    mq.erase(std::unique(mq.begin(), mq.end()), mq.end());
    std::vector<double> probs = marginal(rho.diagonal(), mq);
    if (device) apply_readout(probs, mq, *device);
    std::vector<double> out(std::size_t{1} << p.n_clbits, 0.0);
    for (std::uint64_t v = 0; v < probs.size(); ++v) {
        std::uint64_t key = 0;
        for (auto [q, c] : dyn.measures) {
            const auto j = static_cast<std::size_t>(std::lower_bound(mq.begin(), mq.end(), q) - mq.begin());
            key = (key & ~(std::uint64_t{1} << c)) | (((v >> j) & 1u) << c);
        }
        out[key] += probs[v];
    }
    return out;
}

RunResult sv_run(const qasm::Circuit& circuit, const RunOptions& options) {
    const Stopwatch clock(options.timing);
    const Program p = prepare(circuit, true);
    check_cap(p.n_qubits, sv_qubit_cap(), "sv");
    const Dynamics dyn = analyze_dynamics(p, false);

    RunResult r;
    r.backend = "sv";
    r.n_qubits = p.n_qubits;
    r.shots = options.shots;
    r.seed = options.seed;
    r.mem_bytes_estimate = (std::uint64_t{1} << p.n_qubits) * sizeof(Complex);

    std::mt19937_64 rng(options.seed);
    GateCache cache;
    StateVector sv(p.n_qubits);
    const auto& ins = p.circuit.instructions;
    if (dyn.terminal) {
        for (std::size_t i = 0; i < ins.size(); ++i) {
            if (ins[i].opcode != "measure") sv_gate(sv, cache, ins[i], p.qubits[i]);
        }
        const auto probs = sv.probabilities();
        r.counts = sample_terminal(p, dyn, probs, nullptr, options.shots, rng);
        if (options.amplitudes) r.amplitudes = std::vector<Complex>(sv.amplitudes().begin(), sv.amplitudes().end());
    } else {
        for (std::size_t i = 0; i < dyn.first_dynamic; ++i) sv_gate(sv, cache, ins[i], p.qubits[i]);
        std::vector<std::uint8_t> bits(p.n_clbits);
        for (std::uint64_t shot = 0; shot < options.shots; ++shot) {
            StateVector s = sv;
            std::fill(bits.begin(), bits.end(), 0);
            for (std::size_t i = dyn.first_dynamic; i < ins.size(); ++i) {
                const auto& in = ins[i];
                if (in.condition && !condition_holds(p, *in.condition, bits)) continue;
                if (in.opcode == "measure") {
                    bits[p.clbits[i][0]] = static_cast<std::uint8_t>(sv_measure(s, p.qubits[i][0], rng));
                } else if (in.opcode == "reset") {
                    if (sv_measure(s, p.qubits[i][0], rng)) s.apply(gates::unitary_of("x", {}), p.qubits[i]);
                } else {
                    sv_gate(s, cache, in, p.qubits[i]);
                }
            }
            ++r.counts[bitstring(bits)];
        }
    }
    r.wall_time_ms = clock.ms();
    return r;
}

RunResult dm_run(const qasm::Circuit& circuit, const device::DeviceConfig* device, const RunOptions& options) {
    const Stopwatch clock(options.timing);
    const Program p = prepare(circuit, true);
    check_cap(p.n_qubits, dm_qubit_cap(), "dm");
    check_device_width(p, device);
    const Dynamics dyn = analyze_dynamics(p, true);

    RunResult r;
    r.backend = "dm";
    r.n_qubits = p.n_qubits;
    r.shots = options.shots;
    r.seed = options.seed;
    r.mem_bytes_estimate = (std::uint64_t{1} << (2 * p.n_qubits)) * sizeof(Complex);

    std::mt19937_64 rng(options.seed);
    GateCache cache;
    const NoiseModel noise(device);
    DensityMatrix rho(p.n_qubits);
    const auto& ins = p.circuit.instructions;
    if (dyn.terminal) {
        bool has_reset = false;
        for (std::size_t i = 0; i < ins.size(); ++i) {
            if (ins[i].opcode == "measure") continue;
            has_reset |= ins[i].opcode == "reset";
            dm_op(rho, cache, noise, ins[i], p.qubits[i]);
        }
        const auto diag = rho.diagonal();
        r.counts = sample_terminal(p, dyn, diag, device, options.shots, rng);
        if (options.fidelity && !has_reset) r.fidelity = fidelity(rho, sv_final_state(circuit));
    } else {
        for (std::size_t i = 0; i < dyn.first_dynamic; ++i) dm_op(rho, cache, noise, ins[i], p.qubits[i]);
        std::vector<std::uint8_t> bits(p.n_clbits);
        for (std::uint64_t shot = 0; shot < options.shots; ++shot) {
            DensityMatrix s = rho;
            std::fill(bits.begin(), bits.end(), 0);
            for (std::size_t i = dyn.first_dynamic; i < ins.size(); ++i) {
                const auto& in = ins[i];
                if (in.condition && !condition_holds(p, *in.condition, bits)) continue;
                if (in.opcode == "measure") {
                    const std::uint32_t q = p.qubits[i][0];
                    const double p1 = s.probability_one(q);
                    const bool outcome = uniform01(rng) < p1;
                    s.collapse(q, outcome, outcome ? p1 : 1.0 - p1);
                    bits[p.clbits[i][0]] = static_cast<std::uint8_t>(noise.readout(q, outcome, rng));
                } else {
                    dm_op(s, cache, noise, in, p.qubits[i]);
                }
            }
            ++r.counts[bitstring(bits)];
        }
    }
    r.wall_time_ms = clock.ms();
    return r;
}

StabilizerTableau stab_final_tableau(const qasm::Circuit& circuit) {
    const Program p = prepare(circuit, false);
    check_cap(p.n_qubits, kStabilizerQubitCap, "stab");
    const StabProgram sp = compile_stabilizer(p);
    StabilizerTableau t(p.n_qubits);
    for (const auto& op : sp.ops) {
        if (op.condition >= 0) throw BackendError("conditioned instruction has no single final state");
        if (op.prim == Prim::reset) throw BackendError("reset has no single final state");
        stab_apply(t, op);
    }
    return t;
}

RunResult stab_run(const qasm::Circuit& circuit, const RunOptions& options) {
    const Stopwatch clock(options.timing);
    const Program p = prepare(circuit, true);
    check_cap(p.n_qubits, kStabilizerQubitCap, "stab");
    const StabProgram sp = compile_stabilizer(p);

    RunResult r;
    r.backend = "stab";
    r.n_qubits = p.n_qubits;
    r.shots = options.shots;
    r.seed = options.seed;

    std::mt19937_64 rng(options.seed);
    StabilizerTableau prefix(p.n_qubits);
    r.mem_bytes_estimate = prefix.bytes();
    for (std::size_t i = 0; i < sp.first_dynamic; ++i) stab_apply(prefix, sp.ops[i]);

    std::vector<std::uint8_t> bits(p.n_clbits);
    for (std::uint64_t shot = 0; shot < options.shots; ++shot) {
        StabilizerTableau t = prefix;
        std::fill(bits.begin(), bits.end(), 0);
        for (std::size_t i = sp.first_dynamic; i < sp.ops.size(); ++i) {
            const StabOp& op = sp.ops[i];
            if (op.condition >= 0 && !condition_holds(p, sp.conditions[static_cast<std::size_t>(op.condition)], bits)) {
                continue;
            }
            if (op.prim == Prim::measure) {
                bits[op.b] = static_cast<std::uint8_t>(t.measure(op.a, rng));
            } else if (op.prim == Prim::reset) {
                t.reset(op.a, rng);
            } else {
                stab_apply(t, op);
            }
        }
        ++r.counts[bitstring(bits)];
    }
    r.wall_time_ms = clock.ms();
    return r;
}

}  // namespace qflow::sim
