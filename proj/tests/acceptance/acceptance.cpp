// SPDX-License-Identifier: Apache-2.0
//
// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// non-zero when any criterion fails.
#include "cli.hpp"

#include "qflow/metrics/metrics.hpp"
#include "qflow/qasm/binary.hpp"
#include "qflow/qasm/flatten.hpp"
#include "qflow/qasm/parser.hpp"
#include "qflow/qasm/printer.hpp"
#include "qflow/sim/run.hpp"
#include "qflow/transpile/transpile.hpp"

#include "support/corpus.hpp"
#include "support/devices.hpp"
#include "support/oracle.hpp"
#include "support/transpile_check.hpp"

#include <json.hpp>

#include <sys/resource.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <algorithm>
#include <functional>
#include <iostream>
#include <new>
#include <numeric>
#include <random>
#include <sstream>

namespace {
std::size_t g_alloc_bytes = 0;
}  // namespace

void* operator new(std::size_t size) {
    g_alloc_bytes += size;
    if (void* p = std::malloc(size == 0 ? 1 : size)) return p;
    throw std::bad_alloc();
}
void operator delete(void* p) noexcept { std::free(p); }
void operator delete(void* p, std::size_t) noexcept { std::free(p); }

namespace {

using namespace qflow;
using Clock = std::chrono::steady_clock;

const std::string kData = QFLOW_DATA_DIR;
const std::string kGolden = QFLOW_GOLDEN_DIR;

struct Outcome {
    bool pass = true;
    std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

double peak_rss_gb() {
    rusage ru{};
    getrusage(RUSAGE_SELF, &ru);
    return static_cast<double>(ru.ru_maxrss) / (1024.0 * 1024.0);
}

std::vector<std::pair<std::string, qasm::Circuit>> soundness_corpus() {
    std::vector<std::pair<std::string, qasm::Circuit>> out;
    out.emplace_back("bell", testing::bell());
    for (std::uint32_t n = 3; n <= 6; ++n) out.emplace_back("ghz" + std::to_string(n), testing::ghz(n));
    for (std::uint32_t n = 3; n <= 6; ++n) out.emplace_back("qft" + std::to_string(n), testing::qft(n));
    out.emplace_back("adder4", testing::adder4());
    for (std::uint64_t s = 0; s < 22; ++s) {
        out.emplace_back("clifford_t" + std::to_string(s), testing::random_clifford_t(2 + static_cast<std::uint32_t>(s % 4), 30, s));
    }
    return out;
}

Outcome transpiler_soundness() {
    const auto t0 = Clock::now();
    const auto corpus = soundness_corpus();
    Outcome o;
    double worst = 0.0;
    std::size_t checked = 0;
    std::size_t skipped = 0;
    for (const char* dev : {"line5", "heavy_hex7", "grid9"}) {
        const auto device = device::load_device_file(kData + "/devices/" + dev + ".json");
        std::size_t on_device = 0;
        for (const auto& [name, c] : corpus) {
            if (qasm::flatten(c).num_qubits() > device.num_qubits) {
                ++skipped;
                continue;
            }
            ++on_device;
            for (int opt : {0, 1}) {
                const auto r = transpile::transpile(c, device, 42, opt);
                const auto check = testing::check_transpile(c, r, device, 1e-8);
                worst = std::max(worst, check.max_error);
                ++checked;
                if (!check.ok()) {
                    o.pass = false;
                    o.detail += name + "@" + dev + " O" + std::to_string(opt) + ": " + check.detail;
                }
            }
        }
        if (on_device < 30) {
            o.pass = false;
            o.detail += std::string(dev) + " saw only " + std::to_string(on_device) + " circuits; ";
        }
    }
    const double secs = seconds_since(t0);
    if (secs >= 60.0) o.pass = false;
    o.detail += std::to_string(corpus.size()) + " circuits, " + std::to_string(checked) + " transpilations on line5/heavy_hex7/grid9 (" +
                std::to_string(skipped) + " wider than device), max error " + fmt("%.2e", worst) + " <= 1e-8, " +
                fmt("%.1f", secs) + " s < 60 s";
    return o;
}

Outcome backend_agreement() {
    const auto t0 = Clock::now();
    Outcome o;
    double dm_err = 0.0;
    int non_clifford = 0;
    for (std::uint64_t seed = 0; non_clifford < 100; ++seed) {
        const auto n = 1 + static_cast<std::uint32_t>(seed % 6);
        const auto c = qasm::flatten(testing::random_circuit(n, 12, 5000 + seed));
        if (metrics::depth(c) > 40) continue;
        ++non_clifford;
        const auto p = sim::sv_final_state(c).probabilities();
        const auto d = sim::dm_final_state(c, nullptr).diagonal();
        for (std::size_t i = 0; i < p.size(); ++i) dm_err = std::max(dm_err, std::abs(p[i] - d[i]));
    }
    double stab_err = 0.0;
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
        const auto n = 1 + static_cast<std::uint32_t>(seed % 6);
        const auto c = testing::random_clifford(n, 40, 9000 + seed);
        const auto st = sim::tableau_to_statevector(sim::stab_final_tableau(c));
        const auto sv = sim::sv_final_state(c);
        const auto& a = st.amplitudes();
        const auto& b = sv.amplitudes();
        std::size_t k = 0;
        for (std::size_t i = 0; i < b.size(); ++i) {
            if (std::abs(b[i]) > std::abs(b[k])) k = i;
        }
        const auto ratio = a[k] / b[k];
        const auto phase = ratio / std::abs(ratio);
        for (std::size_t i = 0; i < b.size(); ++i) stab_err = std::max(stab_err, std::abs(a[i] - phase * b[i]));
    }
    const double secs = seconds_since(t0);
    o.pass = dm_err <= 1e-10 && stab_err <= 1e-9 && secs < 120.0;
    o.detail = "100 non-Clifford DM vs SV max " + fmt("%.2e", dm_err) + " <= 1e-10, 200 Clifford STAB vs SV max " +
               fmt("%.2e", stab_err) + " <= 1e-9, " + fmt("%.1f", secs) + " s < 120 s";
    return o;
}

device::DeviceConfig relaxation_device(double t1_us, double t2_us, double cycle_ns) {
    const nlohmann::json j{{"name", "relax"},
                           {"num_qubits", 2},
                           {"basis_gates", {"u3", "cx"}},
                           {"coupling_map", {{0, 1}, {1, 0}}},
                           {"gate_durations_ns", {{"u3", 0}, {"cx", 0}, {"x", 0}, {"h", 0}}},
                           {"t1_us", {t1_us, t1_us}},
                           {"t2_us", {t2_us, t2_us}},
                           {"cycle_time_ns", cycle_ns}};
    return device::load_device(j.dump());
}

qasm::Circuit parse(const std::string& body) {
    return qasm::parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n" + body);
}

Outcome analytic_noise() {
    Outcome o;
    const double cycle = 7.5;
    double t1_err = 0.0;
    double t2_err = 0.0;
    int pairs = 0;
    for (double t1 : {10.0, 55.0, 130.0, 300.0}) {
        for (long cycles : {1L, 400L, 5000L, 40000L, 200000L}) {
            const double t = static_cast<double>(cycles) * cycle;
            const auto dev = relaxation_device(t1, 2 * t1, cycle);
            const auto rho = sim::dm_final_state(parse("qreg q[1]; x q[0]; delay(" + std::to_string(cycles) + ") q[0];"), &dev);
            t1_err = std::max(t1_err, std::abs(rho(1, 1).real() - std::exp(-t / (t1 * 1000))));
            const double t2 = 0.6 * t1;
            const auto dev2 = relaxation_device(t1, t2, cycle);
            const auto rho2 = sim::dm_final_state(parse("qreg q[1]; h q[0]; delay(" + std::to_string(cycles) + ") q[0];"), &dev2);
            t2_err = std::max(t2_err, std::abs(2 * std::abs(rho2(0, 1)) - std::exp(-t / (t2 * 1000))));
            ++pairs;
        }
    }
    double split_err = 0.0;
    for (long a : {1L, 37L, 500L, 2048L}) {
        for (long b : {3L, 250L, 9999L}) {
            const auto dev = relaxation_device(42.0, 61.0, 3.3);
            const std::string prep = "qreg q[2]; u3(1.1,0.3,-0.4) q[0]; u3(0.5,-1.2,2.0) q[1]; cx q[0],q[1];";
            const auto whole = sim::dm_final_state(
                parse(prep + "delay(" + std::to_string(a + b) + ") q[0]; delay(" + std::to_string(a + b) + ") q[1];"), &dev);
            const auto split = sim::dm_final_state(parse(prep + "delay(" + std::to_string(a) + ") q[0]; delay(" +
                                                         std::to_string(b) + ") q[0]; delay(" + std::to_string(a) +
                                                         ") q[1]; delay(" + std::to_string(b) + ") q[1];"),
                                                   &dev);
            for (std::uint64_t r = 0; r < 4; ++r) {
                for (std::uint64_t c = 0; c < 4; ++c) split_err = std::max(split_err, std::abs(whole(r, c) - split(r, c)));
            }
        }
    }
    nlohmann::json dj{{"name", "depol"},
                      {"num_qubits", 2},
                      {"basis_gates", {"u3", "cx"}},
                      {"coupling_map", {{0, 1}}},
                      {"gate_durations_ns", {{"u3", 0}, {"cx", 0}, {"x", 0}}},
                      {"gate_errors", {{"x", 1.0}, {"cx", 1.0}}},
                      {"cycle_time_ns", 1.0}};
    const auto depol = device::load_device(dj.dump());
    const auto one = sim::dm_final_state(parse("qreg q[1]; x q[0];"), &depol);
    const auto two = sim::dm_final_state(parse("qreg q[2]; cx q[0],q[1];"), &depol);
    bool exact = true;
    for (std::uint64_t r = 0; r < 2; ++r) {
        for (std::uint64_t c = 0; c < 2; ++c) exact = exact && one(r, c) == sim::Complex(r == c ? 0.5 : 0.0, 0.0);
    }
    for (std::uint64_t r = 0; r < 4; ++r) {
        for (std::uint64_t c = 0; c < 4; ++c) exact = exact && two(r, c) == sim::Complex(r == c ? 0.25 : 0.0, 0.0);
    }
    o.pass = pairs == 20 && t1_err <= 1e-9 && t2_err <= 1e-9 && split_err <= 1e-12 && exact;
    o.detail = "T1 decay max " + fmt("%.2e", t1_err) + " and T2 decay max " + fmt("%.2e", t2_err) + " over " +
               std::to_string(pairs) + " (t, T) pairs <= 1e-9, semigroup max " + fmt("%.2e", split_err) +
               " <= 1e-12, p=1 depolarizing " + (exact ? "exactly" : "NOT exactly") + " I/2 and I/4";
    return o;
}

Outcome round_trips() {
    Outcome o;
    std::vector<qasm::Circuit> corpus;
    for (const auto& [name, c] : soundness_corpus()) corpus.push_back(c);
    for (std::uint64_t s = 0; s < 20; ++s) corpus.push_back(testing::random_circuit(1 + static_cast<std::uint32_t>(s % 7), 60, s));
    for (const char* f : {"bell", "ghz3", "t_gate", "teleport", "qft4", "idle_delay"}) {
        std::ifstream in(kData + "/circuits/" + f + ".qasm");
        std::stringstream buf;
        buf << in.rdbuf();
        corpus.push_back(qasm::parse_qasm(buf.str()));
    }
    std::size_t text_ok = 0;
    std::size_t binary_ok = 0;
    for (const auto& c : corpus) {
        const std::string text = qasm::print_qasm(c);
        const auto back = qasm::parse_qasm(text);
        if (back == c && qasm::print_qasm(back) == text) ++text_ok;
        if (qasm::decode_binary(qasm::encode_binary(c)) == qasm::flatten(c)) ++binary_ok;
    }
    const auto big = testing::random_circuit(64, 1'000'000, 77);
    const std::size_t text_size = qasm::print_qasm(big).size();
    const auto bytes = qasm::encode_binary(big);
    const bool big_ok = qasm::decode_binary(bytes) == qasm::flatten(big);
    o.pass = text_ok == corpus.size() && binary_ok == corpus.size() && bytes.size() < text_size && big_ok;
    o.detail = "text " + std::to_string(text_ok) + "/" + std::to_string(corpus.size()) + ", binary " +
               std::to_string(binary_ok) + "/" + std::to_string(corpus.size()) + "; 10^6-gate circuit " +
               std::to_string(bytes.size()) + " B binary < " + std::to_string(text_size) + " B text" +
               (big_ok ? "" : ", large round trip FAILED");
    return o;
}

Outcome scale_check() {
    Outcome o;
    const auto device = testing::grid_device(32, 32);
    auto circuit = testing::lattice_circuit(1000, 32, 1'000'000, 2024);
    for (int variant = 0; variant < 2; ++variant) {
        if (variant == 1) {
            // Scramble the labels so the lattice structure is hidden from the mapper.
            std::vector<std::uint32_t> perm(1000);
            std::iota(perm.begin(), perm.end(), 0u);
            std::shuffle(perm.begin(), perm.end(), std::mt19937_64(7));
            for (auto& in : circuit.instructions) {
                for (auto& w : in.qubits) w.index = perm[w.index];
            }
        }
        const auto t0 = Clock::now();
        const auto r = transpile::transpile(circuit, device);
        const double secs = seconds_since(t0);
        const auto compliance = testing::check_compliance(r.circuit, device);
        const double rss = peak_rss_gb();
        o.pass = o.pass && secs < 300.0 && rss < 8.0 && compliance.ok();
        o.detail += std::string(variant == 0 ? "lattice labels: " : "; scrambled labels: ") + fmt("%.1f", secs) +
                    " s < 300 s, peak RSS " + fmt("%.2f", rss) + " GB < 8 GB, " + std::to_string(r.report.n_swap) +
                    " swaps, " + (compliance.ok() ? "compliant" : "NOT compliant: " + compliance.detail.substr(0, 120));
    }
    o.detail = "1000 qubits, 10^6 gates onto 32x32 grid; " + o.detail;
    return o;
}

Outcome metrics_ground_truth() {
    struct Case {
        const char* body;
        std::uint64_t depth;
        double density, retention, variance, measurement;
    };
    const Case cases[] = {
        {"qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; measure q -> c;", 3, 2.0 / 3.0, 1.0, 0.0, 1.0},
        {"qreg q[1]; h q[0];", 1, 1.0, 1.0, 0.0, 0.0},
        {"qreg q[3]; h q[0];", 1, 1.0 / 3.0, 1.0, 0.0, 0.0},
        {"qreg q[2]; h q[0]; barrier q; x q[1];", 2, 0.5, 0.5, 0.0, 0.0},
        {"qreg q[4]; creg c[1]; cx q[0],q[1]; cx q[0],q[2]; measure q[3] -> c[0];", 2, 3.0 / 8.0, 1.0, 0.5, 0.25},
    };
    Outcome o;
    int matched = 0;
    for (const auto& k : cases) {
        const auto r = metrics::analyze(qasm::flatten(parse(k.body)));
        if (r.depth == k.depth && r.gate_density == k.density && r.retention_lifespan == k.retention &&
            r.entanglement_variance == k.variance && r.measurement_density == k.measurement) {
            ++matched;
        } else {
            o.detail += std::string("mismatch on '") + k.body + "'; ";
        }
    }
    o.pass = matched == 5;
    o.detail += std::to_string(matched) + "/5 hand-computed reports match exactly (Bell: depth 3, density 2/3, retention 1, variance 0, measurement 1)";
    return o;
}

std::string cli_output(const std::vector<std::string>& args, int& code) {
    std::ostringstream out;
    std::ostringstream err;
    std::istringstream in;
    code = cli::run_cli(args, out, err, in);
    return out.str() + err.str();
}

Outcome determinism() {
    const std::string c = kData + "/circuits/";
    const std::string d = kData + "/devices/";
    const std::vector<std::pair<std::string, std::vector<std::string>>> commands{
        {"simulate_sv_ghz3.json", {"simulate", "sv", c + "ghz3.qasm", "--shots", "1000", "--seed", "7"}},
        {"simulate_stab_teleport.json", {"simulate", "stab", c + "teleport.qasm", "--seed", "3"}},
        {"simulate_dm_qft4.json", {"simulate", "dm", c + "qft4.qasm", "--shots", "500", "--seed", "11"}},
        {"transpile_qft4_heavy_hex7.json", {"transpile", c + "qft4.qasm", "--device", d + "heavy_hex7.json"}},
        {"transpile_qft4_line5.qasm", {"transpile", c + "qft4.qasm", "--device", d + "line5.json", "-o", "-"}},
        {"analyze_qft4.json", {"analyze", c + "qft4.qasm"}},
        {"devices_line5.txt", {"devices", d + "line5.json", "--format", "text"}},
        {"histogram_teleport.txt", {"simulate", "sv", c + "teleport.qasm", "--histogram"}},
        {"", {"simulate", "dm", c + "bell.qasm", "--device", d + "line5.json"}},
        {"", {"fidelity", c + "qft4.qasm", "--device", d + "ion11.json"}},
        {"", {"gates"}},
        {"", {"simulate", "stab", c + "t_gate.qasm"}},
    };
    Outcome o;
    int identical = 0;
    int golden = 0;
    int golden_total = 0;
    for (const auto& [file, args] : commands) {
        int c1 = 0;
        int c2 = 0;
        const auto a = cli_output(args, c1);
        const auto b = cli_output(args, c2);
        if (a == b && c1 == c2) {
            ++identical;
        } else {
            o.pass = false;
            o.detail += "differs: " + args[0] + " " + args[1] + "; ";
        }
        if (file.empty()) continue;
        ++golden_total;
        std::ifstream g(kGolden + "/" + file, std::ios::binary);
        std::stringstream buf;
        buf << g.rdbuf();
        if (g && buf.str() == a) {
            ++golden;
        } else {
            o.pass = false;
            o.detail += "golden mismatch: " + file + "; ";
        }
    }
    o.detail += std::to_string(identical) + "/" + std::to_string(commands.size()) +
                " commands byte-identical across two runs, " + std::to_string(golden) + "/" +
                std::to_string(golden_total) + " match committed golden output";
    return o;
}

Outcome memory_scaling() {
    Outcome o;
    std::string sizes;
    for (std::uint32_t n : {4u, 8u, 12u}) {
        g_alloc_bytes = 0;
        const sim::StateVector sv(n);
        const std::size_t got = g_alloc_bytes;
        const std::size_t want = std::size_t{16} << n;
        if (got != want) o.pass = false;
        sizes += "SV n=" + std::to_string(n) + " " + std::to_string(got) + "/" + std::to_string(want) + " B, ";
    }
    for (std::uint32_t n : {4u, 6u, 8u}) {
        g_alloc_bytes = 0;
        const sim::DensityMatrix dm(n);
        const std::size_t got = g_alloc_bytes;
        const std::size_t want = std::size_t{16} << (2 * n);
        if (got != want) o.pass = false;
        sizes += "DM n=" + std::to_string(n) + " " + std::to_string(got) + "/" + std::to_string(want) + " B, ";
    }
    o.detail = sizes + "allocated = 16*2^n (SV) and 16*4^n (DM)";
    return o;
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
        {"transpiler soundness", transpiler_soundness},
        {"backend agreement", backend_agreement},
        {"analytic noise", analytic_noise},
        {"round-trips", round_trips},
        {"scale check", scale_check},
        {"metrics ground truth", metrics_ground_truth},
        {"determinism", determinism},
        {"memory scaling", memory_scaling},
    };
    std::string only = argc > 1 ? argv[1] : "";
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!only.empty() && only != std::to_string(i + 1)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("threw: ") + e.what();
        }
        if (!o.pass) ++failed;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].first << ": " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
