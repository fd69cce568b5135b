// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include "json_io.hpp"

#include "qflow/error.hpp"
#include "qflow/qasm/binary.hpp"
#include "qflow/qasm/flatten.hpp"
#include "qflow/qasm/parser.hpp"
#include "qflow/qasm/printer.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <sstream>

namespace qflow::cli {

namespace {

namespace fs = std::filesystem;

/// Unreadable or unwritable files count as input errors.
class IoError : public Error {
  public:
    using Error::Error;
};

std::string one_line(std::string s) {
    for (char& c : s) {
        if (c == '\n' || c == '\r') c = ' ';
    }
    return s;
}

std::vector<std::uint8_t> read_bytes(const std::string& path, std::istream& in) {
    if (path == "-") return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "'");
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

qasm::Circuit decode_circuit(const std::vector<std::uint8_t>& bytes, const std::string& path) {
    if (qasm::looks_binary(bytes) || fs::path(path).extension() == ".nwqb") return qasm::decode_binary(bytes);
    qasm::ParseOptions opts;
    opts.source_name = path;
    return qasm::parse_qasm(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()), opts);
}

qasm::Circuit load_circuit(const std::string& path, std::istream& in) { return decode_circuit(read_bytes(path, in), path); }

bool wants_binary(const std::string& path) { return fs::path(path).extension() == ".nwqb"; }

std::vector<std::uint8_t> serialize(const qasm::Circuit& c, const std::string& path) {
    if (wants_binary(path)) return qasm::encode_binary(c);
    const std::string text = qasm::print_qasm(c);
    return {text.begin(), text.end()};
}

void write_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes, std::ostream& out) {
    if (path == "-") {
        out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot write '" + path + "'");
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!f) throw IoError("cannot write '" + path + "'");
}

void write_text(const std::string& path, const std::string& text, std::ostream& out) {
    write_bytes(path, {text.begin(), text.end()}, out);
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

struct TranspileArgs {
    std::string input;
    std::string device;
    std::string output;
    std::string report;
    std::uint64_t seed = 42;
    int opt_level = 1;
};

struct SimulateArgs {
    std::string backend;
    std::string input;
    std::string device;
    std::string output;
    std::uint64_t shots = 1024;
    std::uint64_t seed = 42;
    bool histogram = false;
    bool timing = false;
    bool amplitudes = false;
};

struct Args {
    TranspileArgs transpile;
    SimulateArgs simulate;
    std::string input;
    std::string output;
    std::string device;
    std::string format = "json";
    std::uint64_t seed = 42;
    bool physical = false;
};

int cmd_transpile(const TranspileArgs& a, std::ostream& out, std::istream& in) {
    const auto device = device::load_device_file(a.device);
    const auto circuit = load_circuit(a.input, in);
    const auto result = transpile::transpile(circuit, device, a.seed, a.opt_level);
    const std::string report = dump(to_json(result.report));
    if (!a.output.empty()) write_bytes(a.output, serialize(result.circuit, a.output), out);
    if (!a.report.empty()) write_text(a.report, report, out);
    if (a.output != "-") out << report;
    return kOk;
}

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::istream& in) {
    std::optional<device::DeviceConfig> device;
    if (!a.device.empty()) device = device::load_device_file(a.device);
    const auto circuit = load_circuit(a.input, in);
    sim::RunOptions opts;
    opts.seed = a.seed;
    opts.shots = a.shots;
    opts.timing = a.timing;
    opts.amplitudes = a.amplitudes;
    sim::RunResult r;
    if (a.backend == "sv") {
        r = sim::sv_run(circuit, opts);
    } else if (a.backend == "dm") {
        opts.fidelity = device.has_value();
        r = sim::dm_run(circuit, device ? &*device : nullptr, opts);
    } else {
        r = sim::stab_run(circuit, opts);
    }
    const std::string json = dump(to_json(r));
    if (a.histogram) {
        if (!a.output.empty()) write_text(a.output, json, out);
        out << histogram_text(r.counts);
    } else if (a.output.empty()) {
        out << json;
    } else {
        write_text(a.output, json, out);
    }
    return kOk;
}

int cmd_analyze(const Args& a, std::ostream& out, std::istream& in) {
    const auto report = metrics::analyze(qasm::flatten(load_circuit(a.input, in)));
    const Json j = to_json(report);
    if (a.format == "json") {
        out << dump(j);
        return kOk;
    }
    for (const auto& [k, v] : j.items()) {
        if (k == "basis_histogram") continue;
        out << k << ": " << v.dump() << '\n';
    }
    for (const auto& [name, n] : report.basis_histogram) out << "  " << name << ": " << n << '\n';
    return kOk;
}

int cmd_convert(const Args& a, std::ostream& out, std::istream& in) {
    const auto before = read_bytes(a.input, in);
    const auto after = serialize(decode_circuit(before, a.input), a.output);
    write_bytes(a.output, after, out);
    if (a.output == "-") return kOk;
    const auto delta = static_cast<long long>(after.size()) - static_cast<long long>(before.size());
    std::ostringstream ratio;
    ratio << std::fixed << std::setprecision(2)
          << (before.empty() ? 0.0 : 100.0 * static_cast<double>(after.size()) / static_cast<double>(before.size()));
    out << a.input << ": " << before.size() << " bytes -> " << a.output << ": " << after.size() << " bytes (delta "
        << (delta > 0 ? "+" : "") << delta << ", " << ratio.str() << "%)\n";
    return kOk;
}

int cmd_fidelity(const Args& a, std::ostream& out, std::istream& in) {
    const auto device = device::load_device_file(a.device);
    auto circuit = qasm::flatten(load_circuit(a.input, in));
    if (!a.physical) circuit = transpile::transpile(circuit, device, a.seed, 1).circuit;
    const auto rho = sim::dm_final_state(circuit, &device);
    const auto psi = sim::sv_final_state(circuit);
    Json j;
    j["device"] = device.name;
    j["n_qubits"] = circuit.num_qubits();
    j["transpiled"] = !a.physical;
    j["fidelity"] = sim::fidelity(rho, psi);
    out << dump(j);
    return kOk;
}

int cmd_devices(const Args& a, std::ostream& out) {
    const auto device = device::load_device_file(a.device);
    const Json j = device_summary(device);
    if (a.format == "json") {
        out << dump(j);
        return kOk;
    }
    out << "name: " << device.name << '\n' << "qubits: " << device.num_qubits << '\n' << "basis:";
    for (const auto& g : device.basis_gates) out << ' ' << g;
    const auto edges = device.topology.edges();
    out << '\n' << "edges (" << edges.size() << "):";
    for (const auto& [x, y] : edges) out << ' ' << x << '-' << y;
    out << '\n';
    for (const auto& line : adjacency_lines(device)) out << "  " << line << '\n';
    for (const auto& w : device.warnings) out << "warning: " << w << '\n';
    return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
    CLI::App app{"qflow: OpenQASM transpiler, simulators and circuit metrics", "qflow"};
    app.require_subcommand(1);
    Args a;
    const auto formats = CLI::IsMember({"json", "text"});

    auto* transpile = app.add_subcommand("transpile", "Map a circuit onto a device");
    transpile->add_option("input", a.transpile.input, "Circuit (.qasm or .nwqb, - for stdin)")->required();
    transpile->add_option("--device,-d", a.transpile.device, "Device JSON")->required();
    transpile->add_option("-o,--output", a.transpile.output, "Output circuit; .nwqb selects binary, - writes to stdout");
    transpile->add_option("--report", a.transpile.report, "Also write the report JSON here");
    transpile->add_option("--seed", a.transpile.seed, "Seed");
    transpile->add_option("--opt-level,-O", a.transpile.opt_level, "Optimization level")->check(CLI::Range(0, 1));

    auto* simulate = app.add_subcommand("simulate", "Run a circuit on a simulator backend");
    simulate->add_option("backend", a.simulate.backend, "sv, dm or stab")->required()->check(CLI::IsMember({"sv", "dm", "stab"}));
    simulate->add_option("input", a.simulate.input, "Circuit (.qasm or .nwqb, - for stdin)")->required();
    simulate->add_option("--device,-d", a.simulate.device, "Device JSON supplying the dm noise model");
    simulate->add_option("--shots", a.simulate.shots, "Shots")->check(CLI::PositiveNumber);
    simulate->add_option("--seed", a.simulate.seed, "Seed");
    simulate->add_option("-o,--output", a.simulate.output, "Write the result JSON here");
    simulate->add_flag("--histogram", a.simulate.histogram, "Print a ranked text histogram of the counts");
    simulate->add_flag("--timing", a.simulate.timing, "Record wall time (output is then not reproducible)");
    simulate->add_flag("--amplitudes", a.simulate.amplitudes, "Attach final amplitudes (sv)");

    auto* analyze = app.add_subcommand("analyze", "Circuit metrics");
    analyze->add_option("input", a.input, "Circuit")->required();
    analyze->add_option("--format", a.format, "json or text")->check(formats);

    auto* convert = app.add_subcommand("convert", "Convert between .qasm and .nwqb");
    convert->add_option("input", a.input, "Source circuit")->required();
    convert->add_option("output", a.output, "Destination; the extension selects the format")->required();

    auto* fid = app.add_subcommand("fidelity", "Noisy-vs-ideal state fidelity of a circuit transpiled onto a device");
    fid->add_option("input", a.input, "Circuit")->required();
    fid->add_option("--device,-d", a.device, "Device JSON")->required();
    fid->add_option("--seed", a.seed, "Transpiler seed");
    fid->add_flag("--physical", a.physical, "Input is already device-native; skip transpilation");

    auto* devices = app.add_subcommand("devices", "Summarize a device description");
    devices->add_option("device", a.device, "Device JSON")->required();
    devices->add_option("--format", a.format, "json or text")->check(formats);

    app.add_subcommand("gates", "Builtin gate manifest");

    std::vector<const char*> argv{"qflow"};
    for (const auto& s : args) argv.push_back(s.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kInputError;
    }

    try {
        if (*transpile) return cmd_transpile(a.transpile, out, in);
        if (*simulate) return cmd_simulate(a.simulate, out, in);
        if (*analyze) return cmd_analyze(a, out, in);
        if (*convert) return cmd_convert(a, out, in);
        if (*fid) return cmd_fidelity(a, out, in);
        if (*devices) return cmd_devices(a, out);
        out << dump(gate_manifest());
        return kOk;
    } catch (const DeviceError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kDeviceError;
    } catch (const TranspileError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kTranspileError;
    } catch (const BackendError& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kBackendError;
    } catch (const std::exception& e) {
        err << "error: " << one_line(e.what()) << '\n';
        return kInputError;
    }
}

}  // namespace qflow::cli
