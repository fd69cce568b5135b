// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include "qflow/qasm/binary.hpp"
#include "qflow/qasm/flatten.hpp"
#include "qflow/qasm/parser.hpp"
#include "qflow/qasm/printer.hpp"

#include "support/corpus.hpp"

#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kData = QFLOW_DATA_DIR;
const std::string kLine5 = kData + "/devices/line5.json";

std::string circuit_path(const std::string& name) { return kData + "/circuits/" + name; }

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(const std::vector<std::string>& args, const std::string& stdin_text = "") {
    std::ostringstream out;
    std::ostringstream err;
    std::istringstream in(stdin_text);
    const int code = qflow::cli::run_cli(args, out, err, in);
    return {code, out.str(), err.str()};
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("qflow_cli_" + std::to_string(::getpid()))) { fs::create_directories(path); }
    ~TempDir() { fs::remove_all(path); }
    std::string operator/(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

void spit(const std::string& path, const std::string& text) { std::ofstream(path, std::ios::binary) << text; }

bool single_error_line(const std::string& err) {
    return err.rfind("error: ", 0) == 0 && err.find('\n') == err.size() - 1;
}

}  // namespace

TEST_CASE("transpile bell onto line5") {
    TempDir tmp;
    const auto r = run({"transpile", circuit_path("bell.qasm"), "--device", kLine5, "-o", tmp / "bell_phys.qasm"});
    REQUIRE(r.code == 0);
    const auto report = json::parse(r.out);
    CHECK(report["n_swap"] == 0);
    CHECK(report["n_2q"] == 1);
    CHECK(report.contains("makespan_ns"));
    const auto phys = qflow::qasm::parse_qasm(slurp(tmp / "bell_phys.qasm"));
    CHECK(phys.num_qubits() == 5);

    const auto sim = run({"simulate", "dm", tmp / "bell_phys.qasm", "--device", kLine5});
    REQUIRE(sim.code == 0);
    const auto result = json::parse(sim.out);
    REQUIRE(result.contains("fidelity"));
    CHECK(result["fidelity"].get<double>() >= 0.0);
    CHECK(result["fidelity"].get<double>() <= 1.0);
    CHECK(result["fidelity"].get<double>() < 1.0);
    CHECK(result["backend"] == "dm");
    CHECK(result["shots"] == 1024);
    CHECK(result["seed"] == 42);
}

TEST_CASE("transpile writes binary when asked") {
    TempDir tmp;
    REQUIRE(run({"transpile", circuit_path("ghz3.qasm"), "-d", kLine5, "-o", tmp / "g.nwqb"}).code == 0);
    const auto bytes = slurp(tmp / "g.nwqb");
    CHECK(bytes.rfind("NWQB", 0) == 0);
    CHECK(run({"simulate", "sv", tmp / "g.nwqb"}).code == 0);
}

TEST_CASE("transpile errors map to exit codes") {
    TempDir tmp;
    auto r = run({"transpile", circuit_path("bell.qasm"), "--device", tmp / "missing.json"});
    CHECK(r.code == 2);
    CHECK(single_error_line(r.err));

    spit(tmp / "two.json", R"({"name":"two","num_qubits":2,"basis_gates":["u3","cx"],"coupling_map":[[0,1]],
        "gate_durations_ns":{"u3":10,"cx":100},"cycle_time_ns":1})");
    r = run({"transpile", circuit_path("ghz3.qasm"), "--device", tmp / "two.json"});
    CHECK(r.code == 3);
    CHECK(r.err.find("too many qubits") != std::string::npos);
    CHECK(single_error_line(r.err));

    spit(tmp / "bad.json", R"({"name":"bad","num_qubits":1,"basis_gates":["u3"],"coupling_map":[],
        "gate_durations_ns":{"u3":10},"t1_us":[50],"t2_us":[120],"cycle_time_ns":1})");
    r = run({"devices", tmp / "bad.json"});
    CHECK(r.code == 2);
    CHECK(r.err.find("t2_us[0]") != std::string::npos);

    spit(tmp / "broken.qasm", "OPENQASM 2.0;\nqreg q[2];\nfoo q[0];\n");
    r = run({"transpile", tmp / "broken.qasm", "--device", kLine5});
    CHECK(r.code == 1);
    CHECK(single_error_line(r.err));
    CHECK(run({"analyze", tmp / "nothing.qasm"}).code == 1);
}

TEST_CASE("simulate is byte-identical across runs") {
    const std::vector<std::vector<std::string>> commands{
        {"simulate", "sv", circuit_path("ghz3.qasm"), "--shots", "1000", "--seed", "7"},
        {"simulate", "dm", circuit_path("qft4.qasm"), "--shots", "500"},
        {"simulate", "stab", circuit_path("teleport.qasm"), "--seed", "3"},
        {"simulate", "sv", circuit_path("teleport.qasm"), "--histogram"},
        {"transpile", circuit_path("qft4.qasm"), "-d", kData + "/devices/heavy_hex7.json", "--seed", "5"},
        {"analyze", circuit_path("qft4.qasm")},
        {"devices", kData + "/devices/ion11.json", "--format", "text"},
        {"gates"},
    };
    for (const auto& args : commands) {
        const auto a = run(args);
        const auto b = run(args);
        CAPTURE(args.front());
        CHECK(a.code == 0);
        CHECK(a.out == b.out);
        CHECK(!a.out.empty());
    }
    CHECK(run(commands[0]).out != run({"simulate", "sv", circuit_path("ghz3.qasm"), "--shots", "1000", "--seed", "8"}).out);
}

TEST_CASE("ghz3 counts through the CLI") {
    const auto j = json::parse(run({"simulate", "sv", circuit_path("ghz3.qasm"), "--shots", "1000", "--seed", "7"}).out);
    CHECK(j["counts"].size() == 2);
    CHECK(j["counts"]["000"].get<int>() + j["counts"]["111"].get<int>() == 1000);
    CHECK(j["wall_time_ms"] == 0.0);
    CHECK_FALSE(j.contains("fidelity"));
    CHECK_FALSE(j.contains("amplitudes"));
}

TEST_CASE("stab rejects non-Clifford input") {
    const auto r = run({"simulate", "stab", circuit_path("t_gate.qasm")});
    CHECK(r.code == 4);
    CHECK(r.err.find("non-Clifford") != std::string::npos);
    CHECK(r.err.find(" t") != std::string::npos);
    CHECK(single_error_line(r.err));
}

TEST_CASE("backend caps surface as exit 4") {
    TempDir tmp;
    qflow::qasm::Circuit wide = qflow::testing::ghz(14);
    spit(tmp / "wide.qasm", qflow::qasm::print_qasm(wide));
    const auto r = run({"simulate", "dm", tmp / "wide.qasm"});
    CHECK(r.code == 4);
    CHECK(single_error_line(r.err));
}

TEST_CASE("histogram ranks outcomes by frequency") {
    const auto r = run({"simulate", "sv", circuit_path("qft4.qasm"), "--histogram", "--shots", "2000"});
    REQUIRE(r.code == 0);
    std::istringstream lines(r.out);
    std::string line;
    long previous = -1;
    int rows = 0;
    while (std::getline(lines, line)) {
        const auto bar = line.find(" | ");
        REQUIRE(bar != std::string::npos);
        const auto hashes = line.find_last_of('#');
        const long count = std::stol(line.substr(hashes + 2));
        if (previous >= 0) CHECK(count <= previous);
        previous = count;
        ++rows;
    }
    CHECK(rows == 16);
}

TEST_CASE("histogram with output file keeps the JSON") {
    TempDir tmp;
    const auto r = run({"simulate", "sv", circuit_path("bell.qasm"), "--histogram", "-o", tmp / "r.json"});
    REQUIRE(r.code == 0);
    CHECK(json::parse(slurp(tmp / "r.json"))["shots"] == 1024);
    CHECK(r.out.find('{') == std::string::npos);
}

TEST_CASE("convert round trip") {
    TempDir tmp;
    for (const char* name : {"bell.qasm", "qft4.qasm", "teleport.qasm", "idle_delay.qasm"}) {
        const auto original = qflow::qasm::parse_qasm(slurp(circuit_path(name)));
        auto r = run({"convert", circuit_path(name), tmp / "c.nwqb"});
        REQUIRE(r.code == 0);
        CHECK(r.out.find("delta") != std::string::npos);
        r = run({"convert", tmp / "c.nwqb", tmp / "c2.qasm"});
        REQUIRE(r.code == 0);
        CAPTURE(name);
        CHECK(qflow::qasm::parse_qasm(slurp(tmp / "c2.qasm")) == qflow::qasm::flatten(original));
    }
}

TEST_CASE("convert rejects corrupt binaries") {
    TempDir tmp;
    spit(tmp / "bad.nwqb", "NOPE\x01\x00");
    const auto r = run({"convert", tmp / "bad.nwqb", tmp / "x.qasm"});
    CHECK(r.code == 1);
    CHECK(r.err.find("bad magic") != std::string::npos);
    CHECK(single_error_line(r.err));
    auto good = qflow::qasm::encode_binary(qflow::testing::bell());
    good.resize(good.size() - 3);
    spit(tmp / "short.nwqb", std::string(good.begin(), good.end()));
    CHECK(run({"convert", tmp / "short.nwqb", tmp / "x.qasm"}).code == 1);
}

TEST_CASE("binary is smaller on large circuits") {
    TempDir tmp;
    spit(tmp / "big.qasm", qflow::qasm::print_qasm(qflow::testing::random_circuit(20, 5000, 9)));
    const auto r = run({"convert", tmp / "big.qasm", tmp / "big.nwqb"});
    REQUIRE(r.code == 0);
    CHECK(fs::file_size(tmp / "big.nwqb") < fs::file_size(tmp / "big.qasm"));
    CHECK(r.out.find("delta -") != std::string::npos);
}

TEST_CASE("analyze bell") {
    const auto j = json::parse(run({"analyze", circuit_path("bell.qasm")}).out);
    CHECK(j["depth"] == 3);
    CHECK(j["n_measure"] == 2);
    CHECK(j["gate_density"].get<double>() == doctest::Approx(2.0 / 3.0));
    const auto text = run({"analyze", circuit_path("bell.qasm"), "--format", "text"});
    CHECK(text.out.find("depth: 3") != std::string::npos);
}

TEST_CASE("devices line5") {
    const auto j = json::parse(run({"devices", kLine5}).out);
    CHECK(j["edges"].size() == 4);
    CHECK(j["n_qubits"] == 5);
    CHECK(j["adjacency"][1] == "q1: 0 2");
    const auto text = run({"devices", kLine5, "--format", "text"});
    CHECK(text.out.find("edges (4)") != std::string::npos);
}

TEST_CASE("gate manifest") {
    const auto j = json::parse(run({"gates"}).out);
    bool found = false;
    for (const auto& g : j["gates"]) {
        if (g["name"] == "cx") {
            found = true;
            CHECK(g["arity"] == 2);
            CHECK(g["matrix"].size() == 16);
            CHECK(g["matrix"][1 * 4 + 3] == json::array({1.0, 0.0}));
        }
        if (g["name"] == "rz") CHECK(g["definition"] == "gate rz(phi) q0 { u1(phi) q0; }");
    }
    CHECK(found);
}

TEST_CASE("pipeline through stdin") {
    const auto t = run({"transpile", circuit_path("qft4.qasm"), "-d", kLine5, "-o", "-"});
    REQUIRE(t.code == 0);
    CHECK(t.out.rfind("OPENQASM", 0) == 0);
    const auto s = run({"simulate", "dm", "-", "-d", kLine5, "--shots", "64"}, t.out);
    REQUIRE(s.code == 0);
    const double f = json::parse(s.out)["fidelity"];
    CHECK(f > 0.0);
    CHECK(f <= 1.0);
}

TEST_CASE("fidelity command") {
    auto j = json::parse(run({"fidelity", circuit_path("bell.qasm"), "-d", kLine5}).out);
    CHECK(j["fidelity"].get<double>() > 0.9);
    CHECK(j["fidelity"].get<double>() < 1.0);
    CHECK(j["transpiled"] == true);
    const auto ion = kData + "/devices/ion11.json";
    j = json::parse(run({"fidelity", circuit_path("ghz3.qasm"), "-d", ion}).out);
    CHECK(j["device"] == "ion11");
    CHECK(run({"fidelity", circuit_path("bell.qasm"), "-d", kLine5, "--physical"}).code == 4);
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"simulate", "gpu", circuit_path("bell.qasm")}).code == 1);
    CHECK(run({"simulate", "sv", circuit_path("bell.qasm"), "--shots", "0"}).code == 1);
    CHECK(run({"transpile", circuit_path("bell.qasm"), "-d", kLine5, "-O", "2"}).code == 1);
    const auto r = run({"frobnicate"});
    CHECK(r.code == 1);
    CHECK(single_error_line(r.err));
    const auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
}
