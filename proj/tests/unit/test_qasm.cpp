// SPDX-License-Identifier: Apache-2.0
#include "qflow/error.hpp"
#include "qflow/qasm/binary.hpp"
#include "qflow/qasm/flatten.hpp"
#include "qflow/qasm/parser.hpp"
#include "qflow/qasm/printer.hpp"

#include "support/corpus.hpp"
#include "support/oracle.hpp"

#include <doctest.h>

#include <bit>
#include <numbers>
#include <random>

using namespace qflow;
using namespace qflow::qasm;
using qflow::testing::same_up_to_phase;

namespace {

const char* const kNested = R"(OPENQASM 2.0;
include "qelib1.inc";
qreg q[3];
gate rot(a, b) x { rz(a) x; ry(b / 2) x; }
gate pair(t) a, b { rot(t, -t) a; cx a, b; rot(t ^ 2, pi - t) b; }
gate tri(t) a, b, c { pair(t) a, b; pair(2 * t) b, c; ccx a, b, c; }
tri(0.3) q[0], q[1], q[2];
pair(-1.25) q[2], q[0];
)";

std::string random_program(std::mt19937_64& rng) {
    // Mix of statement forms; each line is valid on its own.
    static const char* kLines[] = {
        "h q[0];",
        "cx q[1], q[0];",
        "u3(pi/2, -pi/4, 3*pi/4) q[2];",
        "rz(-0.125) q[1];",
        "barrier q;",
        "measure q[0] -> c[0];",
        "measure q -> c;",
        "delay q[1], 25;",
        "reset q[2];",
        "if (c==3) x q[2];",
        "ccx q[0], q[1], q[2];",
        "crz(1e-3) q[0], q[2];",
        "swap q[0], q[2];",
        "h q;",
        "cu3(0.1, 0.2, 0.3) q[2], q[1];",
        "rxx(pi^2/7) q[0], q[1];",
        "mix(0.5) q[0], q[1];",
    };
    std::string text = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[3];\ncreg c[3];\n"
                       "gate mix(t) a, b { h a; crx(t) a, b; rz(t / 3) b; }\n";
    const std::size_t n = 1 + qflow::testing::pick(rng, 30);
    for (std::size_t i = 0; i < n; ++i) {
        text += kLines[qflow::testing::pick(rng, std::size(kLines))];
        text += '\n';
    }
    return text;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

}  // namespace

TEST_CASE("parse: bell with register-wide measure") {
    const Circuit c = parse_qasm(
        "OPENQASM 2.0; qreg q[2]; creg c[2]; h q[0]; cx q[0],q[1]; measure q -> c;");
    REQUIRE(c.registers.size() == 2);
    CHECK(c.registers[0] == Register{"q", RegisterKind::quantum, 2});
    CHECK(c.registers[1] == Register{"c", RegisterKind::classical, 2});
    REQUIRE(c.instructions.size() == 3);
    CHECK(c.instructions[2].opcode == "measure");
    CHECK(c.instructions[2].qubits[0].whole());

    const Circuit f = flatten(c);
    REQUIRE(f.instructions.size() == 4);
    CHECK(f.instructions[0].opcode == "h");
    CHECK(f.instructions[1].qubits == std::vector<WireRef>{{0, 0}, {0, 1}});
    CHECK(f.instructions[2].qubits[0] == WireRef{0, 0});
    CHECK(f.instructions[2].clbits[0] == WireRef{1, 0});
    CHECK(f.instructions[3].qubits[0] == WireRef{0, 1});
    CHECK(f.instructions[3].clbits[0] == WireRef{1, 1});
}

TEST_CASE("parse: constant folding of pi expressions") {
    const Circuit c = parse_qasm("OPENQASM 2.0; qreg q[1]; u3(pi/2,0,pi) q[0];");
    REQUIRE(c.instructions.size() == 1);
    const auto& p = c.instructions[0].params;
    REQUIRE(p.size() == 3);
    CHECK(same_bits(p[0], 1.5707963267948966));
    CHECK(same_bits(p[1], 0.0));
    CHECK(same_bits(p[2], 3.141592653589793));

    const Circuit d = parse_qasm("OPENQASM 2.0; qreg q[1]; rz(-2^2 + 3*pi/4 - sin(0) + sqrt(4)) q[0];");
    CHECK(d.instructions[0].params[0] == doctest::Approx(-4 + 3 * std::numbers::pi / 4 + 2));
    const Circuit e = parse_qasm("OPENQASM 2.0; qreg q[1]; rz(2^3^2) q[0];");
    CHECK(e.instructions[0].params[0] == 512.0);
}

TEST_CASE("parse: delay extension") {
    const Circuit c = parse_qasm("OPENQASM 2.0; qreg q[1]; delay q[0], 100;");
    REQUIRE(c.instructions.size() == 1);
    CHECK(c.instructions[0].opcode == "delay");
    CHECK(c.instructions[0].params == std::vector<double>{100.0});
    CHECK(c.instructions[0].qubits == std::vector<WireRef>{{0, 0}});
    CHECK(print_qasm(c).find("\ndelay q[0], 100;\n") != std::string::npos);

    const Circuit d = parse_qasm("OPENQASM 2.0; qreg q[1]; delay(100) q[0];");
    CHECK(d == c);
}

TEST_CASE("parse: opaque and conditions") {
    const Circuit c = parse_qasm(
        "OPENQASM 2.0; include \"qelib1.inc\"; opaque magic(a) x; qreg q[1]; creg c[1];"
        "if (c==1) x q[0];");
    const GateDef* def = c.find_gate_def("magic");
    REQUIRE(def != nullptr);
    CHECK(def->opaque);
    CHECK(def->body.empty());
    REQUIRE(c.instructions[0].condition.has_value());
    CHECK(c.instructions[0].condition->value == 1);
    CHECK(print_qasm(c).find("if (c==1) x q[0];") != std::string::npos);
}

TEST_CASE("parse: errors carry line and column") {
    auto parse_error = [](const std::string& text) -> std::string {
        try {
            (void)parse_qasm(text);
        } catch (const ParseError& e) {
            return e.what();
        }
        return "";
    };
    CHECK(parse_error("OPENQASM 3.0; qreg q[1];").find("version") != std::string::npos);
    CHECK(parse_error("OPENQASM 2.0;\nqreg q[1];\nh r[0];").find("line 3") != std::string::npos);
    CHECK(parse_error("OPENQASM 2.0; qreg q[1]; h q[1];").find("range") != std::string::npos);
    CHECK(parse_error("OPENQASM 2.0; qreg q[2]; cx q[0];").find("qubit") != std::string::npos);
    CHECK(parse_error("OPENQASM 2.0; qreg q[2]; h q[0]").empty() == false);
    CHECK(parse_error("OPENQASM 2.0; include \"other.inc\"; qreg q[1];").find("other.inc") !=
          std::string::npos);
    CHECK_FALSE(parse_error("OPENQASM 2.0; qreg q[2]; cx q[0], q[0];").empty());
    CHECK_FALSE(parse_error("OPENQASM 2.0; qreg q[1]; delay q[0], -1;").empty());
    CHECK_FALSE(parse_error("OPENQASM 2.0; qreg q[1]; delay q[0], 1.5;").empty());
    CHECK_FALSE(parse_error("OPENQASM 2.0; gate g a { g a; } qreg q[1];").empty());
    CHECK_FALSE(parse_error("OPENQASM 2.0; gate h a { x a; } qreg q[1];").empty());
    CHECK_FALSE(parse_error("OPENQASM 2.0; qreg q[1]; qreg q[2];").empty());
    CHECK_FALSE(parse_error("OPENQASM 2.0; qreg q[0];").empty());

    try {
        (void)parse_qasm("OPENQASM 2.0;\nqreg q[1];\n  bogus q[0];");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 3);
        CHECK(e.column() == 3);
    }
}

TEST_CASE("parse is deterministic") {
    std::mt19937_64 rng(5);
    for (int i = 0; i < 50; ++i) {
        const std::string text = random_program(rng);
        CHECK(parse_qasm(text) == parse_qasm(text));
    }
}

TEST_CASE("printer: single h line") {
    const Circuit c = parse_qasm("OPENQASM 2.0; qreg q[1]; h q[0];");
    const std::string text = print_qasm(c);
    std::size_t count = 0;
    for (std::size_t pos = 0; (pos = text.find("h q[0];", pos)) != std::string::npos; ++pos) ++count;
    CHECK(count == 1);
    CHECK(text.find("\nh q[0];\n") != std::string::npos);
}

TEST_CASE("printer: shortest round-trip numbers") {
    for (double v : {0.1, -0.0, 1e-300, 3.141592653589793, 1.0 / 3.0, -2.5e17, 5e-324}) {
        const std::string s = format_number(v);
        const Circuit c = parse_qasm("OPENQASM 2.0; qreg q[1]; rz(" + s + ") q[0];");
        CHECK(same_bits(c.instructions[0].params[0], v));
    }
}

TEST_CASE("round-trip text and binary over random programs") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 200; ++i) {
        const Circuit c = parse_qasm(random_program(rng));
        const Circuit again = parse_qasm(print_qasm(c));
        REQUIRE(again == c);
        const Circuit flat = flatten(c);
        const auto bytes = encode_binary(c);
        CHECK(decode_binary(bytes) == flat);
        CHECK(encode_binary(flat) == bytes);
        CHECK(encode_binary(c) == bytes);
    }
}

TEST_CASE("round-trip of generated circuits with raw doubles") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        Circuit c = qflow::testing::random_circuit(4, 60, seed);
        qflow::testing::measure_all(c);
        CHECK(parse_qasm(print_qasm(c)) == c);
        CHECK(decode_binary(encode_binary(c)) == c);
    }
}

TEST_CASE("binary: header and exact layout") {
    Circuit c;
    c.add_register("q", RegisterKind::quantum, 1);
    const auto empty = encode_binary(c);
    const std::vector<std::uint8_t> expected_empty{0x4E, 0x57, 0x51, 0x42, 0x01, 0x00,
                                                   0x01, 0x01, 'q',                // strings
                                                   0x01, 0x00, 0x00, 0x01,         // registers
                                                   0x00};                          // instructions
    CHECK(empty == expected_empty);

    c.add_register("c", RegisterKind::classical, 1);
    c.instructions.push_back(make_gate("rz", {1.0}, {{0, 0}}));
    c.instructions.push_back(make_measure({0, 0}, {1, 0}));
    c.instructions.back().condition = Condition{1, 300};
    const std::vector<std::uint8_t> expected{
        0x4E, 0x57, 0x51, 0x42, 0x01, 0x00,
        0x04, 0x01, 'q', 0x01, 'c', 0x02, 'r', 'z', 0x07, 'm', 'e', 'a', 's', 'u', 'r', 'e',
        0x02, 0x00, 0x00, 0x01, 0x01, 0x01, 0x01,
        0x02,
        0x02, 0x00, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0xF0, 0x3F, 0x01, 0x00, 0x00, 0x00,
        0x03, 0x01, 0x00, 0x01, 0x00, 0x00, 0x01, 0x01, 0x00, 0x01, 0xAC, 0x02,
    };
    CHECK(encode_binary(c) == expected);
    CHECK(decode_binary(expected) == c);
}

TEST_CASE("binary: decoder rejects malformed input") {
    Circuit c = qflow::testing::ghz(3);
    qflow::testing::measure_all(c);
    const auto bytes = encode_binary(c);

    auto decode_message = [](std::vector<std::uint8_t> b) -> std::string {
        try {
            (void)decode_binary(b);
        } catch (const DecodeError& e) {
            return e.what();
        }
        return "";
    };

    auto bad = bytes;
    bad[0] = bad[1] = bad[2] = bad[3] = 0;
    CHECK(decode_message(bad).find("magic") != std::string::npos);

    bad = bytes;
    bad[4] = 2;
    CHECK(decode_message(bad).find("version") != std::string::npos);

    // Every proper prefix is rejected, and the error names a byte offset.
    for (std::size_t len = 0; len < bytes.size(); ++len) {
        const std::string msg = decode_message({bytes.begin(), bytes.begin() + static_cast<long>(len)});
        CHECK_MESSAGE(!msg.empty(), "prefix length " << len);
        CHECK(msg.find("offset") != std::string::npos);
    }

    bad = bytes;
    bad.push_back(0);
    CHECK(decode_message(bad).find("trailing") != std::string::npos);

    // String-table index out of range: first register name index.
    bad = bytes;
    const std::size_t strings_end = [&] {
        std::size_t pos = 7;
        for (int i = 0; i < bytes[6]; ++i) pos += 1 + bytes[pos];
        return pos;
    }();
    bad[strings_end + 1] = 0x7F;
    CHECK(decode_message(bad).find("string table index") != std::string::npos);

    // Random byte corruption never crashes: it decodes or throws DecodeError.
    std::mt19937_64 rng(3);
    for (int i = 0; i < 2000; ++i) {
        bad = bytes;
        bad[qflow::testing::pick(rng, bad.size())] = static_cast<std::uint8_t>(rng());
        try {
            (void)decode_binary(bad);
        } catch (const DecodeError&) {
        }
    }
}

TEST_CASE("binary: smaller than text for a large h/cx circuit") {
    Circuit c = qflow::testing::empty_circuit(64);
    std::mt19937_64 rng(1);
    for (int i = 0; i < 200000; ++i) {
        if (i % 2 == 0) {
            qflow::testing::gate(c, "h", {static_cast<std::uint32_t>(rng() % 64)});
        } else {
            const auto a = static_cast<std::uint32_t>(rng() % 64);
            qflow::testing::gate(c, "cx", {a, (a + 1) % 64});
        }
    }
    CHECK(encode_binary(c).size() < print_qasm(c).size());
}

TEST_CASE("flatten: macro inlining and broadcast") {
    const Circuit c = parse_qasm(
        "OPENQASM 2.0; include \"qelib1.inc\"; gate bell a,b { h a; cx a,b; } qreg q[2]; bell q[0],q[1];");
    const Circuit f = flatten(c);
    REQUIRE(f.instructions.size() == 2);
    CHECK(f.instructions[0] == make_gate("h", {}, {{0, 0}}));
    CHECK(f.instructions[1] == make_gate("cx", {}, {{0, 0}, {0, 1}}));
    CHECK(f.gate_defs.empty());

    const Circuit b = flatten(parse_qasm("OPENQASM 2.0; include \"qelib1.inc\"; qreg q[3]; h q;"));
    REQUIRE(b.instructions.size() == 3);
    for (std::uint32_t i = 0; i < 3; ++i) CHECK(b.instructions[i] == make_gate("h", {}, {{0, i}}));

    const Circuit m = flatten(parse_qasm(
        "OPENQASM 2.0; include \"qelib1.inc\"; qreg a[2]; qreg b[2]; cx a, b; cx a[0], b;"));
    REQUIRE(m.instructions.size() == 4);
    CHECK(m.instructions[1] == make_gate("cx", {}, {{0, 1}, {1, 1}}));
    CHECK(m.instructions[3] == make_gate("cx", {}, {{0, 0}, {1, 1}}));
    CHECK(is_flat(m));
}

TEST_CASE("flatten: conditions propagate into macro bodies") {
    const Circuit c = flatten(parse_qasm(
        "OPENQASM 2.0; include \"qelib1.inc\"; gate g a,b { h a; cx a,b; } qreg q[2]; creg c[1];"
        "if (c==1) g q[0], q[1];"));
    REQUIRE(c.instructions.size() == 2);
    for (const auto& in : c.instructions) {
        REQUIRE(in.condition.has_value());
        CHECK(in.condition->value == 1);
    }
}

TEST_CASE("flatten: opaque calls and depth guard") {
    CHECK_THROWS_AS(flatten(parse_qasm("OPENQASM 2.0; opaque o a; qreg q[1]; o q[0];")), CircuitError);

    // A chain deeper than the macro limit.
    std::string text = "OPENQASM 2.0; include \"qelib1.inc\"; gate g0 a { x a; }\n";
    for (int i = 1; i <= kMaxMacroDepth + 1; ++i) {
        text += "gate g" + std::to_string(i) + " a { g" + std::to_string(i - 1) + " a; }\n";
    }
    text += "qreg q[1]; g" + std::to_string(kMaxMacroDepth + 1) + " q[0];";
    CHECK_THROWS_AS(flatten(parse_qasm(text)), CircuitError);
}

TEST_CASE("flatten preserves semantics against symbolic macro expansion") {
    const Circuit c = parse_qasm(kNested);
    const Circuit f = flatten(c);
    CHECK(is_flat(f));
    for (const auto& in : f.instructions) CHECK(gates::find_gate(in.opcode) != nullptr);
    const auto expected = qflow::testing::circuit_unitary(c);
    const auto actual = qflow::testing::circuit_unitary(f);
    CHECK((expected - actual).cwiseAbs().maxCoeff() < 1e-12);

    std::mt19937_64 rng(17);
    for (int i = 0; i < 40; ++i) {
        const Circuit r = parse_qasm(random_program(rng));
        Circuit gates_only = r;
        std::erase_if(gates_only.instructions, [](const Instruction& in) {
            if (in.condition) return true;
            if (is_directive(in.opcode) && in.opcode != "barrier" && in.opcode != "delay") return true;
            return std::any_of(in.qubits.begin(), in.qubits.end(), [](const WireRef& w) { return w.whole(); });
        });
        const auto symbolic = qflow::testing::circuit_unitary(gates_only);
        const auto inlined = qflow::testing::circuit_unitary(flatten(gates_only));
        CHECK((symbolic - inlined).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("validate rejects broken circuits") {
    Circuit c = qflow::testing::empty_circuit(2, 1);
    c.instructions.push_back(make_gate("cx", {}, {{0, 0}}));
    CHECK_THROWS_AS(validate(c), CircuitError);
    c.instructions = {make_gate("rz", {}, {{0, 0}})};
    CHECK_THROWS_AS(validate(c), CircuitError);
    c.instructions = {make_gate("h", {}, {{0, 2}})};
    CHECK_THROWS_AS(validate(c), CircuitError);
    c.instructions = {make_gate("h", {}, {{1, 0}})};
    CHECK_THROWS_AS(validate(c), CircuitError);
    c.instructions = {make_gate("cx", {}, {{0, 1}, {0, 1}})};
    CHECK_THROWS_AS(validate(c), CircuitError);
    c.instructions = {make_gate("delay", {2.5}, {{0, 1}})};
    CHECK_THROWS_AS(validate(c), CircuitError);
    c.instructions = {make_gate("h", {}, {{0, 1}})};
    CHECK_NOTHROW(validate(c));
}
