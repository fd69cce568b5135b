// SPDX-License-Identifier: Apache-2.0
#include "qflow/qasm/binary.hpp"

#include "qflow/error.hpp"
#include "qflow/qasm/flatten.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <string>
#include <unordered_map>

namespace qflow::qasm {

namespace leb128 {
void put(std::vector<std::uint8_t>& out, std::uint64_t value) {
    do {
        std::uint8_t byte = value & 0x7F;
        value >>= 7;
        if (value != 0) byte |= 0x80;
        out.push_back(byte);
    } while (value != 0);
}
}  // namespace leb128

namespace {

class StringTable {
  public:
    std::uint64_t intern(const std::string& s) {
        auto [it, inserted] = index_.try_emplace(s, entries_.size());
        if (inserted) entries_.push_back(&it->first);
        return it->second;
    }

    const std::vector<const std::string*>& entries() const { return entries_; }

  private:
    std::unordered_map<std::string, std::uint64_t> index_;
    std::vector<const std::string*> entries_;
};

void put_f64(std::vector<std::uint8_t>& out, double v) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(bits >> (8 * i)));
}

void put_wires(std::vector<std::uint8_t>& out, const std::vector<WireRef>& wires) {
    leb128::put(out, wires.size());
    for (const WireRef& w : wires) {
        leb128::put(out, w.reg);
        leb128::put(out, w.index);
    }
}

class Reader {
  public:
    explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

    std::size_t offset() const { return pos_; }
    bool at_end() const { return pos_ == bytes_.size(); }

    [[noreturn]] void fail(const std::string& message, std::size_t at) const {
        throw DecodeError(message, at);
    }

    std::uint8_t u8() {
        if (pos_ >= bytes_.size()) fail("truncated stream", pos_);
        return bytes_[pos_++];
    }

    std::uint16_t u16() {
        const std::uint16_t lo = u8();
        const std::uint16_t hi = u8();
        return static_cast<std::uint16_t>(lo | (hi << 8));
    }

    double f64() {
        if (bytes_.size() - pos_ < 8) fail("truncated stream", pos_);
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= std::uint64_t{bytes_[pos_ + i]} << (8 * i);
        pos_ += 8;
        return std::bit_cast<double>(bits);
    }

    std::uint64_t varint() {
        const std::size_t start = pos_;
        std::uint64_t value = 0;
        for (int shift = 0;; shift += 7) {
            if (shift > 63) fail("varint too long", start);
            const std::uint8_t byte = u8();
            const std::uint64_t part = byte & 0x7F;
            if (shift == 63 && part > 1) fail("varint overflows 64 bits", start);
            value |= part << shift;
            if (!(byte & 0x80)) break;
        }
        return value;
    }

    // A count that cannot exceed the bytes left (each element needs >= `min_size` bytes).
    std::uint64_t count(std::size_t min_size) {
        const std::size_t at = pos_;
        const std::uint64_t n = varint();
        if (min_size > 0 && n > (bytes_.size() - pos_) / min_size) fail("truncated stream", at);
        return n;
    }

    std::string bytes_string(std::uint64_t length) {
        if (length > bytes_.size() - pos_) fail("truncated stream", pos_);
        std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), length);
        pos_ += length;
        return s;
    }

  private:
    std::span<const std::uint8_t> bytes_;
    std::size_t pos_ = 0;
};

}  // namespace

bool looks_binary(std::span<const std::uint8_t> bytes) noexcept {
    return bytes.size() >= 4 && std::equal(kBinaryMagic.begin(), kBinaryMagic.end(), bytes.begin());
}

std::vector<std::uint8_t> encode_binary(const Circuit& input) {
    const bool already_flat = is_flat(input);
    const Circuit flat = already_flat ? Circuit{} : flatten(input);
    const Circuit& c = already_flat ? input : flat;

    StringTable strings;
    for (const Register& r : c.registers) strings.intern(r.name);
    for (const Instruction& instr : c.instructions) strings.intern(instr.opcode);

    std::vector<std::uint8_t> out;
    out.reserve(64 + c.instructions.size() * 10);
    out.insert(out.end(), kBinaryMagic.begin(), kBinaryMagic.end());
    out.push_back(static_cast<std::uint8_t>(kBinaryVersion & 0xFF));
    out.push_back(static_cast<std::uint8_t>(kBinaryVersion >> 8));

    leb128::put(out, strings.entries().size());
    for (const std::string* s : strings.entries()) {
        leb128::put(out, s->size());
        out.insert(out.end(), s->begin(), s->end());
    }

    leb128::put(out, c.registers.size());
    for (const Register& r : c.registers) {
        leb128::put(out, strings.intern(r.name));
        out.push_back(static_cast<std::uint8_t>(r.kind));
        leb128::put(out, r.size);
    }

    leb128::put(out, c.instructions.size());
    for (const Instruction& instr : c.instructions) {
        leb128::put(out, strings.intern(instr.opcode));
        out.push_back(instr.condition ? 1 : 0);
        leb128::put(out, instr.params.size());
        for (double p : instr.params) put_f64(out, p);
        put_wires(out, instr.qubits);
        put_wires(out, instr.clbits);
        if (instr.condition) {
            leb128::put(out, instr.condition->creg);
            leb128::put(out, instr.condition->value);
        }
    }
    return out;
}

Circuit decode_binary(std::span<const std::uint8_t> bytes) {
    Reader in(bytes);
    if (!looks_binary(bytes)) {
        in.fail("bad magic: not an NWQB stream", 0);
    }
    for (int i = 0; i < 4; ++i) in.u8();
    const std::size_t version_at = in.offset();
    const std::uint16_t version = in.u16();
    if (version != kBinaryVersion) {
        in.fail("unsupported NWQB version " + std::to_string(version), version_at);
    }

    std::vector<std::string> strings(in.count(1));
    for (auto& s : strings) s = in.bytes_string(in.varint());

    auto string_at = [&](std::size_t at) -> const std::string& {
        const std::uint64_t idx = in.varint();
        if (idx >= strings.size()) {
            in.fail("string table index " + std::to_string(idx) + " out of range", at);
        }
        return strings[idx];
    };

    Circuit c;
    const std::uint64_t nregs = in.count(3);
    c.registers.reserve(nregs);
    for (std::uint64_t i = 0; i < nregs; ++i) {
        const std::size_t at = in.offset();
        Register r;
        r.name = string_at(at);
        const std::uint8_t kind = in.u8();
        if (kind > 1) in.fail("invalid register kind " + std::to_string(kind), at);
        r.kind = static_cast<RegisterKind>(kind);
        const std::uint64_t size = in.varint();
        if (size == 0 || size > std::numeric_limits<std::uint32_t>::max() / 2) {
            in.fail("invalid register size", at);
        }
        r.size = static_cast<std::uint32_t>(size);
        if (c.find_register(r.name)) in.fail("duplicate register '" + r.name + "'", at);
        c.registers.push_back(std::move(r));
    }

    auto read_wires = [&](RegisterKind kind, std::vector<WireRef>& wires) {
        const std::uint64_t n = in.count(2);
        wires.reserve(n);
        for (std::uint64_t k = 0; k < n; ++k) {
            const std::size_t at = in.offset();
            const std::uint64_t reg = in.varint();
            const std::uint64_t wire = in.varint();
            if (reg >= c.registers.size()) {
                in.fail("register index " + std::to_string(reg) + " out of range", at);
            }
            if (c.registers[reg].kind != kind) in.fail("operand register of the wrong kind", at);
            if (wire >= c.registers[reg].size) {
                in.fail("wire index " + std::to_string(wire) + " out of range", at);
            }
            wires.push_back({static_cast<std::uint32_t>(reg), static_cast<std::uint32_t>(wire)});
        }
    };

    const std::uint64_t ninstr = in.count(5);
    c.instructions.reserve(ninstr);
    for (std::uint64_t i = 0; i < ninstr; ++i) {
        const std::size_t at = in.offset();
        Instruction instr;
        instr.opcode = string_at(at);
        const std::uint8_t flags = in.u8();
        if (flags > 1) in.fail("unknown instruction flags", at);
        instr.params.resize(in.count(8));
        for (double& p : instr.params) p = in.f64();
        read_wires(RegisterKind::quantum, instr.qubits);
        read_wires(RegisterKind::classical, instr.clbits);
        if (flags & 1) {
            const std::size_t cond_at = in.offset();
            const std::uint64_t creg = in.varint();
            if (creg >= c.registers.size() || c.registers[creg].kind != RegisterKind::classical) {
                in.fail("condition register index out of range", cond_at);
            }
            instr.condition = Condition{static_cast<std::uint32_t>(creg), in.varint()};
        }
        c.instructions.push_back(std::move(instr));
    }
    if (!in.at_end()) in.fail("trailing bytes after instruction stream", in.offset());

    try {
        validate(c);
    } catch (const CircuitError& e) {
        throw DecodeError(std::string("invalid circuit: ") + e.what(), bytes.size());
    }
    return c;
}

}  // namespace qflow::qasm
