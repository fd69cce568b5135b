// SPDX-License-Identifier: Apache-2.0
#include "qflow/qasm/parser.hpp"

#include "qflow/error.hpp"
#include "qflow/gates/gate_library.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <limits>
#include <cmath>
#include <numbers>
#include <unordered_map>

namespace qflow::qasm {
namespace {

enum class Tok {
    end,
    ident,
    real,
    integer,
    string,
    semicolon,
    comma,
    lparen,
    rparen,
    lbracket,
    rbracket,
    lbrace,
    rbrace,
    arrow,
    equals,
    plus,
    minus,
    star,
    slash,
    caret,
};

struct Token {
    Tok kind = Tok::end;
    std::string_view text;
    std::size_t line = 1;
    std::size_t column = 1;
};

class Lexer {
  public:
    explicit Lexer(std::string_view src) : src_(src) {}

    Token next() {
        skip_space();
        Token t;
        t.line = line_;
        t.column = column();
        if (pos_ >= src_.size()) return t;
        const std::size_t start = pos_;
        const char c = src_[pos_];
        auto single = [&](Tok k) {
            advance();
            t.kind = k;
            t.text = src_.substr(start, 1);
            return t;
        };
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
                advance();
            }
            t.kind = Tok::ident;
            t.text = src_.substr(start, pos_ - start);
            return t;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            bool real = false;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                advance();
            }
            if (pos_ < src_.size() && src_[pos_] == '.') {
                real = true;
                advance();
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    advance();
                }
            }
            if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
                std::size_t save = pos_;
                advance();
                if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) advance();
                if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                    real = true;
                    while (pos_ < src_.size() &&
                           std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                        advance();
                    }
                } else {
                    pos_ = save;
                }
            }
            t.kind = real ? Tok::real : Tok::integer;
            t.text = src_.substr(start, pos_ - start);
            if (t.text == ".") throw ParseError("unexpected '.'", t.line, t.column);
            return t;
        }
        switch (c) {
            case ';': return single(Tok::semicolon);
            case ',': return single(Tok::comma);
            case '(': return single(Tok::lparen);
            case ')': return single(Tok::rparen);
            case '[': return single(Tok::lbracket);
            case ']': return single(Tok::rbracket);
            case '{': return single(Tok::lbrace);
            case '}': return single(Tok::rbrace);
            case '+': return single(Tok::plus);
            case '*': return single(Tok::star);
            case '/': return single(Tok::slash);
            case '^': return single(Tok::caret);
            case '-':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '>') {
                    advance();
                    advance();
                    t.kind = Tok::arrow;
                    t.text = src_.substr(start, 2);
                    return t;
                }
                return single(Tok::minus);
            case '=':
                if (pos_ + 1 < src_.size() && src_[pos_ + 1] == '=') {
                    advance();
                    advance();
                    t.kind = Tok::equals;
                    t.text = src_.substr(start, 2);
                    return t;
                }
                break;
            case '"': {
                advance();
                while (pos_ < src_.size() && src_[pos_] != '"' && src_[pos_] != '\n') advance();
                if (pos_ >= src_.size() || src_[pos_] != '"') {
                    throw ParseError("unterminated string", t.line, t.column);
                }
                advance();
                t.kind = Tok::string;
                t.text = src_.substr(start + 1, pos_ - start - 2);
                return t;
            }
            default:
                break;
        }
        throw ParseError(std::string("unexpected character '") + c + "'", t.line, t.column);
    }

  private:
    void advance() {
        if (src_[pos_] == '\n') {
            ++line_;
            line_start_ = pos_ + 1;
        }
        ++pos_;
    }

    std::size_t column() const { return pos_ - line_start_ + 1; }

    void skip_space() {
        while (pos_ < src_.size()) {
            const char c = src_[pos_];
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
                while (pos_ < src_.size() && src_[pos_] != '\n') advance();
            } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
                const std::size_t l = line_;
                const std::size_t col = column();
                advance();
                advance();
                while (pos_ + 1 < src_.size() && !(src_[pos_] == '*' && src_[pos_ + 1] == '/')) {
                    advance();
                }
                if (pos_ + 1 >= src_.size()) throw ParseError("unterminated comment", l, col);
                advance();
                advance();
            } else {
                break;
            }
        }
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    std::size_t line_ = 1;
    std::size_t line_start_ = 0;
};

bool is_function_name(std::string_view s) {
    return s == "sin" || s == "cos" || s == "tan" || s == "exp" || s == "ln" || s == "sqrt";
}

struct GateSignature {
    std::size_t arity = 0;
    std::size_t params = 0;
    bool opaque = false;
};

class Parser {
  public:
    Parser(std::string_view src, const ParseOptions& options) : lex_(src), options_(options) {
        circuit_.source_name = options.source_name;
        bump();
    }

    Circuit run() {
        expect_ident("OPENQASM");
        const Token version = tok_;
        if (version.kind != Tok::real && version.kind != Tok::integer) {
            error("expected version number after OPENQASM");
        }
        if (version.text != "2.0") {
            throw ParseError("unsupported OpenQASM version '" + std::string(version.text) +
                                 "' (only 2.0 is supported)",
                             version.line, version.column);
        }
        bump();
        expect(Tok::semicolon, "';'");
        while (tok_.kind != Tok::end) statement();
        return std::move(circuit_);
    }

  private:
    [[noreturn]] void error(const std::string& message) const {
        throw ParseError(message, tok_.line, tok_.column);
    }

    [[noreturn]] void error_at(const Token& t, const std::string& message) const {
        throw ParseError(message, t.line, t.column);
    }

    void bump() { tok_ = lex_.next(); }

    bool accept(Tok k) {
        if (tok_.kind != k) return false;
        bump();
        return true;
    }

    Token expect(Tok k, const char* what) {
        if (tok_.kind != k) {
            error(std::string("expected ") + what + ", found '" + std::string(tok_.text) + "'");
        }
        Token t = tok_;
        bump();
        return t;
    }

    void expect_ident(std::string_view word) {
        if (tok_.kind != Tok::ident || tok_.text != word) {
            error("expected '" + std::string(word) + "'");
        }
        bump();
    }

    std::uint64_t parse_uint(const Token& t) {
        if (t.kind != Tok::integer) error_at(t, "expected a nonnegative integer");
        std::uint64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
            error_at(t, "integer literal out of range");
        }
        return v;
    }

    void statement() {
        const Token head = tok_;
        if (head.kind != Tok::ident) error("expected a statement");
        const std::string_view word = head.text;
        if (word == "include") {
            bump();
            const Token file = expect(Tok::string, "a file name string");
            if (file.text != "qelib1.inc") {
                error_at(file, "cannot include \"" + std::string(file.text) + "\": only the builtin \"qelib1.inc\" is available");
            }
            expect(Tok::semicolon, "';'");
        } else if (word == "qreg" || word == "creg") {
            bump();
            register_decl(word == "qreg" ? RegisterKind::quantum : RegisterKind::classical, head);
        } else if (word == "gate") {
            bump();
            gate_decl(false, head);
        } else if (word == "opaque") {
            bump();
            gate_decl(true, head);
        } else if (word == "if") {
            bump();
            expect(Tok::lparen, "'('");
            const Token creg = expect(Tok::ident, "a classical register name");
            auto reg = circuit_.find_register(creg.text);
            if (!reg || circuit_.registers[*reg].kind != RegisterKind::classical) {
                error_at(creg, "undeclared classical register '" + std::string(creg.text) + "'");
            }
            expect(Tok::equals, "'=='");
            const std::uint64_t value = parse_uint(tok_);
            bump();
            expect(Tok::rparen, "')'");
            const std::size_t before = circuit_.instructions.size();
            quantum_op();
            for (std::size_t i = before; i < circuit_.instructions.size(); ++i) {
                circuit_.instructions[i].condition = Condition{*reg, value};
            }
        } else {
            quantum_op();
        }
    }

    void register_decl(RegisterKind kind, const Token& head) {
        const Token name = expect(Tok::ident, "a register name");
        expect(Tok::lbracket, "'['");
        const Token size_tok = tok_;
        const std::uint64_t size = parse_uint(size_tok);
        bump();
        expect(Tok::rbracket, "']'");
        expect(Tok::semicolon, "';'");
        if (size == 0 || size > std::numeric_limits<std::uint32_t>::max() / 2) {
            error_at(size_tok, "invalid register size");
        }
        if (circuit_.find_register(name.text)) {
            error_at(name, "register '" + std::string(name.text) + "' already declared");
        }
        (void)head;
        circuit_.add_register(std::string(name.text), kind, static_cast<std::uint32_t>(size));
    }

    std::vector<std::string> ident_list(Tok terminator) {
        std::vector<std::string> names;
        if (tok_.kind == terminator) return names;
        do {
            const Token t = expect(Tok::ident, "an identifier");
            names.emplace_back(t.text);
        } while (accept(Tok::comma));
        return names;
    }

    std::optional<GateSignature> lookup_gate(std::string_view name) const {
        if (auto it = defs_.find(std::string(name)); it != defs_.end()) return it->second;
        if (name == "U") return GateSignature{1, 3, false};
        if (name == "CX") return GateSignature{2, 0, false};
        if (options_.builtin_gates) {
            if (const gates::GateSpec* g = gates::find_gate(name)) {
                return GateSignature{g->arity, g->param_count, false};
            }
        }
        return std::nullopt;
    }

    void gate_decl(bool opaque, const Token& head) {
        const Token name = expect(Tok::ident, "a gate name");
        if (lookup_gate(name.text) || is_function_name(name.text)) {
            error_at(name, "gate '" + std::string(name.text) + "' is already defined");
        }
        GateDef def;
        def.name = std::string(name.text);
        def.opaque = opaque;
        if (accept(Tok::lparen)) {
            def.params = ident_list(Tok::rparen);
            expect(Tok::rparen, "')'");
        }
        def.qubits = ident_list(Tok::lbrace);
        if (def.qubits.empty()) error_at(name, "gate '" + def.name + "' needs qubit arguments");
        if (opaque) {
            expect(Tok::semicolon, "';'");
        } else {
            expect(Tok::lbrace, "'{'");
            while (!accept(Tok::rbrace)) def.body.push_back(gate_body_statement(def));
        }
        (void)head;
        defs_[def.name] = GateSignature{def.qubits.size(), def.params.size(), opaque};
        circuit_.gate_defs.push_back(std::move(def));
    }

    GateCall gate_body_statement(const GateDef& def) {
        const Token head = expect(Tok::ident, "a gate call");
        GateCall call;
        call.name = std::string(head.text);
        std::size_t arity = 0;
        if (head.text == "barrier") {
            arity = 0;
        } else {
            auto sig = lookup_gate(head.text);
            if (!sig) error_at(head, "undefined gate '" + call.name + "'");
            arity = sig->arity;
            if (accept(Tok::lparen)) {
                if (tok_.kind != Tok::rparen) {
                    do {
                        call.params.push_back(expression(&def.params));
                    } while (accept(Tok::comma));
                }
                expect(Tok::rparen, "')'");
            }
            if (call.params.size() != sig->params) {
                error_at(head, "gate '" + call.name + "' expects " + std::to_string(sig->params) +
                                   " parameter(s)");
            }
        }
        do {
            const Token q = expect(Tok::ident, "a qubit argument");
            auto it = std::find(def.qubits.begin(), def.qubits.end(), q.text);
            if (it == def.qubits.end()) {
                error_at(q, "'" + std::string(q.text) + "' is not an argument of gate '" +
                                def.name + "'");
            }
            const auto idx = static_cast<std::uint32_t>(it - def.qubits.begin());
            if (std::find(call.qubits.begin(), call.qubits.end(), idx) != call.qubits.end()) {
                error_at(q, "duplicate qubit argument '" + std::string(q.text) + "'");
            }
            call.qubits.push_back(idx);
        } while (accept(Tok::comma));
        expect(Tok::semicolon, "';'");
        if (arity != 0 && call.qubits.size() != arity) {
            error_at(head, "gate '" + call.name + "' expects " + std::to_string(arity) +
                               " qubit argument(s)");
        }
        return call;
    }

    // ---- expressions -------------------------------------------------------

    static Expr fold(Expr e) {
        if (e.kind != Expr::Kind::number && e.kind != Expr::Kind::param && e.is_constant()) {
            return Expr::number(e.evaluate({}));
        }
        return e;
    }

    Expr expression(const std::vector<std::string>* formals) {
        Expr lhs = term(formals);
        while (tok_.kind == Tok::plus || tok_.kind == Tok::minus) {
            const auto kind = tok_.kind == Tok::plus ? Expr::Kind::add : Expr::Kind::sub;
            bump();
            lhs = fold(Expr::binary(kind, std::move(lhs), term(formals)));
        }
        return lhs;
    }

    Expr term(const std::vector<std::string>* formals) {
        Expr lhs = unary(formals);
        while (tok_.kind == Tok::star || tok_.kind == Tok::slash) {
            const auto kind = tok_.kind == Tok::star ? Expr::Kind::mul : Expr::Kind::div;
            bump();
            lhs = fold(Expr::binary(kind, std::move(lhs), unary(formals)));
        }
        return lhs;
    }

    Expr unary(const std::vector<std::string>* formals) {
        if (accept(Tok::minus)) return fold(Expr::unary(Expr::Kind::negate, unary(formals)));
        if (accept(Tok::plus)) return unary(formals);
        return power(formals);
    }

    Expr power(const std::vector<std::string>* formals) {
        Expr base = primary(formals);
        if (accept(Tok::caret)) return fold(Expr::binary(Expr::Kind::pow, std::move(base), unary(formals)));
        return base;
    }

    Expr primary(const std::vector<std::string>* formals) {
        const Token t = tok_;
        if (t.kind == Tok::real || t.kind == Tok::integer) {
            bump();
            double v = 0.0;
            auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
            if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
                error_at(t, "malformed number '" + std::string(t.text) + "'");
            }
            return Expr::number(v);
        }
        if (t.kind == Tok::lparen) {
            bump();
            Expr e = expression(formals);
            expect(Tok::rparen, "')'");
            return e;
        }
        if (t.kind == Tok::ident) {
            bump();
            if (t.text == "pi") return Expr::number(std::numbers::pi);
            if (is_function_name(t.text)) {
                expect(Tok::lparen, "'('");
                Expr arg = expression(formals);
                expect(Tok::rparen, "')'");
                return fold(Expr::call(std::string(t.text), std::move(arg)));
            }
            if (formals) {
                auto it = std::find(formals->begin(), formals->end(), t.text);
                if (it != formals->end()) {
                    return Expr::parameter(static_cast<std::uint32_t>(it - formals->begin()));
                }
            }
            error_at(t, "unknown identifier '" + std::string(t.text) + "' in expression");
        }
        error("expected an expression");
    }

    double constant_expression() {
        const Token start = tok_;
        const Expr e = expression(nullptr);
        const double v = e.evaluate({});
        if (!std::isfinite(v)) error_at(start, "expression does not evaluate to a finite number");
        return v;
    }

    // ---- quantum operations -----------------------------------------------

    WireRef argument(RegisterKind kind) {
        const Token name = expect(Tok::ident, "a register argument");
        auto reg = circuit_.find_register(name.text);
        if (!reg) error_at(name, "undeclared register '" + std::string(name.text) + "'");
        const Register& r = circuit_.registers[*reg];
        if (r.kind != kind) {
            error_at(name, "register '" + r.name + "' is not a " +
                               (kind == RegisterKind::quantum ? "quantum" : "classical") +
                               " register");
        }
        WireRef ref{*reg, WireRef::kWholeRegister};
        if (accept(Tok::lbracket)) {
            const Token idx = tok_;
            const std::uint64_t i = parse_uint(idx);
            bump();
            expect(Tok::rbracket, "']'");
            if (i >= r.size) {
                error_at(idx, "index " + std::to_string(i) + " out of range for register '" +
                                  r.name + "' of size " + std::to_string(r.size));
            }
            ref.index = static_cast<std::uint32_t>(i);
        }
        return ref;
    }

    std::uint32_t size_of(const WireRef& ref) const {
        return ref.whole() ? circuit_.registers[ref.reg].size : 1;
    }

    // Operands must agree on broadcast size and address distinct wires.
    void check_operands(const Token& head, const std::vector<WireRef>& qubits) const {
        std::uint32_t broadcast = 0;
        for (const auto& q : qubits) {
            if (!q.whole()) continue;
            const std::uint32_t size = size_of(q);
            if (broadcast != 0 && broadcast != size) {
                error_at(head, "register size mismatch in broadcast of '" +
                                   std::string(head.text) + "'");
            }
            broadcast = size;
        }
        for (std::size_t i = 0; i < qubits.size(); ++i) {
            for (std::size_t j = i + 1; j < qubits.size(); ++j) {
                const WireRef& a = qubits[i];
                const WireRef& b = qubits[j];
                if (a.reg == b.reg && (a.whole() || b.whole() || a.index == b.index)) {
                    error_at(head, "'" + std::string(head.text) + "' has overlapping qubit operands");
                }
            }
        }
    }

    void quantum_op() {
        const Token head = expect(Tok::ident, "a quantum operation");
        Instruction instr;
        instr.opcode = std::string(head.text);
        if (head.text == "measure") {
            instr.qubits.push_back(argument(RegisterKind::quantum));
            expect(Tok::arrow, "'->'");
            instr.clbits.push_back(argument(RegisterKind::classical));
            if (size_of(instr.qubits[0]) != size_of(instr.clbits[0]) ||
                instr.qubits[0].whole() != instr.clbits[0].whole()) {
                error_at(head, "measure operands differ in size");
            }
        } else if (head.text == "reset") {
            instr.qubits.push_back(argument(RegisterKind::quantum));
        } else if (head.text == "barrier") {
            do {
                instr.qubits.push_back(argument(RegisterKind::quantum));
            } while (accept(Tok::comma));
            check_operands(head, instr.qubits);
        } else if (head.text == "delay") {
            // Both `delay q[0], 100;` and `delay(100) q[0];` are accepted.
            bool prefix = false;
            if (accept(Tok::lparen)) {
                instr.params.push_back(constant_expression());
                expect(Tok::rparen, "')'");
                prefix = true;
            }
            instr.qubits.push_back(argument(RegisterKind::quantum));
            if (!prefix) {
                expect(Tok::comma, "',' before the cycle count");
                instr.params.push_back(constant_expression());
            }
            const double cycles = instr.params[0];
            if (cycles < 0 || cycles != std::floor(cycles)) {
                error_at(head, "delay needs a nonnegative integer cycle count");
            }
        } else {
            auto sig = lookup_gate(head.text);
            if (!sig) error_at(head, "undefined gate '" + instr.opcode + "'");
            if (accept(Tok::lparen)) {
                if (tok_.kind != Tok::rparen) {
                    do {
                        instr.params.push_back(constant_expression());
                    } while (accept(Tok::comma));
                }
                expect(Tok::rparen, "')'");
            }
            do {
                instr.qubits.push_back(argument(RegisterKind::quantum));
            } while (accept(Tok::comma));
            if (instr.params.size() != sig->params) {
                error_at(head, "gate '" + instr.opcode + "' expects " +
                                   std::to_string(sig->params) + " parameter(s), got " +
                                   std::to_string(instr.params.size()));
            }
            if (instr.qubits.size() != sig->arity) {
                error_at(head, "gate '" + instr.opcode + "' expects " +
                                   std::to_string(sig->arity) + " qubit operand(s), got " +
                                   std::to_string(instr.qubits.size()));
            }
            check_operands(head, instr.qubits);
        }
        expect(Tok::semicolon, "';'");
        circuit_.instructions.push_back(std::move(instr));
    }

    Lexer lex_;
    const ParseOptions& options_;
    Token tok_;
    Circuit circuit_;
    std::unordered_map<std::string, GateSignature> defs_;
};

}  // namespace

Circuit parse_qasm(std::string_view text, const ParseOptions& options) {
    return Parser(text, options).run();
}

}  // namespace qflow::qasm
