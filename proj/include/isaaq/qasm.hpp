/**
 * @file qasm.hpp
 * @brief Reader and writer for the OpenQASM 2.0 subset used by benchmark circuits.
 *
 * Accepted: a single `qreg`, `cx`, and any named single-qubit gate with an
 * optional parenthesized parameter list. `OPENQASM`, `include`, `creg`,
 * `measure`, `barrier` and `//` comments are skipped. Anything acting on
 * two or more qubits other than `cx` must be decomposed beforehand.
 */

#pragma once

#include "isaaq/circuit.hpp"
#include "isaaq/error.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace isaaq {

namespace qasm_detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline bool starts_with_word(std::string_view s, std::string_view word) {
    if (s.substr(0, word.size()) != word) return false;
    return s.size() == word.size() || !(std::isalnum(static_cast<unsigned char>(s[word.size()])) ||
                                        s[word.size()] == '_');
}

/// Recursive-descent evaluator for parameter expressions such as `-pi/4` or `0.5*pi`.
class ExprParser {
public:
    explicit ExprParser(std::string_view text) : text_(text) {}

    double parse() {
        double value = expr();
        skip_ws();
        if (pos_ != text_.size()) fail();
        return value;
    }

private:
    double expr() {
        double value = term();
        for (;;) {
            skip_ws();
            if (consume('+')) value += term();
            else if (consume('-')) value -= term();
            else return value;
        }
    }

    double term() {
        double value = factor();
        for (;;) {
            skip_ws();
            if (consume('*')) value *= factor();
            else if (consume('/')) value /= factor();
            else return value;
        }
    }

    double factor() {
        skip_ws();
        if (consume('-')) return -factor();
        if (consume('+')) return factor();
        if (consume('(')) {
            double value = expr();
            skip_ws();
            if (!consume(')')) fail();
            return value;
        }
        if (text_.substr(pos_, 2) == "pi") {
            pos_ += 2;
            return std::numbers::pi;
        }
        std::size_t start = pos_;
        while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                       text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E' ||
                                       ((text_[pos_] == '-' || text_[pos_] == '+') && pos_ > start &&
                                        (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E')))) {
            ++pos_;
        }
        if (start == pos_) fail();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_) fail();
        return value;
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool consume(char c) {
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail() const {
        throw Error(ErrorKind::MalformedSource, "bad parameter expression '" + std::string(text_) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline std::string strip_comments(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text.substr(i, 2) == "//") {
            while (i < text.size() && text[i] != '\n') ++i;
        } else {
            out.push_back(text[i++]);
        }
    }
    return out;
}

struct QubitRef {
    std::string reg;
    std::size_t index;
};

inline QubitRef parse_qubit_ref(std::string_view s) {
    s = trim(s);
    auto open = s.find('[');
    auto close = s.find(']');
    if (open == std::string_view::npos || close == std::string_view::npos || close < open ||
        trim(s.substr(close + 1)).size() != 0) {
        throw Error(ErrorKind::MalformedSource, "expected qubit reference, got '" + std::string(s) + "'");
    }
    auto idx_text = trim(s.substr(open + 1, close - open - 1));
    std::size_t index = 0;
    auto [ptr, ec] = std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), index);
    if (ec != std::errc() || ptr != idx_text.data() + idx_text.size()) {
        throw Error(ErrorKind::MalformedSource, "bad qubit index '" + std::string(idx_text) + "'");
    }
    return {std::string(trim(s.substr(0, open))), index};
}

inline std::vector<std::string_view> split_commas(std::string_view s) {
    std::vector<std::string_view> parts;
    int depth = 0;
    std::size_t start = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '(' || s[i] == '[') ++depth;
        else if (s[i] == ')' || s[i] == ']') --depth;
        else if (s[i] == ',' && depth == 0) {
            parts.push_back(trim(s.substr(start, i - start)));
            start = i + 1;
        }
    }
    parts.push_back(trim(s.substr(start)));
    return parts;
}

inline bool is_identifier(std::string_view s) {
    if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    for (char c : s) {
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
    }
    return true;
}

}  // namespace qasm_detail

[[nodiscard]] inline LogicalCircuit parse_qasm(std::string_view source) {
    using namespace qasm_detail;
    const std::string text = strip_comments(source);

    std::optional<std::string> reg_name;
    LogicalCircuit circuit;
    std::size_t start = 0;
    while (start < text.size()) {
        auto end = text.find(';', start);
        std::string_view stmt = trim(std::string_view(text).substr(
            start, end == std::string::npos ? std::string::npos : end - start));
        if (end == std::string::npos && !stmt.empty()) {
            throw Error(ErrorKind::MalformedSource, "statement without ';': '" + std::string(stmt) + "'");
        }
        start = end == std::string::npos ? text.size() : end + 1;
        if (stmt.empty()) continue;

        if (starts_with_word(stmt, "OPENQASM") || starts_with_word(stmt, "include") ||
            starts_with_word(stmt, "creg") || starts_with_word(stmt, "measure") ||
            starts_with_word(stmt, "barrier")) {
            continue;
        }
        if (starts_with_word(stmt, "gate") || starts_with_word(stmt, "opaque") ||
            starts_with_word(stmt, "if") || starts_with_word(stmt, "reset") || stmt.find('{') != std::string_view::npos) {
            throw Error(ErrorKind::MalformedSource, "unsupported statement '" + std::string(stmt) + "'");
        }
        if (starts_with_word(stmt, "qreg")) {
            if (reg_name) throw Error(ErrorKind::MalformedSource, "more than one qreg");
            auto ref = parse_qubit_ref(stmt.substr(4));
            if (!is_identifier(ref.reg) || ref.index == 0) {
                throw Error(ErrorKind::MalformedSource, "bad qreg declaration '" + std::string(stmt) + "'");
            }
            reg_name = ref.reg;
            circuit = LogicalCircuit(ref.index);
            continue;
        }

        // gate application: name[(params)] operands
        std::size_t name_end = 0;
        while (name_end < stmt.size() &&
               (std::isalnum(static_cast<unsigned char>(stmt[name_end])) || stmt[name_end] == '_')) {
            ++name_end;
        }
        std::string name(stmt.substr(0, name_end));
        if (!is_identifier(name)) {
            throw Error(ErrorKind::MalformedSource, "cannot parse '" + std::string(stmt) + "'");
        }
        std::string_view rest = trim(stmt.substr(name_end));
        std::vector<double> params;
        if (!rest.empty() && rest.front() == '(') {
            int depth = 0;
            std::size_t close = std::string_view::npos;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                if (rest[i] == '(') ++depth;
                else if (rest[i] == ')' && --depth == 0) {
                    close = i;
                    break;
                }
            }
            if (close == std::string_view::npos) {
                throw Error(ErrorKind::MalformedSource, "unbalanced parameters in '" + std::string(stmt) + "'");
            }
            auto inner = trim(rest.substr(1, close - 1));
            if (!inner.empty()) {
                for (auto part : split_commas(inner)) params.push_back(ExprParser(part).parse());
            }
            rest = trim(rest.substr(close + 1));
        }
        if (rest.empty()) throw Error(ErrorKind::MalformedSource, "gate without operands: '" + std::string(stmt) + "'");
        if (!reg_name) throw Error(ErrorKind::MalformedSource, "gate before qreg declaration");

        auto operand_text = split_commas(rest);
        if (operand_text.size() >= 2 && name != "cx" && name != "CX") {
            throw Error(ErrorKind::MultiQubitUnsupported,
                        "gate '" + name + "' acts on " + std::to_string(operand_text.size()) +
                            " qubits; decompose to cx + single-qubit gates first");
        }
        std::vector<std::size_t> qubits;
        for (auto op : operand_text) {
            auto ref = parse_qubit_ref(op);
            if (ref.reg != *reg_name) {
                throw Error(ErrorKind::MalformedSource, "unknown register '" + ref.reg + "'");
            }
            qubits.push_back(ref.index);
        }
        if (name == "cx" || name == "CX") {
            if (qubits.size() != 2 || !params.empty()) {
                throw Error(ErrorKind::MalformedSource, "cx takes exactly two operands");
            }
            circuit.add_cnot(qubits[0], qubits[1]);
        } else {
            circuit.add_single(std::move(name), qubits[0], std::move(params));
        }
    }
    if (!reg_name) throw Error(ErrorKind::MalformedSource, "missing qreg declaration");
    return circuit;
}

[[nodiscard]] inline LogicalCircuit load_qasm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::IoError, "cannot open " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_qasm(buffer.str());
}

/// Shortest text that reparses to the identical double.
[[nodiscard]] inline std::string format_real(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

[[nodiscard]] inline std::string format_gate(const SingleQubitGate& gate, std::size_t physical_index) {
    std::string out = gate.name;
    if (!gate.params.empty()) {
        out += '(';
        for (std::size_t i = 0; i < gate.params.size(); ++i) {
            if (i) out += ',';
            out += format_real(gate.params[i]);
        }
        out += ')';
    }
    out += " q[" + std::to_string(physical_index) + "];";
    return out;
}

[[nodiscard]] inline std::string to_qasm(const LogicalCircuit& circuit) {
    std::string out = "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[" + std::to_string(circuit.num_qubits()) + "];\n";
    for (const auto& g : circuit.gates()) {
        if (const auto* cx = std::get_if<CnotGate>(&g)) {
            out += "cx q[" + std::to_string(cx->control) + "],q[" + std::to_string(cx->target) + "];\n";
        } else {
            const auto& s = std::get<SingleQubitGate>(g);
            out += format_gate(s, s.qubit) + "\n";
        }
    }
    return out;
}

}  // namespace isaaq
