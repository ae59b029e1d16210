#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "ovk/errors.hpp"
#include "ovk/expr.hpp"
#include "ovk/picard.hpp"

namespace ovk {

// ===========================================================================
// Problem files
//
// Line-oriented `key = value` with '#' comments.  The operator trees use a
// tiny s-expression grammar:
//
//     arg_u | arg_v
//     (series c0 c1 ...)          fixed series, coefficients low to high
//     (dx E)                      d/dx
//     (mul E F)  (add E F)        exactly two operands each
//     (tscale (poly p0 p1 ...) E) polynomial-in-t scalar factor
//
// Required keys: A, h, R.  Everything else has defaults.  Unknown and
// duplicate keys are rejected — a typo in a problem file should fail loudly,
// not silently run with a default.
// ===========================================================================

struct ProblemFile {
    ProblemSpec spec;
    std::optional<double> M;  ///< trusted operator constant, skips estimation
    std::optional<double> K;
    std::optional<double> a;  ///< explicit drift override
    RunConfig config;
};

namespace detail {

struct Token {
    enum Kind { LParen, RParen, Atom, End } kind;
    std::string text;
    std::size_t col;  // 1-based within the full line
};

class SexprLexer {
public:
    SexprLexer(std::string_view text, std::size_t line, std::size_t col_base)
        : text_(text), line_(line), col_base_(col_base) {}

    Token next() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        if (pos_ >= text_.size()) return {Token::End, "", col(pos_)};
        const std::size_t start = pos_;
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            return {Token::LParen, "(", col(start)};
        }
        if (c == ')') {
            ++pos_;
            return {Token::RParen, ")", col(start)};
        }
        while (pos_ < text_.size() && text_[pos_] != '(' && text_[pos_] != ')' &&
               !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
            ++pos_;
        }
        return {Token::Atom, std::string(text_.substr(start, pos_ - start)), col(start)};
    }

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t col(std::size_t pos) const noexcept { return col_base_ + pos; }

    std::string_view text_;
    std::size_t pos_ = 0;
    std::size_t line_;
    std::size_t col_base_;
};

inline double parse_number(const Token& tok, std::size_t line) {
    const char* begin = tok.text.c_str();
    char* end = nullptr;
    const double v = std::strtod(begin, &end);
    if (end != begin + tok.text.size() || tok.text.empty()) {
        throw ParseError(line, tok.col, "expected a number, got '" + tok.text + "'");
    }
    return v;
}

class SexprParser {
public:
    SexprParser(std::string_view text, std::size_t line, std::size_t col_base)
        : lexer_(text, line, col_base), line_(line) {
        advance();
    }

    ExprPtr parse_full() {
        ExprPtr e = parse_expr();
        if (cur_.kind != Token::End) {
            throw ParseError(line_, cur_.col, "unexpected trailing '" + cur_.text + "'");
        }
        return e;
    }

private:
    void advance() { cur_ = lexer_.next(); }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError(line_, cur_.col, msg);
    }

    ExprPtr parse_expr() {
        if (cur_.kind == Token::Atom) {
            const Token tok = cur_;
            advance();
            if (tok.text == "arg_u") return OperatorExpr::arg_u();
            if (tok.text == "arg_v") return OperatorExpr::arg_v();
            throw ParseError(line_, tok.col,
                             "unknown atom '" + tok.text +
                                 "' (numbers go inside (series ...))");
        }
        if (cur_.kind != Token::LParen) fail("expected an expression");
        advance();
        if (cur_.kind != Token::Atom) fail("expected an operator name after '('");
        const Token head = cur_;
        advance();

        if (head.text == "series") {
            std::vector<double> coeffs;
            while (cur_.kind == Token::Atom) {
                coeffs.push_back(parse_number(cur_, line_));
                advance();
            }
            if (coeffs.empty()) {
                throw ParseError(line_, head.col, "series needs at least one coefficient");
            }
            expect_rparen("series");
            return OperatorExpr::constant(PowerSeries(std::move(coeffs)));
        }
        if (head.text == "dx") {
            ExprPtr child = parse_expr();
            expect_rparen("dx");
            return OperatorExpr::dx(std::move(child));
        }
        if (head.text == "mul" || head.text == "add") {
            ExprPtr lhs = parse_expr();
            ExprPtr rhs = parse_expr();
            expect_rparen(head.text);
            return head.text == "mul" ? OperatorExpr::mul(std::move(lhs), std::move(rhs))
                                      : OperatorExpr::add(std::move(lhs), std::move(rhs));
        }
        if (head.text == "tscale") {
            if (cur_.kind != Token::LParen) fail("tscale expects (poly ...) first");
            advance();
            if (cur_.kind != Token::Atom || cur_.text != "poly") {
                fail("tscale expects (poly ...) first");
            }
            advance();
            std::vector<double> poly;
            while (cur_.kind == Token::Atom) {
                poly.push_back(parse_number(cur_, line_));
                advance();
            }
            if (poly.empty()) {
                throw ParseError(line_, head.col, "poly needs at least one coefficient");
            }
            expect_rparen("poly");
            ExprPtr child = parse_expr();
            expect_rparen("tscale");
            return OperatorExpr::time_scale(std::move(poly), std::move(child));
        }
        throw ParseError(line_, head.col, "unknown operator '" + head.text + "'");
    }

    void expect_rparen(const std::string& what) {
        if (cur_.kind != Token::RParen) {
            fail("expected ')' closing " + what);
        }
        advance();
    }

    SexprLexer lexer_;
    Token cur_;
    std::size_t line_;
};

inline std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);  // shortest exact representation
}

inline void expr_to_text(const ExprPtr& e, std::ostringstream& out) {
    switch (e->kind()) {
        case ExprKind::Constant: {
            out << "(series";
            for (double c : e->value().coefficients()) out << ' ' << format_double(c);
            out << ')';
            return;
        }
        case ExprKind::ArgU:
            out << "arg_u";
            return;
        case ExprKind::ArgV:
            out << "arg_v";
            return;
        case ExprKind::Derivative:
            out << "(dx ";
            expr_to_text(e->child(), out);
            out << ')';
            return;
        case ExprKind::Product:
        case ExprKind::Sum:
            out << (e->kind() == ExprKind::Product ? "(mul " : "(add ");
            expr_to_text(e->lhs(), out);
            out << ' ';
            expr_to_text(e->rhs(), out);
            out << ')';
            return;
        case ExprKind::TimeScale: {
            out << "(tscale (poly";
            for (double p : e->poly()) out << ' ' << format_double(p);
            out << ") ";
            expr_to_text(e->child(), out);
            out << ')';
            return;
        }
    }
}

}  // namespace detail

/// Parse one operator tree from its textual form.
inline ExprPtr parse_expression(std::string_view text, std::size_t line = 1,
                                std::size_t col_base = 1) {
    return detail::SexprParser(text, line, col_base).parse_full();
}

inline std::string expression_to_text(const ExprPtr& e) {
    if (!e) throw StructuralError("cannot serialize an empty expression");
    std::ostringstream out;
    detail::expr_to_text(e, out);
    return out.str();
}

/// Parse a complete problem file from text.  Throws ParseError for syntax
/// problems (with position) and lets the semantic validation of the problem
/// itself (positive radius, source term shape, ...) surface as the usual
/// domain/structural errors.
inline ProblemFile parse_problem(const std::string& text) {
    std::optional<ExprPtr> A, h;
    std::optional<double> R, M, K, a;
    std::optional<std::size_t> N;
    std::string label = "problem";
    RunConfig config;
    std::set<std::string> seen;

    std::istringstream stream(text);
    std::string raw;
    std::size_t line_no = 0;
    std::size_t total_lines = 0;
    while (std::getline(stream, raw)) {
        ++line_no;
        total_lines = line_no;
        std::string line = raw;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos || eq <= first) {
            throw ParseError(line_no, first + 1, "expected 'key = value'");
        }
        const auto key_end = line.find_last_not_of(" \t", eq - 1);
        const std::string key = line.substr(first, key_end - first + 1);
        auto val_begin = line.find_first_not_of(" \t", eq + 1);
        if (val_begin == std::string::npos) {
            throw ParseError(line_no, eq + 2, "missing value for '" + key + "'");
        }
        const auto val_end = line.find_last_not_of(" \t\r");
        const std::string value = line.substr(val_begin, val_end - val_begin + 1);
        const std::size_t val_col = val_begin + 1;

        if (!seen.insert(key).second) {
            throw ParseError(line_no, first + 1, "duplicate key '" + key + "'");
        }

        const auto as_double = [&]() {
            return detail::parse_number({detail::Token::Atom, value, val_col}, line_no);
        };
        const auto as_count = [&]() -> std::size_t {
            std::size_t out = 0;
            const auto res = std::from_chars(value.data(), value.data() + value.size(), out);
            if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) {
                throw ParseError(line_no, val_col,
                                 "expected a nonnegative integer, got '" + value + "'");
            }
            return out;
        };

        if (key == "label") {
            label = value;
        } else if (key == "A") {
            A = parse_expression(value, line_no, val_col);
        } else if (key == "h") {
            h = parse_expression(value, line_no, val_col);
        } else if (key == "R") {
            R = as_double();
        } else if (key == "N") {
            N = as_count();
        } else if (key == "M") {
            M = as_double();
        } else if (key == "K") {
            K = as_double();
        } else if (key == "a") {
            a = as_double();
        } else if (key == "s") {
            config.s = as_double();
        } else if (key == "tau_frac") {
            config.tau_frac = as_double();
        } else if (key == "step") {
            config.step = as_double();
        } else if (key == "max_iter") {
            config.max_iter = as_count();
        } else if (key == "tol") {
            config.tol = as_double();
        } else if (key == "theta") {
            config.theta = as_double();
        } else if (key == "seed") {
            config.seed = static_cast<std::uint64_t>(as_count());
        } else {
            throw ParseError(line_no, first + 1, "unknown key '" + key + "'");
        }
    }

    const auto require = [&](bool present, const char* name) {
        if (!present) {
            throw ParseError(total_lines + 1, 1,
                             std::string("missing required key '") + name + "'");
        }
    };
    require(A.has_value(), "A");
    require(h.has_value(), "h");
    require(R.has_value(), "R");

    ProblemSpec spec(*A, *h, *R, N.value_or(64), label);
    return ProblemFile{std::move(spec), M, K, a, config};
}

/// Canonical text form; parse . serialize is the identity on parsed files.
inline std::string serialize_problem(const ProblemFile& pf) {
    std::ostringstream out;
    out << "label = " << pf.spec.label << '\n';
    out << "A = " << expression_to_text(pf.spec.A) << '\n';
    out << "h = " << expression_to_text(pf.spec.h) << '\n';
    out << "R = " << detail::format_double(pf.spec.R) << '\n';
    out << "N = " << pf.spec.N << '\n';
    if (pf.M) out << "M = " << detail::format_double(*pf.M) << '\n';
    if (pf.K) out << "K = " << detail::format_double(*pf.K) << '\n';
    if (pf.a) out << "a = " << detail::format_double(*pf.a) << '\n';
    out << "s = " << detail::format_double(pf.config.s) << '\n';
    out << "tau_frac = " << detail::format_double(pf.config.tau_frac) << '\n';
    out << "step = " << detail::format_double(pf.config.step) << '\n';
    out << "max_iter = " << pf.config.max_iter << '\n';
    out << "tol = " << detail::format_double(pf.config.tol) << '\n';
    out << "theta = " << detail::format_double(pf.config.theta) << '\n';
    out << "seed = " << pf.config.seed << '\n';
    return out.str();
}

/// Read and parse a problem file from disk.
inline ProblemFile load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read problem file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_problem(buf.str());
}

}  // namespace ovk
