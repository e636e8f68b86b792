#pragma once

// Recursive-descent parser and evaluator for scalar expressions in one
// variable t. Grammar, with standard precedence (highest first):
//
//   power   >  unary minus  >  * /  >  + -
//
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := atom ('^' unary)?          (right-associative)
//   atom    := number | 't' | name '(' sum ')' | '(' sum ')'
//   name    := sqrt | sinh | cosh | tanh | exp | log | abs
//
// '^' with an exponent that folds to a static integer is evaluated by the
// integer power rule (any base sign); otherwise it is routed through
// exp/log and requires base > 0. Evaluation yields value and exact first
// derivative via dual numbers. ASTs are immutable after parse; evaluation
// is pure and thread-safe.

#include "minkenv/dual.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace minkenv {

/// Malformed input. `position` is the 0-based offset of the offending
/// character, `expected` a human-readable description of what would have
/// been valid there.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t position, std::string expected, const std::string& found)
        : std::runtime_error("parse error at position " + std::to_string(position) +
                             ": expected " + expected + ", found " + found),
          position(position),
          expected(std::move(expected)) {}

    std::size_t position;
    std::string expected;
};

namespace expr_detail {

enum class NodeKind { Constant, Variable, Unary, Binary, IntPow };
enum class UnaryOp { Neg, Sqrt, Sinh, Cosh, Tanh, Exp, Log, Abs };
enum class BinaryOp { Add, Sub, Mul, Div, Pow };

struct Node {
    NodeKind kind;
    double value = 0.0;       // Constant
    UnaryOp uop{};            // Unary
    BinaryOp bop{};           // Binary
    long long exponent = 0;   // IntPow
    std::shared_ptr<const Node> lhs, rhs;
    bool depends_on_t = false;
    std::size_t src_pos = 0;
};

using NodePtr = std::shared_ptr<const Node>;

inline Dual eval(const Node& n, double t) {
    using namespace dual_ops;
    switch (n.kind) {
        case NodeKind::Constant: return {n.value, 0.0};
        case NodeKind::Variable: return Dual::variable(t);
        case NodeKind::Unary: {
            const Dual x = eval(*n.lhs, t);
            switch (n.uop) {
                case UnaryOp::Neg: return -x;
                case UnaryOp::Sqrt: return sqrt(x);
                case UnaryOp::Sinh: return sinh(x);
                case UnaryOp::Cosh: return cosh(x);
                case UnaryOp::Tanh: return tanh(x);
                case UnaryOp::Exp: return exp(x);
                case UnaryOp::Log: return log(x);
                case UnaryOp::Abs: return abs(x);
            }
            break;
        }
        case NodeKind::Binary: {
            const Dual a = eval(*n.lhs, t);
            const Dual b = eval(*n.rhs, t);
            switch (n.bop) {
                case BinaryOp::Add: return a + b;
                case BinaryOp::Sub: return a - b;
                case BinaryOp::Mul: return a * b;
                case BinaryOp::Div: return a / b;
                case BinaryOp::Pow: return pow_general(a, b);
            }
            break;
        }
        case NodeKind::IntPow: return dual_ops::pow_int(eval(*n.lhs, t), n.exponent);
    }
    throw std::logic_error("expr: unreachable node kind");
}

inline const char* unary_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::Neg: return "-";
        case UnaryOp::Sqrt: return "sqrt";
        case UnaryOp::Sinh: return "sinh";
        case UnaryOp::Cosh: return "cosh";
        case UnaryOp::Tanh: return "tanh";
        case UnaryOp::Exp: return "exp";
        case UnaryOp::Log: return "log";
        case UnaryOp::Abs: return "abs";
    }
    return "?";
}

// Precedence levels for the printer; a child is parenthesized when its
// level is below what its context requires.
inline int level(const Node& n) {
    switch (n.kind) {
        case NodeKind::Constant: return n.value < 0 ? 3 : 5;
        case NodeKind::Variable: return 5;
        case NodeKind::Unary: return n.uop == UnaryOp::Neg ? 3 : 5;
        case NodeKind::IntPow: return 4;
        case NodeKind::Binary:
            switch (n.bop) {
                case BinaryOp::Add:
                case BinaryOp::Sub: return 1;
                case BinaryOp::Mul:
                case BinaryOp::Div: return 2;
                case BinaryOp::Pow: return 4;
            }
    }
    return 5;
}

inline void print(const Node& n, std::string& out, int min_level) {
    const bool parens = level(n) < min_level;
    if (parens) out += '(';
    switch (n.kind) {
        case NodeKind::Constant: {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", n.value);
            out += buf;
            break;
        }
        case NodeKind::Variable: out += 't'; break;
        case NodeKind::Unary:
            if (n.uop == UnaryOp::Neg) {
                out += '-';
                print(*n.lhs, out, 3);
            } else {
                out += unary_name(n.uop);
                out += '(';
                print(*n.lhs, out, 0);
                out += ')';
            }
            break;
        case NodeKind::IntPow:
            print(*n.lhs, out, 5);
            out += '^';
            out += std::to_string(n.exponent);
            break;
        case NodeKind::Binary: {
            const char* op = n.bop == BinaryOp::Add ? "+"
                           : n.bop == BinaryOp::Sub ? "-"
                           : n.bop == BinaryOp::Mul ? "*"
                           : n.bop == BinaryOp::Div ? "/"
                                                    : "^";
            const int lv = level(n);
            // left-assoc for + - * /, right-assoc for ^
            if (n.bop == BinaryOp::Pow) {
                print(*n.lhs, out, 5);
                out += op;
                print(*n.rhs, out, lv);
            } else {
                print(*n.lhs, out, lv);
                out += op;
                print(*n.rhs, out, lv + 1);
            }
            break;
        }
    }
    if (parens) out += ')';
}

class Parser {
public:
    explicit Parser(std::string_view src) : src_(src) {}

    NodePtr run() {
        NodePtr e = parse_sum();
        skip_ws();
        if (pos_ != src_.size()) fail("end of input");
        return e;
    }

private:
    std::string_view src_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& expected) const {
        const std::string found =
            pos_ < src_.size() ? "'" + std::string(1, src_[pos_]) + "'" : "end of input";
        throw ParseError(pos_, expected, found);
    }

    void skip_ws() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < src_.size() && src_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("'") + c + "'");
    }

    char peek() {
        skip_ws();
        return pos_ < src_.size() ? src_[pos_] : '\0';
    }

    static NodePtr make_const(double v, std::size_t pos) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Constant;
        n->value = v;
        n->src_pos = pos;
        return n;
    }

    static NodePtr make_unary(UnaryOp op, NodePtr child, std::size_t pos) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Unary;
        n->uop = op;
        n->depends_on_t = child->depends_on_t;
        n->lhs = std::move(child);
        n->src_pos = pos;
        return n;
    }

    static NodePtr make_binary(BinaryOp op, NodePtr a, NodePtr b, std::size_t pos) {
        auto n = std::make_shared<Node>();
        n->kind = NodeKind::Binary;
        n->bop = op;
        n->depends_on_t = a->depends_on_t || b->depends_on_t;
        n->lhs = std::move(a);
        n->rhs = std::move(b);
        n->src_pos = pos;
        return n;
    }

    NodePtr parse_sum() {
        NodePtr lhs = parse_product();
        for (;;) {
            const std::size_t p = pos_;
            if (accept('+'))
                lhs = make_binary(BinaryOp::Add, lhs, parse_product(), p);
            else if (accept('-'))
                lhs = make_binary(BinaryOp::Sub, lhs, parse_product(), p);
            else
                return lhs;
        }
    }

    NodePtr parse_product() {
        NodePtr lhs = parse_unary();
        for (;;) {
            const std::size_t p = pos_;
            if (accept('*'))
                lhs = make_binary(BinaryOp::Mul, lhs, parse_unary(), p);
            else if (accept('/'))
                lhs = make_binary(BinaryOp::Div, lhs, parse_unary(), p);
            else
                return lhs;
        }
    }

    NodePtr parse_unary() {
        const std::size_t p = pos_;
        if (accept('-')) return make_unary(UnaryOp::Neg, parse_unary(), p);
        return parse_power();
    }

    NodePtr parse_power() {
        NodePtr base = parse_atom();
        const std::size_t p = pos_;
        if (!accept('^')) return base;
        NodePtr expo = parse_unary();  // right-assoc, allows t^-2
        // A static integer exponent keeps the integer power rule (and its
        // wider domain); anything else goes through exp/log.
        if (!expo->depends_on_t) {
            const double v = eval(*expo, 0.0).val;
            if (std::isfinite(v) && v == std::nearbyint(v) && std::fabs(v) <= 1e9) {
                auto n = std::make_shared<Node>();
                n->kind = NodeKind::IntPow;
                n->exponent = static_cast<long long>(std::nearbyint(v));
                n->depends_on_t = base->depends_on_t;
                n->lhs = std::move(base);
                n->src_pos = p;
                return n;
            }
        }
        return make_binary(BinaryOp::Pow, std::move(base), std::move(expo), p);
    }

    NodePtr parse_atom() {
        skip_ws();
        if (pos_ >= src_.size()) fail("a number, 't', a function call or '('");
        const char c = src_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr inner = parse_sum();
            expect(')');
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c))) return parse_name();
        fail("a number, 't', a function call or '('");
    }

    NodePtr parse_number() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_++;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_])))
                    ++pos_;
            } else {
                pos_ = mark;  // 'e' was not an exponent
            }
        }
        const std::string text(src_.substr(start, pos_ - start));
        if (text.empty() || text == ".") {
            pos_ = start;
            fail("a number");
        }
        return make_const(std::stod(text), start);
    }

    NodePtr parse_name() {
        const std::size_t start = pos_;
        while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        const std::string_view name = src_.substr(start, pos_ - start);
        if (name == "t") {
            auto n = std::make_shared<Node>();
            n->kind = NodeKind::Variable;
            n->depends_on_t = true;
            n->src_pos = start;
            return n;
        }
        UnaryOp op;
        if (name == "sqrt") op = UnaryOp::Sqrt;
        else if (name == "sinh") op = UnaryOp::Sinh;
        else if (name == "cosh") op = UnaryOp::Cosh;
        else if (name == "tanh") op = UnaryOp::Tanh;
        else if (name == "exp") op = UnaryOp::Exp;
        else if (name == "log") op = UnaryOp::Log;
        else if (name == "abs") op = UnaryOp::Abs;
        else {
            pos_ = start;
            fail("'t' or one of sqrt, sinh, cosh, tanh, exp, log, abs");
        }
        expect('(');
        NodePtr arg = parse_sum();
        expect(')');
        return make_unary(op, std::move(arg), start);
    }
};

}  // namespace expr_detail

/// Parsed expression in the single variable t. Cheap to copy (shares the
/// immutable tree).
class ExprAst {
public:
    ExprAst() = default;

    /// Parses `src`; throws ParseError on malformed input.
    static ExprAst parse(std::string_view src) {
        ExprAst e;
        e.root_ = expr_detail::Parser(src).run();
        return e;
    }

    bool valid() const { return root_ != nullptr; }
    bool depends_on_t() const { return root_ && root_->depends_on_t; }

    /// Value and exact first derivative at t. Throws DomainError where the
    /// expression is undefined or not differentiable.
    Dual eval_dual(double t) const {
        const Dual d = expr_detail::eval(*root_, t);
        if (!std::isfinite(d.val) || !std::isfinite(d.der))
            throw DomainError("expression evaluates to a non-finite result at t = " +
                              std::to_string(t));
        return d;
    }

    double eval(double t) const { return eval_dual(t).val; }

    /// Infix form that parses back to an identically-evaluating tree.
    std::string to_string() const {
        std::string out;
        expr_detail::print(*root_, out, 0);
        return out;
    }

private:
    expr_detail::NodePtr root_;
};

inline ExprAst parse_expr(std::string_view src) { return ExprAst::parse(src); }

}  // namespace minkenv
