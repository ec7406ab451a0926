#pragma once

#include <cctype>
#include <cmath>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "epibundle/oracle.hpp"

namespace epibundle {

// 1-D piecewise expression language hosting user-defined functions:
//   pieces   := piece (';' piece)*
//   piece    := expr "on" interval
//   interval := ('['|'(') bound ',' bound (']'|')')
// with expressions over + - * / ^, abs, sgn, sin, cos, sqrt, the variable x
// and numeric literals. Uncovered gaps evaluate to +inf (and are reported);
// the bracket type decides which side owns a breakpoint.

struct SourcePos {
    int line = 1;
    int col = 1;
};

class parse_error : public argument_error {
public:
    parse_error(const std::string& what, SourcePos pos)
        : argument_error("parse error at " + std::to_string(pos.line) + ":" +
                         std::to_string(pos.col) + ": " + what),
          pos_(pos) {}
    SourcePos pos() const { return pos_; }

private:
    SourcePos pos_;
};

namespace expr {

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
    enum class Kind { constant, variable, unary, binary, call };
    Kind kind = Kind::constant;
    double value = 0.0;      // constant
    char op = 0;             // unary ('-') / binary ('+','-','*','/','^')
    std::string fn;          // call
    NodePtr lhs, rhs;
};

inline NodePtr make_const(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::constant;
    n->value = v;
    return n;
}

inline double eval_node(const Node& n, double x) {
    switch (n.kind) {
        case Node::Kind::constant: return n.value;
        case Node::Kind::variable: return x;
        case Node::Kind::unary: return -eval_node(*n.lhs, x);
        case Node::Kind::binary: {
            double a = eval_node(*n.lhs, x);
            double b = eval_node(*n.rhs, x);
            switch (n.op) {
                case '+': return a + b;
                case '-': return a - b;
                case '*': return a * b;
                case '/': return a / b;
                case '^': return std::pow(a, b);
            }
            return 0.0;
        }
        case Node::Kind::call: {
            double a = eval_node(*n.lhs, x);
            if (n.fn == "abs") return std::abs(a);
            if (n.fn == "sgn") return a > 0 ? 1.0 : (a < 0 ? -1.0 : 0.0);
            if (n.fn == "sin") return std::sin(a);
            if (n.fn == "cos") return std::cos(a);
            if (n.fn == "sqrt") return std::sqrt(a);
            return 0.0;
        }
    }
    return 0.0;
}

inline void print_node(const Node& n, std::ostream& os) {
    switch (n.kind) {
        case Node::Kind::constant: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n.value;
            os << tmp.str();
            break;
        }
        case Node::Kind::variable: os << "x"; break;
        case Node::Kind::unary:
            os << "(-";
            print_node(*n.lhs, os);
            os << ")";
            break;
        case Node::Kind::binary:
            os << "(";
            print_node(*n.lhs, os);
            os << n.op;
            print_node(*n.rhs, os);
            os << ")";
            break;
        case Node::Kind::call:
            os << n.fn << "(";
            print_node(*n.lhs, os);
            os << ")";
            break;
    }
}

}  // namespace expr

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    bool lo_closed = false;
    bool hi_closed = false;

    bool contains(double x) const {
        if (x < lo || x > hi) return false;
        if (x == lo && !lo_closed) return false;
        if (x == hi && !hi_closed) return false;
        return true;
    }
    std::string str() const {
        std::ostringstream os;
        os.precision(17);
        os << (lo_closed ? "[" : "(");
        if (std::isinf(lo)) os << "-inf"; else os << lo;
        os << ",";
        if (std::isinf(hi)) os << "inf"; else os << hi;
        os << (hi_closed ? "]" : ")");
        return os.str();
    }
};

struct Piece {
    expr::NodePtr body;
    Interval domain;
};

class PiecewiseExpr {
public:
    explicit PiecewiseExpr(std::vector<Piece> pieces) : pieces_(std::move(pieces)) {}

    ExtReal eval(double x) const {
        for (const auto& p : pieces_)
            if (p.domain.contains(x)) return ExtReal(expr::eval_node(*p.body, x));
        return ExtReal::pos_inf();
    }

    const std::vector<Piece>& pieces() const { return pieces_; }

    // Sorted interval endpoints strictly inside the covered region.
    std::vector<double> breakpoints() const {
        std::vector<double> b;
        for (const auto& p : pieces_) {
            if (std::isfinite(p.domain.lo)) b.push_back(p.domain.lo);
            if (std::isfinite(p.domain.hi)) b.push_back(p.domain.hi);
        }
        std::sort(b.begin(), b.end());
        b.erase(std::unique(b.begin(), b.end()), b.end());
        return b;
    }

    // Maximal intervals between pieces where the function is +inf by the gap
    // convention.
    std::vector<Interval> uncovered_gaps() const {
        std::vector<Interval> gaps;
        std::vector<Piece> sorted(pieces_);
        std::sort(sorted.begin(), sorted.end(),
                  [](const Piece& a, const Piece& b) { return a.domain.lo < b.domain.lo; });
        double cur = -std::numeric_limits<double>::infinity();
        bool cur_covered_at = false;
        for (const auto& p : sorted) {
            if (p.domain.lo > cur ||
                (p.domain.lo == cur && !p.domain.lo_closed && !cur_covered_at)) {
                if (p.domain.lo > cur)
                    gaps.push_back({cur, p.domain.lo, !cur_covered_at && std::isfinite(cur),
                                    !p.domain.lo_closed});
            }
            if (p.domain.hi > cur) {
                cur = p.domain.hi;
                cur_covered_at = p.domain.hi_closed;
            }
        }
        if (std::isfinite(cur))
            gaps.push_back({cur, std::numeric_limits<double>::infinity(),
                            !cur_covered_at, false});
        return gaps;
    }

    std::string pretty_print() const {
        std::ostringstream os;
        for (size_t i = 0; i < pieces_.size(); ++i) {
            if (i) os << "; ";
            expr::print_node(*pieces_[i].body, os);
            os << " on " << pieces_[i].domain.str();
        }
        return os.str();
    }

private:
    std::vector<Piece> pieces_;
};

namespace detail {

class PieceParser {
public:
    explicit PieceParser(std::string text) : text_(std::move(text)) {}

    PiecewiseExpr parse() {
        std::vector<Piece> pieces;
        for (;;) {
            Piece p;
            p.body = parse_expr();
            expect_word("on");
            p.domain = parse_interval();
            pieces.push_back(std::move(p));
            skip_ws();
            if (done()) break;
            expect(';');
        }
        check_overlaps(pieces);
        return PiecewiseExpr(std::move(pieces));
    }

private:
    [[noreturn]] void fail(const std::string& msg) { throw parse_error(msg, pos()); }

    SourcePos pos() const {
        SourcePos p;
        for (size_t k = 0; k < i_ && k < text_.size(); ++k) {
            if (text_[k] == '\n') {
                ++p.line;
                p.col = 1;
            } else {
                ++p.col;
            }
        }
        return p;
    }

    bool done() const { return i_ >= text_.size(); }
    char peek() const { return done() ? '\0' : text_[i_]; }
    char get() { return done() ? '\0' : text_[i_++]; }
    void skip_ws() {
        while (!done() && std::isspace(static_cast<unsigned char>(peek()))) ++i_;
    }
    void expect(char c) {
        skip_ws();
        if (peek() != c) fail(std::string("expected '") + c + "'");
        ++i_;
    }
    bool try_consume(char c) {
        skip_ws();
        if (peek() == c) {
            ++i_;
            return true;
        }
        return false;
    }
    std::string peek_word() {
        skip_ws();
        size_t j = i_;
        std::string w;
        while (j < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[j])) || text_[j] == '_'))
            w += text_[j++];
        return w;
    }
    void expect_word(const std::string& w) {
        if (peek_word() != w) fail("expected '" + w + "'");
        i_ += w.size();
    }

    double parse_number() {
        skip_ws();
        size_t start = i_;
        if (peek() == '+' || peek() == '-') ++i_;
        bool digits = false;
        while (!done() && (std::isdigit(static_cast<unsigned char>(peek())) ||
                           peek() == '.')) {
            digits = digits || std::isdigit(static_cast<unsigned char>(peek()));
            ++i_;
        }
        if (!done() && (peek() == 'e' || peek() == 'E')) {
            ++i_;
            if (peek() == '+' || peek() == '-') ++i_;
            while (!done() && std::isdigit(static_cast<unsigned char>(peek()))) ++i_;
        }
        if (!digits) fail("expected a number");
        return std::stod(text_.substr(start, i_ - start));
    }

    expr::NodePtr parse_expr() { return parse_additive(); }

    expr::NodePtr parse_additive() {
        expr::NodePtr lhs = parse_multiplicative();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c != '+' && c != '-') return lhs;
            ++i_;
            auto n = std::make_shared<expr::Node>();
            n->kind = expr::Node::Kind::binary;
            n->op = c;
            n->lhs = lhs;
            n->rhs = parse_multiplicative();
            lhs = n;
        }
    }

    expr::NodePtr parse_multiplicative() {
        expr::NodePtr lhs = parse_unary();
        for (;;) {
            skip_ws();
            char c = peek();
            if (c != '*' && c != '/') return lhs;
            ++i_;
            auto n = std::make_shared<expr::Node>();
            n->kind = expr::Node::Kind::binary;
            n->op = c;
            n->lhs = lhs;
            n->rhs = parse_unary();
            lhs = n;
        }
    }

    expr::NodePtr parse_unary() {
        skip_ws();
        if (try_consume('-')) {
            auto n = std::make_shared<expr::Node>();
            n->kind = expr::Node::Kind::unary;
            n->op = '-';
            n->lhs = parse_unary();
            return n;
        }
        return parse_power();
    }

    expr::NodePtr parse_power() {
        expr::NodePtr base = parse_atom();
        skip_ws();
        if (peek() == '^') {
            ++i_;
            auto n = std::make_shared<expr::Node>();
            n->kind = expr::Node::Kind::binary;
            n->op = '^';
            n->lhs = base;
            n->rhs = parse_unary();  // right-associative
            return n;
        }
        return base;
    }

    expr::NodePtr parse_atom() {
        skip_ws();
        if (try_consume('(')) {
            expr::NodePtr inner = parse_expr();
            expect(')');
            return inner;
        }
        char c = peek();
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
            return expr::make_const(parse_number());
        std::string w = peek_word();
        if (w.empty()) fail("expected an expression");
        if (w == "x") {
            i_ += 1;
            auto n = std::make_shared<expr::Node>();
            n->kind = expr::Node::Kind::variable;
            return n;
        }
        if (w == "abs" || w == "sgn" || w == "sin" || w == "cos" || w == "sqrt") {
            i_ += w.size();
            expect('(');
            auto n = std::make_shared<expr::Node>();
            n->kind = expr::Node::Kind::call;
            n->fn = w;
            n->lhs = parse_expr();
            expect(')');
            return n;
        }
        fail("unknown identifier '" + w + "'");
    }

    double parse_bound() {
        skip_ws();
        bool neg = false;
        if (peek() == '-' || peek() == '+') {
            size_t save = i_;
            neg = (get() == '-');
            if (peek_word() != "inf") {
                i_ = save;
                return parse_number();
            }
        }
        if (peek_word() == "inf") {
            i_ += 3;
            double inf = std::numeric_limits<double>::infinity();
            return neg ? -inf : inf;
        }
        return parse_number();
    }

    Interval parse_interval() {
        skip_ws();
        Interval iv;
        char open = get();
        if (open == '[')
            iv.lo_closed = true;
        else if (open == '(')
            iv.lo_closed = false;
        else
            fail("expected '[' or '('");
        iv.lo = parse_bound();
        expect(',');
        iv.hi = parse_bound();
        skip_ws();
        char close = get();
        if (close == ']')
            iv.hi_closed = true;
        else if (close == ')')
            iv.hi_closed = false;
        else
            fail("expected ']' or ')'");
        if (!(iv.lo < iv.hi)) fail("interval bounds must satisfy lo < hi");
        if (std::isinf(iv.lo) && iv.lo_closed) fail("-inf cannot be a closed bound");
        if (std::isinf(iv.hi) && iv.hi_closed) fail("inf cannot be a closed bound");
        return iv;
    }

    void check_overlaps(const std::vector<Piece>& pieces) {
        for (size_t a = 0; a < pieces.size(); ++a) {
            for (size_t b = a + 1; b < pieces.size(); ++b) {
                const Interval& p = pieces[a].domain;
                const Interval& q = pieces[b].domain;
                double lo = std::max(p.lo, q.lo);
                double hi = std::min(p.hi, q.hi);
                bool overlap = lo < hi;
                if (lo == hi) {
                    bool p_at = p.contains(lo);
                    bool q_at = q.contains(lo);
                    overlap = p_at && q_at;
                }
                if (overlap)
                    throw argument_error("overlapping intervals " + p.str() +
                                         " and " + q.str());
            }
        }
    }

    std::string text_;
    size_t i_ = 0;
};

}  // namespace detail

inline PiecewiseExpr parse_piecewise(const std::string& text) {
    return detail::PieceParser(text).parse();
}

// Wraps a parsed expression as an oracle: evaluation only, gradient by
// central differences at the supplied step, no subgradient graph (bundle
// operations that need one refuse instead of guessing).
inline FunctionOracle piecewise_oracle(const PiecewiseExpr& pw,
                                       const std::string& label,
                                       std::optional<double> grad_step = {}) {
    FunctionOracle oracle;
    oracle.dim = 1;
    oracle.label = label;
    auto shared = std::make_shared<PiecewiseExpr>(pw);
    oracle.eval = [shared](const Vec& x) { return shared->eval(x(0)); };
    if (grad_step) {
        double h = *grad_step;
        oracle.grad = [shared, h](const Vec& x) {
            ExtReal fp = shared->eval(x(0) + h);
            ExtReal fm = shared->eval(x(0) - h);
            if (!fp.is_finite() || !fm.is_finite())
                throw nondifferentiable_error(
                    "piecewise gradient: stencil leaves the domain");
            Vec g(1);
            g << (fp.value() - fm.value()) / (2.0 * h);
            return g;
        };
    }
    return oracle;
}

}  // namespace epibundle
