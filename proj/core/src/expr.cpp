#include "dmpair/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <utility>

namespace dmpair {

namespace detail {

enum class Kind { Const, Variable, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp };

struct ExprNode {
    Kind kind;
    double value = 0.0;      // Const
    Var var = Var::X;        // Variable
    int exponent = 1;        // Pow
    std::shared_ptr<const ExprNode> a, b;
};

using NodePtr = std::shared_ptr<const ExprNode>;

namespace {

NodePtr make_const(double c)
{
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Const;
    n->value = c;
    return n;
}

NodePtr make_var(Var v)
{
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Variable;
    n->var = v;
    return n;
}

bool is_const(const NodePtr& n, double c)
{
    return n->kind == Kind::Const && n->value == c;
}

// Smart constructors fold constants and the trivial identities (e+0, e*1,
// e*0, e^0, e^1, -(c)). No other algebraic simplification is performed.
NodePtr make_add(NodePtr a, NodePtr b)
{
    if (a->kind == Kind::Const && b->kind == Kind::Const) return make_const(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Add;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_neg(NodePtr a);

NodePtr make_sub(NodePtr a, NodePtr b)
{
    if (a->kind == Kind::Const && b->kind == Kind::Const) return make_const(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return make_neg(std::move(b));
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Sub;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_mul(NodePtr a, NodePtr b)
{
    if (a->kind == Kind::Const && b->kind == Kind::Const) return make_const(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Mul;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_div(NodePtr a, NodePtr b)
{
    if (a->kind == Kind::Const && b->kind == Kind::Const && b->value != 0.0)
        return make_const(a->value / b->value);
    if (is_const(a, 0.0) && !is_const(b, 0.0)) return make_const(0.0);
    if (is_const(b, 1.0)) return a;
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Div;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr make_pow(NodePtr a, int k)
{
    if (k == 0) return make_const(1.0);
    if (k == 1) return a;
    if (a->kind == Kind::Const) return make_const(std::pow(a->value, k));
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Pow;
    n->exponent = k;
    n->a = std::move(a);
    return n;
}

NodePtr make_neg(NodePtr a)
{
    if (a->kind == Kind::Const) return make_const(-a->value);
    if (a->kind == Kind::Neg) return a->a;
    auto n = std::make_shared<ExprNode>();
    n->kind = Kind::Neg;
    n->a = std::move(a);
    return n;
}

NodePtr make_func(Kind kind, NodePtr a)
{
    if (a->kind == Kind::Const) {
        switch (kind) {
            case Kind::Sin: return make_const(std::sin(a->value));
            case Kind::Cos: return make_const(std::cos(a->value));
            case Kind::Exp: return make_const(std::exp(a->value));
            default: break;
        }
    }
    auto n = std::make_shared<ExprNode>();
    n->kind = kind;
    n->a = std::move(a);
    return n;
}

double eval_node(const ExprNode& n, double x, double y)
{
    switch (n.kind) {
        case Kind::Const: return n.value;
        case Kind::Variable: return n.var == Var::X ? x : y;
        case Kind::Add: return eval_node(*n.a, x, y) + eval_node(*n.b, x, y);
        case Kind::Sub: return eval_node(*n.a, x, y) - eval_node(*n.b, x, y);
        case Kind::Mul: return eval_node(*n.a, x, y) * eval_node(*n.b, x, y);
        case Kind::Div: {
            const double den = eval_node(*n.b, x, y);
            if (den == 0.0) throw EvalError("division by zero");
            return eval_node(*n.a, x, y) / den;
        }
        case Kind::Pow: {
            const double base = eval_node(*n.a, x, y);
            if (base == 0.0 && n.exponent < 0) throw EvalError("zero raised to a negative power");
            return std::pow(base, n.exponent);
        }
        case Kind::Neg: return -eval_node(*n.a, x, y);
        case Kind::Sin: return std::sin(eval_node(*n.a, x, y));
        case Kind::Cos: return std::cos(eval_node(*n.a, x, y));
        case Kind::Exp: return std::exp(eval_node(*n.a, x, y));
    }
    throw EvalError("corrupt expression node");
}

NodePtr diff_node(const NodePtr& n, Var v)
{
    switch (n->kind) {
        case Kind::Const: return make_const(0.0);
        case Kind::Variable: return make_const(n->var == v ? 1.0 : 0.0);
        case Kind::Add: return make_add(diff_node(n->a, v), diff_node(n->b, v));
        case Kind::Sub: return make_sub(diff_node(n->a, v), diff_node(n->b, v));
        case Kind::Mul:
            return make_add(make_mul(diff_node(n->a, v), n->b), make_mul(n->a, diff_node(n->b, v)));
        case Kind::Div:
            // (a/b)' = (a'b - ab') / b^2
            return make_div(
                make_sub(make_mul(diff_node(n->a, v), n->b), make_mul(n->a, diff_node(n->b, v))),
                make_pow(n->b, 2));
        case Kind::Pow:
            return make_mul(make_mul(make_const(double(n->exponent)), make_pow(n->a, n->exponent - 1)),
                            diff_node(n->a, v));
        case Kind::Neg: return make_neg(diff_node(n->a, v));
        case Kind::Sin: return make_mul(make_func(Kind::Cos, n->a), diff_node(n->a, v));
        case Kind::Cos: return make_neg(make_mul(make_func(Kind::Sin, n->a), diff_node(n->a, v)));
        case Kind::Exp: return make_mul(make_func(Kind::Exp, n->a), diff_node(n->a, v));
    }
    throw EvalError("corrupt expression node");
}

NodePtr substitute_node(const NodePtr& n, Var v, const NodePtr& repl)
{
    switch (n->kind) {
        case Kind::Const: return n;
        case Kind::Variable: return n->var == v ? repl : n;
        case Kind::Add: return make_add(substitute_node(n->a, v, repl), substitute_node(n->b, v, repl));
        case Kind::Sub: return make_sub(substitute_node(n->a, v, repl), substitute_node(n->b, v, repl));
        case Kind::Mul: return make_mul(substitute_node(n->a, v, repl), substitute_node(n->b, v, repl));
        case Kind::Div: return make_div(substitute_node(n->a, v, repl), substitute_node(n->b, v, repl));
        case Kind::Pow: return make_pow(substitute_node(n->a, v, repl), n->exponent);
        case Kind::Neg: return make_neg(substitute_node(n->a, v, repl));
        case Kind::Sin: return make_func(Kind::Sin, substitute_node(n->a, v, repl));
        case Kind::Cos: return make_func(Kind::Cos, substitute_node(n->a, v, repl));
        case Kind::Exp: return make_func(Kind::Exp, substitute_node(n->a, v, repl));
    }
    throw EvalError("corrupt expression node");
}

int precedence(Kind k)
{
    switch (k) {
        case Kind::Add:
        case Kind::Sub: return 1;
        case Kind::Mul:
        case Kind::Div: return 2;
        case Kind::Neg: return 3;
        case Kind::Pow: return 4;
        default: return 5;
    }
}

void print_node(std::ostringstream& out, const NodePtr& n, int parent_prec)
{
    const int prec = precedence(n->kind);
    const bool parens = prec < parent_prec;
    if (parens) out << '(';
    switch (n->kind) {
        case Kind::Const: {
            std::ostringstream tmp;
            tmp.precision(17);
            tmp << n->value;
            std::string s = tmp.str();
            if (n->value < 0.0) {
                out << '(' << s << ')';
            } else {
                out << s;
            }
            break;
        }
        case Kind::Variable: out << (n->var == Var::X ? 'x' : 'y'); break;
        case Kind::Add:
            print_node(out, n->a, prec);
            out << " + ";
            print_node(out, n->b, prec);
            break;
        case Kind::Sub:
            print_node(out, n->a, prec);
            out << " - ";
            print_node(out, n->b, prec + 1);
            break;
        case Kind::Mul:
            print_node(out, n->a, prec);
            out << "*";
            print_node(out, n->b, prec);
            break;
        case Kind::Div:
            print_node(out, n->a, prec);
            out << "/";
            print_node(out, n->b, prec + 1);
            break;
        case Kind::Pow:
            print_node(out, n->a, prec + 1);
            out << "^" << n->exponent;
            break;
        case Kind::Neg:
            out << "-";
            print_node(out, n->a, prec + 1);
            break;
        case Kind::Sin:
            out << "sin(";
            print_node(out, n->a, 0);
            out << ')';
            break;
        case Kind::Cos:
            out << "cos(";
            print_node(out, n->a, 0);
            out << ')';
            break;
        case Kind::Exp:
            out << "exp(";
            print_node(out, n->a, 0);
            out << ')';
            break;
    }
    if (parens) out << ')';
}

bool same_node(const NodePtr& a, const NodePtr& b)
{
    if (a.get() == b.get()) return true;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Kind::Const: return a->value == b->value;
        case Kind::Variable: return a->var == b->var;
        case Kind::Pow: return a->exponent == b->exponent && same_node(a->a, b->a);
        case Kind::Neg:
        case Kind::Sin:
        case Kind::Cos:
        case Kind::Exp: return same_node(a->a, b->a);
        default: return same_node(a->a, b->a) && same_node(a->b, b->b);
    }
}

// Recursive-descent parser over a flat byte buffer. All errors carry the
// byte offset of the token that triggered them.
class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr run()
    {
        NodePtr e = parse_expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, pos_); }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool peek(char c)
    {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool accept(char c)
    {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr parse_expr()
    {
        NodePtr e = parse_term();
        for (;;) {
            if (accept('+')) {
                e = make_add(std::move(e), parse_term());
            } else if (accept('-')) {
                e = make_sub(std::move(e), parse_term());
            } else {
                return e;
            }
        }
    }

    NodePtr parse_term()
    {
        NodePtr e = parse_factor();
        for (;;) {
            if (accept('*')) {
                e = make_mul(std::move(e), parse_factor());
            } else if (accept('/')) {
                e = make_div(std::move(e), parse_factor());
            } else {
                return e;
            }
        }
    }

    NodePtr parse_factor()
    {
        NodePtr base = parse_base();
        if (accept('^')) {
            return make_pow(std::move(base), parse_int_exponent());
        }
        return base;
    }

    int parse_int_exponent()
    {
        skip_ws();
        std::size_t start = pos_;
        if (pos_ < text_.size() && (text_[pos_] == '-' || text_[pos_] == '+')) ++pos_;
        std::size_t digits_begin = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == digits_begin) {
            pos_ = start;
            fail("expected integer exponent");
        }
        // A fractional exponent is a dedicated error, not a syntax error.
        if (pos_ < text_.size() && text_[pos_] == '.') {
            pos_ = start;
            fail("non-integer exponent");
        }
        int value = 0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc()) {
            pos_ = start;
            fail("exponent out of range");
        }
        return value;
    }

    NodePtr parse_base()
    {
        skip_ws();
        if (pos_ >= text_.size()) fail("unexpected end of input");
        const char c = text_[pos_];
        if (c == '-') {
            ++pos_;
            return make_neg(parse_base());
        }
        if (c == '(') {
            ++pos_;
            NodePtr e = parse_expr();
            if (!accept(')')) fail("expected ')'");
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return parse_number();
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            return parse_identifier();
        }
        fail("unexpected character");
    }

    NodePtr parse_number()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
                while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
            } else {
                pos_ = mark;  // 'e' belonged to something else; not part of the number
            }
        }
        double value = 0.0;
        auto res = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (res.ec != std::errc() || res.ptr != text_.data() + pos_) {
            pos_ = start;
            fail("malformed number");
        }
        return make_const(value);
    }

    NodePtr parse_identifier()
    {
        std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);
        if (name == "x") return make_var(Var::X);
        if (name == "y") return make_var(Var::Y);
        Kind kind;
        if (name == "sin") {
            kind = Kind::Sin;
        } else if (name == "cos") {
            kind = Kind::Cos;
        } else if (name == "exp") {
            kind = Kind::Exp;
        } else {
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'");
        }
        if (!accept('(')) fail("expected '(' after function name");
        NodePtr arg = parse_expr();
        if (!accept(')')) fail("expected ')'");
        return make_func(kind, std::move(arg));
    }
};

}  // namespace
}  // namespace detail

ParseError::ParseError(const std::string& what, std::size_t offset)
    : Error(what + " at offset " + std::to_string(offset)), offset_(offset)
{
}

Expr::Expr() : node_(detail::make_const(0.0)) {}

Expr::Expr(std::shared_ptr<const detail::ExprNode> node) : node_(std::move(node)) {}

Expr Expr::constant(double c) { return Expr(detail::make_const(c)); }

Expr Expr::variable(Var v) { return Expr(detail::make_var(v)); }

Expr Expr::parse(std::string_view text) { return Expr(detail::Parser(text).run()); }

Expr Expr::operator+(const Expr& rhs) const { return Expr(detail::make_add(node_, rhs.node_)); }
Expr Expr::operator-(const Expr& rhs) const { return Expr(detail::make_sub(node_, rhs.node_)); }
Expr Expr::operator*(const Expr& rhs) const { return Expr(detail::make_mul(node_, rhs.node_)); }
Expr Expr::operator/(const Expr& rhs) const { return Expr(detail::make_div(node_, rhs.node_)); }
Expr Expr::operator-() const { return Expr(detail::make_neg(node_)); }
Expr Expr::pow(int exponent) const { return Expr(detail::make_pow(node_, exponent)); }
Expr Expr::sin(const Expr& e) { return Expr(detail::make_func(detail::Kind::Sin, e.node_)); }
Expr Expr::cos(const Expr& e) { return Expr(detail::make_func(detail::Kind::Cos, e.node_)); }
Expr Expr::exp(const Expr& e) { return Expr(detail::make_func(detail::Kind::Exp, e.node_)); }

double Expr::eval(double x, double y) const { return detail::eval_node(*node_, x, y); }

Expr Expr::diff(Var v) const { return Expr(detail::diff_node(node_, v)); }

Expr Expr::substitute(Var v, const Expr& replacement) const
{
    return Expr(detail::substitute_node(node_, v, replacement.node_));
}

bool Expr::is_constant(double c) const { return detail::is_const(node_, c); }

bool Expr::constant_value(double& out) const
{
    if (node_->kind == detail::Kind::Const) {
        out = node_->value;
        return true;
    }
    return false;
}

std::string Expr::to_string() const
{
    std::ostringstream out;
    detail::print_node(out, node_, 0);
    return out.str();
}

bool Expr::same_tree(const Expr& other) const { return detail::same_node(node_, other.node_); }

}  // namespace dmpair
