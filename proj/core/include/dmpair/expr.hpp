#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dmpair {

/// Base class of all errors thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. Carries the byte offset of the offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset);
    std::size_t offset() const { return offset_; }

private:
    std::size_t offset_;
};

/// Runtime evaluation failure (division by zero, zero to a negative power).
class EvalError : public Error {
public:
    using Error::Error;
};

enum class Var { X, Y };

namespace detail {
struct ExprNode;
}

/// Immutable symbolic expression in the variables x and y.
///
/// The admitted primitives (+, -, *, /, integer powers, sin, cos, exp,
/// negation) are all smooth, so every Expr is C^inf on any region where its
/// denominators do not vanish. Non-smooth primitives such as abs are
/// rejected by the parser; discontinuities enter the system only through
/// explicit interfaces between regions.
///
/// Expr values are immutable after construction and safe to share across
/// threads without synchronization.
class Expr {
public:
    Expr();  // the constant 0
    static Expr constant(double c);
    static Expr variable(Var v);
    static Expr x() { return variable(Var::X); }
    static Expr y() { return variable(Var::Y); }

    /// Parse an expression from the grammar
    ///   expr   := term (('+'|'-') term)*
    ///   term   := factor (('*'|'/') factor)*
    ///   factor := base ('^' int)?
    ///   base   := number | 'x' | 'y' | func '(' expr ')' | '(' expr ')' | '-' base
    /// with func one of sin, cos, exp. Whitespace-insensitive.
    static Expr parse(std::string_view text);

    Expr operator+(const Expr& rhs) const;
    Expr operator-(const Expr& rhs) const;
    Expr operator*(const Expr& rhs) const;
    Expr operator/(const Expr& rhs) const;
    Expr operator-() const;
    Expr pow(int exponent) const;
    static Expr sin(const Expr& e);
    static Expr cos(const Expr& e);
    static Expr exp(const Expr& e);

    /// Evaluate at (x, y). Throws EvalError on division by zero.
    double eval(double x, double y) const;

    /// Symbolic partial derivative, simplified by constant folding only.
    Expr diff(Var v) const;

    /// Substitute an expression for a variable (used for compositions h(u)).
    Expr substitute(Var v, const Expr& replacement) const;

    /// Structural test: is this node the constant `c`?
    bool is_constant(double c) const;
    /// If the expression is a folded constant, return its value.
    bool constant_value(double& out) const;

    std::string to_string() const;

    /// Structural equality (same tree after constant folding).
    bool same_tree(const Expr& other) const;

private:
    explicit Expr(std::shared_ptr<const detail::ExprNode> node);
    std::shared_ptr<const detail::ExprNode> node_;
};

inline Expr operator+(double c, const Expr& e) { return Expr::constant(c) + e; }
inline Expr operator-(double c, const Expr& e) { return Expr::constant(c) - e; }
inline Expr operator*(double c, const Expr& e) { return Expr::constant(c) * e; }
inline Expr operator+(const Expr& e, double c) { return e + Expr::constant(c); }
inline Expr operator-(const Expr& e, double c) { return e - Expr::constant(c); }
inline Expr operator*(const Expr& e, double c) { return e * Expr::constant(c); }

}  // namespace dmpair
