#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "mivar/error.hpp"

namespace mivar {

/// One node of an arithmetic expression. Nodes live in Expr::nodes; children
/// are referenced by index. Variable names are slices of Expr::symbols
/// (a = offset, b = length); for unary/binary nodes a/b are child indices.
struct ExprNode {
    enum class Kind : std::uint8_t { number, variable, negate, add, sub, mul, divide };
    Kind kind = Kind::number;
    std::uint32_t a = 0;
    std::uint32_t b = 0;
    double value = 0.0;
};

/// Arithmetic rule expression: literals, variable references, unary minus,
/// + - * / with standard precedence. Immutable once built; freely shareable.
struct Expr {
    std::vector<ExprNode> nodes;
    std::string symbols;
    std::uint32_t root = 0;

    bool empty() const { return nodes.empty(); }
    std::string_view var_name(const ExprNode& node) const {
        return std::string_view(symbols).substr(node.a, node.b);
    }

    // Programmatic constructors (used by the net generator and tests).
    static Expr number(double value);
    static Expr variable(std::string_view name);
    static Expr unary_minus(Expr operand);
    static Expr binary(ExprNode::Kind op, Expr lhs, Expr rhs);
};

bool operator==(const Expr& a, const Expr& b);
inline bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

/// Parse expression text. Grammar, loosest binding first:
///   expr    := term (('+' | '-') term)*
///   term    := unary (('*' | '/') unary)*
///   unary   := '-' unary | primary
///   primary := number | identifier | '(' expr ')'
/// Identifiers match [A-Za-z_][A-Za-z0-9_]*; whitespace is ignored.
/// Throws ParseError with the byte offset and the expected-token description.
Expr parse_expr(std::string_view text);

/// Resolves a variable name to its current value; nullopt means unbound.
using VarLookup = std::function<std::optional<double>(std::string_view)>;

/// Evaluate in double precision. Throws Error with code unbound_variable,
/// division_by_zero, or non_finite_result (overflow or inf/nan intermediate).
double eval(const Expr& expr, const VarLookup& lookup);
double eval(const Expr& expr, const std::unordered_map<std::string, double>& bindings);

/// Distinct variable identifiers appearing in the tree, sorted.
std::vector<std::string> free_vars(const Expr& expr);

/// Canonical text form; parse_expr(to_string(e)) is structurally equal to e.
std::string to_string(const Expr& expr);

}  // namespace mivar
