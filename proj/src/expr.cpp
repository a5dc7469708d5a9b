#include "mivar/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>

namespace mivar {

namespace {

std::uint32_t append_subtree(Expr& dst, const Expr& src, std::uint32_t idx) {
    const ExprNode& node = src.nodes[idx];
    ExprNode copy = node;
    switch (node.kind) {
        case ExprNode::Kind::number:
            break;
        case ExprNode::Kind::variable: {
            std::string_view name = src.var_name(node);
            copy.a = static_cast<std::uint32_t>(dst.symbols.size());
            copy.b = static_cast<std::uint32_t>(name.size());
            dst.symbols.append(name);
            break;
        }
        case ExprNode::Kind::negate:
            copy.a = append_subtree(dst, src, node.a);
            break;
        default:
            copy.a = append_subtree(dst, src, node.a);
            copy.b = append_subtree(dst, src, node.b);
            break;
    }
    dst.nodes.push_back(copy);
    return static_cast<std::uint32_t>(dst.nodes.size() - 1);
}

}  // namespace

Expr Expr::number(double value) {
    Expr e;
    e.nodes.push_back(ExprNode{ExprNode::Kind::number, 0, 0, value});
    e.root = 0;
    return e;
}

Expr Expr::variable(std::string_view name) {
    Expr e;
    e.symbols.assign(name);
    e.nodes.push_back(ExprNode{ExprNode::Kind::variable, 0,
                               static_cast<std::uint32_t>(name.size()), 0.0});
    e.root = 0;
    return e;
}

Expr Expr::unary_minus(Expr operand) {
    Expr e = std::move(operand);
    e.nodes.push_back(ExprNode{ExprNode::Kind::negate, e.root, 0, 0.0});
    e.root = static_cast<std::uint32_t>(e.nodes.size() - 1);
    return e;
}

Expr Expr::binary(ExprNode::Kind op, Expr lhs, Expr rhs) {
    Expr e = std::move(lhs);
    std::uint32_t right = append_subtree(e, rhs, rhs.root);
    e.nodes.push_back(ExprNode{op, e.root, right, 0.0});
    e.root = static_cast<std::uint32_t>(e.nodes.size() - 1);
    return e;
}

namespace {

bool subtree_equal(const Expr& x, std::uint32_t xi, const Expr& y, std::uint32_t yi) {
    const ExprNode& a = x.nodes[xi];
    const ExprNode& b = y.nodes[yi];
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprNode::Kind::number:
            return a.value == b.value;
        case ExprNode::Kind::variable:
            return x.var_name(a) == y.var_name(b);
        case ExprNode::Kind::negate:
            return subtree_equal(x, a.a, y, b.a);
        default:
            return subtree_equal(x, a.a, y, b.a) && subtree_equal(x, a.b, y, b.b);
    }
}

}  // namespace

bool operator==(const Expr& a, const Expr& b) {
    if (a.nodes.empty() || b.nodes.empty()) return a.nodes.empty() == b.nodes.empty();
    return subtree_equal(a, a.root, b, b.root);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    Expr parse() {
        std::uint32_t root = parse_sum();
        skip_ws();
        if (pos_ != text_.size())
            fail("end of input");
        if (out_.nodes.empty())
            fail("expression");
        out_.root = root;
        return std::move(out_);
    }

private:
    std::string_view text_;
    std::size_t pos_ = 0;
    Expr out_;

    [[noreturn]] void fail(const std::string& expected) {
        std::string msg = "parse error at offset " + std::to_string(pos_) +
                          ": expected " + expected;
        throw ParseError(pos_, expected, msg);
    }

    void skip_ws() {
        while (pos_ < text_.size() &&
               std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

    bool eat(char c) {
        if (peek() == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    std::uint32_t emit(ExprNode node) {
        out_.nodes.push_back(node);
        return static_cast<std::uint32_t>(out_.nodes.size() - 1);
    }

    std::uint32_t parse_sum() {
        std::uint32_t lhs = parse_term();
        for (;;) {
            skip_ws();
            if (eat('+'))
                lhs = emit({ExprNode::Kind::add, lhs, parse_term(), 0.0});
            else if (eat('-'))
                lhs = emit({ExprNode::Kind::sub, lhs, parse_term(), 0.0});
            else
                return lhs;
        }
    }

    std::uint32_t parse_term() {
        std::uint32_t lhs = parse_unary();
        for (;;) {
            skip_ws();
            if (eat('*'))
                lhs = emit({ExprNode::Kind::mul, lhs, parse_unary(), 0.0});
            else if (eat('/'))
                lhs = emit({ExprNode::Kind::divide, lhs, parse_unary(), 0.0});
            else
                return lhs;
        }
    }

    std::uint32_t parse_unary() {
        skip_ws();
        if (eat('-'))
            return emit({ExprNode::Kind::negate, parse_unary(), 0, 0.0});
        return parse_primary();
    }

    std::uint32_t parse_primary() {
        skip_ws();
        char c = peek();
        if (c == '(') {
            ++pos_;
            std::uint32_t inner = parse_sum();
            skip_ws();
            if (!eat(')'))
                fail("')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)))
            return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
            return parse_identifier();
        fail("number, identifier, or '('");
    }

    std::uint32_t parse_number() {
        std::size_t start = pos_;
        while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        if (peek() == '.') {
            ++pos_;
            while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
        }
        if (peek() == 'e' || peek() == 'E') {
            std::size_t mark = pos_;
            ++pos_;
            if (peek() == '+' || peek() == '-') ++pos_;
            if (std::isdigit(static_cast<unsigned char>(peek()))) {
                while (std::isdigit(static_cast<unsigned char>(peek()))) ++pos_;
            } else {
                pos_ = mark;  // "12e" is the literal 12 followed by an identifier
            }
        }
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, value);
        if (ec != std::errc() || ptr != text_.data() + pos_ || !std::isfinite(value)) {
            pos_ = start;
            fail("representable number");
        }
        return emit({ExprNode::Kind::number, 0, 0, value});
    }

    std::uint32_t parse_identifier() {
        std::size_t start = pos_;
        ++pos_;
        while (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_') ++pos_;
        std::string_view name = text_.substr(start, pos_ - start);
        std::uint32_t off = static_cast<std::uint32_t>(out_.symbols.size());
        out_.symbols.append(name);
        return emit({ExprNode::Kind::variable, off,
                     static_cast<std::uint32_t>(name.size()), 0.0});
    }
};

}  // namespace

Expr parse_expr(std::string_view text) { return Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double eval_node(const Expr& expr, std::uint32_t idx, const VarLookup& lookup) {
    const ExprNode& node = expr.nodes[idx];
    switch (node.kind) {
        case ExprNode::Kind::number:
            return node.value;
        case ExprNode::Kind::variable: {
            std::string_view name = expr.var_name(node);
            std::optional<double> v = lookup(name);
            if (!v)
                throw Error(errc::unbound_variable,
                            "unbound variable '" + std::string(name) + "'");
            return *v;
        }
        case ExprNode::Kind::negate:
            return -eval_node(expr, node.a, lookup);
        default: {
            double lhs = eval_node(expr, node.a, lookup);
            double rhs = eval_node(expr, node.b, lookup);
            double result = 0.0;
            switch (node.kind) {
                case ExprNode::Kind::add: result = lhs + rhs; break;
                case ExprNode::Kind::sub: result = lhs - rhs; break;
                case ExprNode::Kind::mul: result = lhs * rhs; break;
                default:
                    if (rhs == 0.0)
                        throw Error(errc::division_by_zero, "division by zero");
                    result = lhs / rhs;
                    break;
            }
            if (!std::isfinite(result))
                throw Error(errc::non_finite_result, "non-finite intermediate result");
            return result;
        }
    }
}

}  // namespace

double eval(const Expr& expr, const VarLookup& lookup) {
    if (expr.empty())
        throw Error(errc::parse_error, "empty expression");
    double result = eval_node(expr, expr.root, lookup);
    if (!std::isfinite(result))
        throw Error(errc::non_finite_result, "non-finite result");
    return result;
}

double eval(const Expr& expr, const std::unordered_map<std::string, double>& bindings) {
    return eval(expr, [&bindings](std::string_view name) -> std::optional<double> {
        auto it = bindings.find(std::string(name));
        if (it == bindings.end()) return std::nullopt;
        return it->second;
    });
}

std::vector<std::string> free_vars(const Expr& expr) {
    std::vector<std::string> vars;
    for (const ExprNode& node : expr.nodes)
        if (node.kind == ExprNode::Kind::variable)
            vars.emplace_back(expr.var_name(node));
    std::sort(vars.begin(), vars.end());
    vars.erase(std::unique(vars.begin(), vars.end()), vars.end());
    return vars;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

int precedence(ExprNode::Kind kind) {
    switch (kind) {
        case ExprNode::Kind::add:
        case ExprNode::Kind::sub: return 1;
        case ExprNode::Kind::mul:
        case ExprNode::Kind::divide: return 2;
        case ExprNode::Kind::negate: return 3;
        default: return 4;
    }
}

void print_number(std::string& out, double value) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
    out.append(buf, ptr);
}

void print_node(std::string& out, const Expr& expr, std::uint32_t idx) {
    const ExprNode& node = expr.nodes[idx];
    int prec = precedence(node.kind);
    switch (node.kind) {
        case ExprNode::Kind::number:
            print_number(out, node.value);
            return;
        case ExprNode::Kind::variable:
            out.append(expr.var_name(node));
            return;
        case ExprNode::Kind::negate: {
            out.push_back('-');
            bool parens = precedence(expr.nodes[node.a].kind) < prec;
            if (parens) out.push_back('(');
            print_node(out, expr, node.a);
            if (parens) out.push_back(')');
            return;
        }
        default: {
            char op = node.kind == ExprNode::Kind::add      ? '+'
                      : node.kind == ExprNode::Kind::sub    ? '-'
                      : node.kind == ExprNode::Kind::mul    ? '*'
                                                            : '/';
            bool lparens = precedence(expr.nodes[node.a].kind) < prec;
            // - and / are left-associative: an equal-precedence right child
            // needs parentheses to survive a round trip.
            int rprec = precedence(expr.nodes[node.b].kind);
            bool rparens = rprec < prec ||
                           (rprec == prec && (node.kind == ExprNode::Kind::sub ||
                                              node.kind == ExprNode::Kind::divide ||
                                              node.kind == ExprNode::Kind::add ||
                                              node.kind == ExprNode::Kind::mul));
            if (lparens) out.push_back('(');
            print_node(out, expr, node.a);
            if (lparens) out.push_back(')');
            out.push_back(op);
            if (rparens) out.push_back('(');
            print_node(out, expr, node.b);
            if (rparens) out.push_back(')');
            return;
        }
    }
}

}  // namespace

std::string to_string(const Expr& expr) {
    if (expr.empty()) return "";
    std::string out;
    print_node(out, expr, expr.root);
    return out;
}

const char* errc_name(errc code) {
    switch (code) {
        case errc::duplicate_id: return "DuplicateId";
        case errc::unknown_param_ref: return "UnknownParamRef";
        case errc::self_loop: return "SelfLoop";
        case errc::empty_io: return "EmptyIO";
        case errc::invalid_id: return "InvalidId";
        case errc::missing_expression: return "MissingExpression";
        case errc::expr_var_not_declared: return "ExprVarNotDeclared";
        case errc::non_finite_value: return "NonFiniteValue";
        case errc::unknown_id: return "UnknownId";
        case errc::query_overlap: return "QueryOverlap";
        case errc::not_fireable: return "NotFireable";
        case errc::invalid_path: return "InvalidPath";
        case errc::trace_too_large: return "TraceTooLarge";
        case errc::parse_error: return "ParseError";
        case errc::unbound_variable: return "UnboundVariable";
        case errc::division_by_zero: return "DivisionByZero";
        case errc::non_finite_result: return "NonFiniteResult";
        case errc::xml_error: return "XmlError";
        case errc::schema_error: return "SchemaError";
        case errc::bad_gen_spec: return "BadGenSpec";
        case errc::insufficient_data: return "InsufficientData";
    }
    return "Error";
}

}  // namespace mivar
