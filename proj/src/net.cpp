#include "mivar/net.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

namespace mivar {

bool is_valid_identifier(std::string_view id) {
    if (id.empty()) return false;
    auto head = static_cast<unsigned char>(id[0]);
    if (!std::isalpha(head) && id[0] != '_') return false;
    for (char c : id.substr(1))
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

bool operator==(const Parameter& a, const Parameter& b) {
    return a.id == b.id && a.description == b.description && a.stored_value == b.stored_value;
}

bool operator==(const Rule& a, const Rule& b) {
    return a.id == b.id && a.inputs == b.inputs && a.outputs == b.outputs &&
           a.expressions == b.expressions && a.description == b.description;
}

bool operator==(const MivarNet& a, const MivarNet& b) {
    return a.params == b.params && a.rules == b.rules;
}

namespace {

[[noreturn]] void bail(errc code, const std::string& message) { throw Error(code, message); }

template <typename T>
bool has_duplicates(const std::vector<T>& values) {
    std::vector<T> copy = values;
    std::sort(copy.begin(), copy.end());
    return std::adjacent_find(copy.begin(), copy.end()) != copy.end();
}

template <typename T>
bool intersects(const std::vector<T>& a, const std::vector<T>& b) {
    for (const T& x : a)
        for (const T& y : b)
            if (x == y) return true;
    return false;
}

}  // namespace

void NetBuilder::reserve(std::size_t n_params, std::size_t n_rules) {
    net_.params.reserve(n_params);
    net_.rules.reserve(n_rules);
    net_.param_index.reserve(n_params);
    rule_ids_.reserve(n_rules);
}

void NetBuilder::add_param(Parameter param) {
    if (!is_valid_identifier(param.id))
        bail(errc::invalid_id, "invalid parameter id '" + param.id + "'");
    if (param.stored_value && !std::isfinite(*param.stored_value))
        bail(errc::non_finite_value, "parameter '" + param.id + "' has a non-finite stored value");
    auto [it, inserted] =
        net_.param_index.emplace(param.id, static_cast<ParamIndex>(net_.params.size()));
    if (!inserted)
        bail(errc::duplicate_id, "duplicate parameter id '" + param.id + "'");
    net_.params.push_back(std::move(param));
}

void NetBuilder::add_rule(RuleDecl decl) {
    Rule rule;
    rule.inputs.reserve(decl.inputs.size());
    rule.outputs.reserve(decl.outputs.size());
    for (const std::string& name : decl.inputs) {
        auto it = net_.param_index.find(name);
        if (it == net_.param_index.end())
            bail(errc::unknown_param_ref,
                 "rule '" + decl.id + "' references unknown parameter '" + name + "'");
        rule.inputs.push_back(it->second);
    }
    for (const std::string& name : decl.outputs) {
        auto it = net_.param_index.find(name);
        if (it == net_.param_index.end())
            bail(errc::unknown_param_ref,
                 "rule '" + decl.id + "' references unknown parameter '" + name + "'");
        rule.outputs.push_back(it->second);
    }
    rule.id = std::move(decl.id);
    rule.expressions = std::move(decl.expressions);
    rule.description = std::move(decl.description);
    add_rule_resolved(std::move(rule));
}

void NetBuilder::add_rule_resolved(Rule rule) {
    if (!is_valid_identifier(rule.id))
        bail(errc::invalid_id, "invalid rule id '" + rule.id + "'");
    if (rule.inputs.empty() || rule.outputs.empty())
        bail(errc::empty_io, "rule '" + rule.id + "' must have inputs and outputs");
    const ParamIndex n = static_cast<ParamIndex>(net_.params.size());
    for (ParamIndex p : rule.inputs)
        if (p >= n) bail(errc::unknown_param_ref, "rule '" + rule.id + "' input index out of range");
    for (ParamIndex p : rule.outputs)
        if (p >= n) bail(errc::unknown_param_ref, "rule '" + rule.id + "' output index out of range");
    if (has_duplicates(rule.inputs))
        bail(errc::duplicate_id, "rule '" + rule.id + "' lists an input twice");
    if (has_duplicates(rule.outputs))
        bail(errc::duplicate_id, "rule '" + rule.id + "' lists an output twice");
    if (intersects(rule.inputs, rule.outputs))
        bail(errc::self_loop, "rule '" + rule.id + "' consumes and produces the same parameter");
    if (rule.expressions.size() != rule.outputs.size())
        bail(errc::missing_expression,
             "rule '" + rule.id + "' needs exactly one expression per output");
    for (const Expr& expr : rule.expressions) {
        for (const ExprNode& node : expr.nodes) {
            if (node.kind != ExprNode::Kind::variable) continue;
            std::string_view name = expr.var_name(node);
            bool declared = false;
            for (ParamIndex p : rule.inputs)
                if (net_.params[p].id == name) { declared = true; break; }
            if (!declared)
                bail(errc::expr_var_not_declared, "rule '" + rule.id + "' expression uses '" +
                                                      std::string(name) +
                                                      "' which is not among its inputs");
        }
    }
    if (!rule_ids_.insert(rule.id).second)
        bail(errc::duplicate_id, "duplicate rule id '" + rule.id + "'");
    net_.rules.push_back(std::move(rule));
}

MivarNet NetBuilder::finish() {
    rule_ids_.clear();
    const std::size_t n = net_.params.size();

    auto build = [&](bool from_inputs, AdjacencyIndex& index) {
        index.offsets.assign(n + 1, 0);
        for (const Rule& rule : net_.rules)
            for (ParamIndex p : from_inputs ? rule.inputs : rule.outputs)
                ++index.offsets[p + 1];
        for (std::size_t i = 1; i <= n; ++i) index.offsets[i] += index.offsets[i - 1];
        index.items.resize(index.offsets[n]);
        std::vector<std::uint32_t> cursor(index.offsets.begin(), index.offsets.end() - 1);
        for (RuleIndex r = 0; r < net_.rules.size(); ++r)
            for (ParamIndex p : from_inputs ? net_.rules[r].inputs : net_.rules[r].outputs)
                index.items[cursor[p]++] = r;
    };
    build(true, net_.consumers);
    build(false, net_.producers);
    return std::move(net_);
}

MivarNet build_net(std::vector<Parameter> params, std::vector<RuleDecl> rules) {
    NetBuilder builder;
    builder.reserve(params.size(), rules.size());
    for (Parameter& p : params) builder.add_param(std::move(p));
    for (RuleDecl& r : rules) builder.add_rule(std::move(r));
    return builder.finish();
}

const char* violation_kind_name(ViolationKind kind) {
    switch (kind) {
        case ViolationKind::duplicate_param_id: return "DuplicateParamId";
        case ViolationKind::duplicate_rule_id: return "DuplicateRuleId";
        case ViolationKind::invalid_id: return "InvalidId";
        case ViolationKind::non_finite_stored_value: return "NonFiniteStoredValue";
        case ViolationKind::empty_inputs: return "EmptyInputs";
        case ViolationKind::empty_outputs: return "EmptyOutputs";
        case ViolationKind::self_loop: return "SelfLoop";
        case ViolationKind::duplicate_input: return "DuplicateInput";
        case ViolationKind::duplicate_output: return "DuplicateOutput";
        case ViolationKind::param_index_out_of_range: return "ParamIndexOutOfRange";
        case ViolationKind::missing_expression: return "MissingExpression";
        case ViolationKind::expr_var_not_declared: return "ExprVarNotDeclared";
        case ViolationKind::index_mismatch: return "IndexMismatch";
        case ViolationKind::lookup_mismatch: return "LookupMismatch";
    }
    return "Violation";
}

std::vector<Violation> validate_net(const MivarNet& net) {
    std::vector<Violation> out;
    auto report = [&out](ViolationKind kind, std::string entity, std::string detail) {
        out.push_back(Violation{kind, std::move(entity), std::move(detail)});
    };

    const ParamIndex n = net.n();
    {
        std::unordered_set<std::string_view> seen;
        for (const Parameter& p : net.params) {
            if (!is_valid_identifier(p.id))
                report(ViolationKind::invalid_id, p.id, "parameter id is not an identifier");
            if (!seen.insert(p.id).second)
                report(ViolationKind::duplicate_param_id, p.id, "parameter id repeats");
            if (p.stored_value && !std::isfinite(*p.stored_value))
                report(ViolationKind::non_finite_stored_value, p.id, "stored value is not finite");
        }
    }
    if (net.param_index.size() != net.params.size())
        report(ViolationKind::lookup_mismatch, "param_index",
               "lookup table size differs from parameter count");
    for (ParamIndex p = 0; p < n; ++p) {
        auto it = net.param_index.find(net.params[p].id);
        if (it == net.param_index.end() || it->second != p) {
            report(ViolationKind::lookup_mismatch, net.params[p].id,
                   "lookup table does not map the id to its dense index");
        }
    }

    std::unordered_set<std::string_view> rule_seen;
    for (const Rule& rule : net.rules) {
        if (!is_valid_identifier(rule.id))
            report(ViolationKind::invalid_id, rule.id, "rule id is not an identifier");
        if (!rule_seen.insert(rule.id).second)
            report(ViolationKind::duplicate_rule_id, rule.id, "rule id repeats");
        if (rule.inputs.empty())
            report(ViolationKind::empty_inputs, rule.id, "rule has no inputs");
        if (rule.outputs.empty())
            report(ViolationKind::empty_outputs, rule.id, "rule has no outputs");
        bool in_range = true;
        for (ParamIndex p : rule.inputs)
            if (p >= n) { in_range = false; break; }
        for (ParamIndex p : rule.outputs)
            if (p >= n) { in_range = false; break; }
        if (!in_range) {
            report(ViolationKind::param_index_out_of_range, rule.id,
                   "rule references a parameter index outside [0, n)");
            continue;
        }
        if (has_duplicates(rule.inputs))
            report(ViolationKind::duplicate_input, rule.id, "input list repeats a parameter");
        if (has_duplicates(rule.outputs))
            report(ViolationKind::duplicate_output, rule.id, "output list repeats a parameter");
        if (intersects(rule.inputs, rule.outputs))
            report(ViolationKind::self_loop, rule.id,
                   "input and output lists share a parameter");
        if (rule.expressions.size() != rule.outputs.size()) {
            report(ViolationKind::missing_expression, rule.id,
                   "expression count differs from output count");
        }
        for (const Expr& expr : rule.expressions) {
            for (const ExprNode& node : expr.nodes) {
                if (node.kind != ExprNode::Kind::variable) continue;
                std::string_view name = expr.var_name(node);
                bool declared = false;
                for (ParamIndex p : rule.inputs)
                    if (net.params[p].id == name) { declared = true; break; }
                if (!declared)
                    report(ViolationKind::expr_var_not_declared, rule.id,
                           "expression variable '" + std::string(name) +
                               "' is not a declared input");
            }
        }
    }

    // consumers/producers must be the exact inverse of the rule lists.
    auto check_index = [&](const AdjacencyIndex& index, bool from_inputs, const char* name) {
        std::size_t edges = 0;
        for (const Rule& rule : net.rules) edges += (from_inputs ? rule.inputs : rule.outputs).size();
        if (index.offsets.size() != n + 1 || index.items.size() != edges ||
            (n > 0 && index.offsets[n] != edges) || (index.offsets.empty())) {
            report(ViolationKind::index_mismatch, name, "adjacency size differs from rule lists");
            return;
        }
        for (RuleIndex r = 0; r < net.rules.size(); ++r) {
            const Rule& rule = net.rules[r];
            for (ParamIndex p : from_inputs ? rule.inputs : rule.outputs) {
                auto span = index.of(p);
                if (std::find(span.begin(), span.end(), r) == span.end()) {
                    report(ViolationKind::index_mismatch, name,
                           "edge " + net.params[p].id + " <-> " + rule.id +
                               " missing from the adjacency index");
                    return;
                }
            }
        }
        // Every stored edge must correspond to a rule list entry (bipartite and exact).
        for (ParamIndex p = 0; p < n; ++p) {
            for (RuleIndex r : index.of(p)) {
                if (r >= net.rules.size()) {
                    report(ViolationKind::index_mismatch, name,
                           "adjacency entry references a rule index outside [0, m)");
                    return;
                }
                const auto& list = from_inputs ? net.rules[r].inputs : net.rules[r].outputs;
                if (std::find(list.begin(), list.end(), p) == list.end()) {
                    report(ViolationKind::index_mismatch, name,
                           "adjacency lists " + net.params[p].id + " <-> " + net.rules[r].id +
                               " which the rule does not declare");
                    return;
                }
            }
        }
    };
    check_index(net.consumers, true, "consumers");
    check_index(net.producers, false, "producers");

    return out;
}

}  // namespace mivar
