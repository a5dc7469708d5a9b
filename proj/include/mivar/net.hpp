#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "mivar/error.hpp"
#include "mivar/expr.hpp"

namespace mivar {

using ParamIndex = std::uint32_t;
using RuleIndex = std::uint32_t;

/// An object-variable of the net. The dense index is the position in
/// MivarNet::params; the text id is what files and queries use.
struct Parameter {
    std::string id;
    std::string description;
    std::optional<double> stored_value;  // initial binding from the file; never "known"
};

/// A rule as declared by a file or generator, before parameter names are
/// resolved to dense indices.
struct RuleDecl {
    std::string id;
    std::vector<std::string> inputs;
    std::vector<std::string> outputs;
    std::vector<Expr> expressions;  // one per output
    std::string description;
};

/// A resolved production core A => B: fire when all inputs are known,
/// deriving every output. One expression per output; each expression's free
/// variables are a subset of the declared inputs.
struct Rule {
    std::string id;
    std::vector<ParamIndex> inputs;
    std::vector<ParamIndex> outputs;
    std::vector<Expr> expressions;
    std::string description;
};

/// Param -> rules adjacency in compressed form. items[offsets[p]..offsets[p+1])
/// are the rule indices incident to parameter p, in rule declaration order.
struct AdjacencyIndex {
    std::vector<std::uint32_t> offsets;  // size n+1
    std::vector<RuleIndex> items;

    std::span<const RuleIndex> of(ParamIndex p) const {
        return std::span<const RuleIndex>(items).subspan(offsets[p], offsets[p + 1] - offsets[p]);
    }
};

/// The bipartite object/rule network. Immutable after construction and safe
/// to share across concurrent solves. Build through build_net or NetBuilder;
/// fields are public so tests can probe (and deliberately break) instances.
struct MivarNet {
    std::vector<Parameter> params;
    std::vector<Rule> rules;
    AdjacencyIndex consumers;  // param -> rules that take it as input
    AdjacencyIndex producers;  // param -> rules that emit it as output
    std::unordered_map<std::string, ParamIndex> param_index;

    std::uint32_t n() const { return static_cast<std::uint32_t>(params.size()); }
    std::uint32_t m() const { return static_cast<std::uint32_t>(rules.size()); }

    std::optional<ParamIndex> find_param(std::string_view id) const {
        auto it = param_index.find(std::string(id));
        if (it == param_index.end()) return std::nullopt;
        return it->second;
    }

    /// Linear scan; fine for the small nets that look rules up by name.
    std::optional<RuleIndex> find_rule(std::string_view id) const {
        for (RuleIndex r = 0; r < rules.size(); ++r)
            if (rules[r].id == id) return r;
        return std::nullopt;
    }
};

bool operator==(const Parameter& a, const Parameter& b);
bool operator==(const Rule& a, const Rule& b);
bool operator==(const MivarNet& a, const MivarNet& b);

/// Incremental validating constructor. Parameters must be added before any
/// rule that references them; everything is checked as it arrives, so readers
/// can stream arbitrarily large files through it. finish() assembles the
/// adjacency indices and returns the net.
class NetBuilder {
public:
    void add_param(Parameter param);
    void add_rule(RuleDecl decl);
    /// Same checks as add_rule, for callers that already know the indices.
    void add_rule_resolved(Rule rule);
    void reserve(std::size_t n_params, std::size_t n_rules);
    MivarNet finish();

private:
    MivarNet net_;
    std::unordered_set<std::string> rule_ids_;
};

/// Validating batch constructor.
/// Throws Error with code: duplicate_id, unknown_param_ref, self_loop,
/// empty_io, invalid_id, missing_expression, expr_var_not_declared,
/// or non_finite_value.
MivarNet build_net(std::vector<Parameter> params, std::vector<RuleDecl> rules);

enum class ViolationKind {
    duplicate_param_id,
    duplicate_rule_id,
    invalid_id,
    non_finite_stored_value,
    empty_inputs,
    empty_outputs,
    self_loop,
    duplicate_input,
    duplicate_output,
    param_index_out_of_range,
    missing_expression,
    expr_var_not_declared,
    index_mismatch,
    lookup_mismatch,
};

const char* violation_kind_name(ViolationKind kind);

/// One broken invariant: which entity, which invariant, and how.
struct Violation {
    ViolationKind kind;
    std::string entity;
    std::string detail;
};

/// Re-checks every structural invariant of an already-built instance,
/// including that consumers/producers are exactly the inverse of the rule
/// input/output lists. Empty result iff the net is well formed.
std::vector<Violation> validate_net(const MivarNet& net);

/// Identifier shape shared by parameter ids, rule ids, and expression
/// variables: [A-Za-z_][A-Za-z0-9_]*.
bool is_valid_identifier(std::string_view id);

}  // namespace mivar
