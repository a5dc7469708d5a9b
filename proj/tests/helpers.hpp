#pragma once

// Shared test utilities: a naive fixpoint oracle for the inference engine,
// an independent causal-validity checker for solution paths, and a random
// net generator. These deliberately avoid the library's own agenda/counter
// machinery so they can serve as independent ground truth.

#include <algorithm>
#include <cstdint>
#include <random>
#include <regex>
#include <sstream>
#include <string>
#include <vector>

#include "mivar/inference.hpp"
#include "mivar/net.hpp"

namespace mivar::testing {

struct OracleResult {
    std::vector<std::uint8_t> known;  // by param index
    std::vector<std::uint8_t> fired;  // by rule index
};

// Quadratic fixpoint: rescan every rule until nothing changes.
inline OracleResult oracle_closure(const MivarNet& net, const std::vector<ParamIndex>& given) {
    OracleResult result;
    result.known.assign(net.n(), 0);
    result.fired.assign(net.m(), 0);
    for (ParamIndex p : given) result.known[p] = 1;
    bool changed = true;
    while (changed) {
        changed = false;
        for (RuleIndex r = 0; r < net.m(); ++r) {
            if (result.fired[r]) continue;
            bool ready = true;
            for (ParamIndex p : net.rules[r].inputs)
                if (!result.known[p]) {
                    ready = false;
                    break;
                }
            if (!ready) continue;
            result.fired[r] = 1;
            changed = true;
            for (ParamIndex p : net.rules[r].outputs) result.known[p] = 1;
        }
    }
    return result;
}

inline bool oracle_reachable(const MivarNet& net, const Query& query) {
    std::vector<ParamIndex> given;
    for (const auto& [p, value] : query.given) {
        (void)value;
        given.push_back(p);
    }
    const OracleResult closure = oracle_closure(net, given);
    return std::all_of(query.find.begin(), query.find.end(),
                       [&](ParamIndex p) { return closure.known[p] != 0; });
}

// Replays a path from the given set: every rule's inputs must already be
// known at its position, and afterwards every find target must be known.
inline bool path_causally_valid(const MivarNet& net, const Query& query,
                                const SolutionPath& path) {
    std::vector<std::uint8_t> known(net.n(), 0);
    std::vector<std::uint8_t> used(net.m(), 0);
    for (const auto& [p, value] : query.given) {
        (void)value;
        known[p] = 1;
    }
    for (RuleIndex r : path.firing_order) {
        if (r >= net.m() || used[r]) return false;  // out of range or repeated
        used[r] = 1;
        for (ParamIndex p : net.rules[r].inputs)
            if (!known[p]) return false;
        for (ParamIndex p : net.rules[r].outputs) known[p] = 1;
    }
    return std::all_of(query.find.begin(), query.find.end(),
                       [&](ParamIndex p) { return known[p] != 0; });
}

inline bool is_subsequence(const std::vector<RuleIndex>& sub, const std::vector<RuleIndex>& full) {
    std::size_t i = 0;
    for (RuleIndex r : full) {
        if (i < sub.size() && sub[i] == r) ++i;
    }
    return i == sub.size();
}

// Random bipartite net: up to max_params params, up to max_rules rules with
// 1-3 distinct inputs and 1-2 outputs disjoint from them. Inputs may repeat
// across rules; wiring is otherwise unconstrained, so blocked queries and
// multi-producer params both occur. Expressions are sums of the inputs.
inline MivarNet random_net(std::mt19937& rng, std::uint32_t max_params = 30,
                           std::uint32_t max_rules = 40) {
    const std::uint32_t n = std::uniform_int_distribution<std::uint32_t>(1, max_params)(rng);
    const std::uint32_t m = std::uniform_int_distribution<std::uint32_t>(0, max_rules)(rng);

    NetBuilder builder;
    for (std::uint32_t i = 1; i <= n; ++i)
        builder.add_param(Parameter{"P" + std::to_string(i), "", std::nullopt});

    std::vector<ParamIndex> all(n);
    for (ParamIndex p = 0; p < n; ++p) all[p] = p;

    for (std::uint32_t r = 1; r <= m; ++r) {
        std::shuffle(all.begin(), all.end(), rng);
        const std::uint32_t want_in =
            std::min<std::uint32_t>(n, std::uniform_int_distribution<std::uint32_t>(1, 3)(rng));
        std::uint32_t want_out =
            std::min<std::uint32_t>(n - want_in,
                                    std::uniform_int_distribution<std::uint32_t>(1, 2)(rng));
        if (want_out == 0) continue;  // too few params for disjoint outputs

        Rule rule;
        rule.id = "R" + std::to_string(r);
        rule.inputs.assign(all.begin(), all.begin() + want_in);
        rule.outputs.assign(all.begin() + want_in, all.begin() + want_in + want_out);
        for (std::uint32_t out = 0; out < want_out; ++out) {
            Expr sum = Expr::variable("P" + std::to_string(rule.inputs[0] + 1));
            for (std::uint32_t i = 1; i < want_in; ++i)
                sum = Expr::binary(ExprNode::Kind::add, std::move(sum),
                                   Expr::variable("P" + std::to_string(rule.inputs[i] + 1)));
            rule.expressions.push_back(std::move(sum));
        }
        builder.add_rule_resolved(std::move(rule));
    }
    return std::move(builder).finish();
}

// Random query over the net: a random given subset with value 1.0 each and
// random find targets among the rest. May be unsolvable.
inline Query random_query(std::mt19937& rng, const MivarNet& net) {
    std::vector<ParamIndex> all(net.n());
    for (ParamIndex p = 0; p < net.n(); ++p) all[p] = p;
    std::shuffle(all.begin(), all.end(), rng);

    const std::uint32_t n_given =
        std::uniform_int_distribution<std::uint32_t>(0, net.n())(rng);
    const std::uint32_t n_find = std::uniform_int_distribution<std::uint32_t>(
        0, std::min<std::uint32_t>(3, net.n() - n_given))(rng);

    Query query;
    for (std::uint32_t i = 0; i < n_given; ++i) query.given.emplace_back(all[i], 1.0);
    for (std::uint32_t i = 0; i < n_find; ++i) query.find.push_back(all[n_given + i]);
    std::sort(query.given.begin(), query.given.end());
    std::sort(query.find.begin(), query.find.end());
    return query;
}

// Random query guaranteed solvable and non-trivial: find targets are drawn
// from the oracle closure of the given set, outside the given set itself.
// Returns false when the sampled net/given admit no such target.
inline bool random_solvable_query(std::mt19937& rng, const MivarNet& net, Query& query_out) {
    Query query = random_query(rng, net);
    query.find.clear();
    std::vector<ParamIndex> given;
    for (const auto& [p, value] : query.given) {
        (void)value;
        given.push_back(p);
    }
    const OracleResult closure = oracle_closure(net, given);
    std::vector<ParamIndex> derivable;
    for (ParamIndex p = 0; p < net.n(); ++p)
        if (closure.known[p] && !std::binary_search(given.begin(), given.end(), p))
            derivable.push_back(p);
    if (derivable.empty()) return false;
    std::shuffle(derivable.begin(), derivable.end(), rng);
    const std::uint32_t n_find = std::uniform_int_distribution<std::uint32_t>(
        1, static_cast<std::uint32_t>(std::min<std::size_t>(3, derivable.size())))(rng);
    query.find.assign(derivable.begin(), derivable.begin() + n_find);
    std::sort(query.find.begin(), query.find.end());
    query_out = std::move(query);
    return true;
}

// Line-level DOT syntax check standing in for a real renderer: header and
// closing brace, balanced quotes, and every statement one of the shapes the
// exporter may produce.
inline bool dot_syntax_ok(const std::string& text) {
    static const std::regex header(R"(digraph [A-Za-z_][A-Za-z0-9_]* \{)");
    static const std::regex graph_attr(R"([a-z]+=[A-Za-z0-9]+;)");
    static const std::regex node_defaults(R"(node \[[^\[\]]*\];)");
    static const std::regex node_decl(R"([A-Za-z_][A-Za-z0-9_]* \[[^\[\]]*\];)");
    static const std::regex edge(R"([A-Za-z_][A-Za-z0-9_]* -> [A-Za-z_][A-Za-z0-9_]*;)");
    static const std::regex rank(R"(\{ rank=(source|sink);( [A-Za-z_][A-Za-z0-9_]*;)+ \})");

    std::istringstream in(text);
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) {
        const auto begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos) continue;
        lines.push_back(line.substr(begin, line.find_last_not_of(" \t") - begin + 1));
    }
    if (lines.size() < 2) return false;
    if (!std::regex_match(lines.front(), header)) return false;
    if (lines.back() != "}") return false;
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        const std::string& stmt = lines[i];
        if (std::count(stmt.begin(), stmt.end(), '"') % 2 != 0) return false;
        if (!std::regex_match(stmt, graph_attr) && !std::regex_match(stmt, node_defaults) &&
            !std::regex_match(stmt, node_decl) && !std::regex_match(stmt, edge) &&
            !std::regex_match(stmt, rank))
            return false;
    }
    return true;
}

inline std::uint64_t total_inputs(const MivarNet& net) {
    std::uint64_t total = 0;
    for (const Rule& rule : net.rules) total += rule.inputs.size();
    return total;
}

inline bool counters_within_bounds(const MivarNet& net, const OpCounter& counters) {
    return counters.known_marks <= net.n() && counters.rule_marks <= 2ull * net.m() &&
           counters.counter_decrements <= total_inputs(net);
}

}  // namespace mivar::testing
