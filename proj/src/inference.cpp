#include "mivar/inference.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace mivar {

Query make_query(const MivarNet& net,
                 std::span<const std::pair<std::string, double>> given,
                 std::span<const std::string> find) {
    Query query;
    query.given.reserve(given.size());
    for (const auto& [name, value] : given) {
        auto p = net.find_param(name);
        if (!p) throw Error(errc::unknown_id, "unknown parameter '" + name + "' in given set");
        if (!std::isfinite(value))
            throw Error(errc::non_finite_value, "non-finite value for '" + name + "'");
        query.given.emplace_back(*p, value);
    }
    std::sort(query.given.begin(), query.given.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (std::size_t i = 1; i < query.given.size(); ++i)
        if (query.given[i - 1].first == query.given[i].first)
            throw Error(errc::duplicate_id, "parameter '" +
                                                net.params[query.given[i].first].id +
                                                "' is given twice");
    query.find.reserve(find.size());
    for (const std::string& name : find) {
        auto p = net.find_param(name);
        if (!p) throw Error(errc::unknown_id, "unknown parameter '" + name + "' in find set");
        query.find.push_back(*p);
    }
    std::sort(query.find.begin(), query.find.end());
    auto dup = std::adjacent_find(query.find.begin(), query.find.end());
    if (dup != query.find.end())
        throw Error(errc::duplicate_id,
                    "parameter '" + net.params[*dup].id + "' is required twice");
    for (const auto& [p, value] : query.given)
        if (std::binary_search(query.find.begin(), query.find.end(), p))
            throw Error(errc::query_overlap,
                        "parameter '" + net.params[p].id + "' is both given and required");
    return query;
}

namespace {

/// Rules that just reached zero unmet inputs enter the agenda together,
/// ordered by declaration index, so one engine wave matches one matrix scan.
void enqueue_wave(InferenceState& state, std::vector<RuleIndex>& wave) {
    std::sort(wave.begin(), wave.end());
    for (RuleIndex r : wave) {
        state.agenda.push_back(r);
        ++state.counters.rule_marks;  // the "ready" mark
    }
    wave.clear();
}

InferenceState init_state_impl(const MivarNet& net, const Query& query,
                               std::vector<std::uint8_t> relevant) {
    InferenceState state;
    state.known.assign(net.n(), 0);
    state.is_required.assign(net.n(), 0);
    state.fired.assign(net.m(), 0);
    state.relevant = std::move(relevant);
    state.unmet_inputs.resize(net.m());
    for (RuleIndex r = 0; r < net.m(); ++r)
        state.unmet_inputs[r] = static_cast<std::uint32_t>(net.rules[r].inputs.size());

    for (ParamIndex p : query.find) state.is_required[p] = 1;
    state.required_remaining = static_cast<std::uint32_t>(query.find.size());

    std::vector<RuleIndex> wave;
    for (const auto& [p, value] : query.given) {
        (void)value;  // bindings matter only to evaluate_path
        state.known[p] = 1;
        ++state.counters.known_marks;
        for (RuleIndex r : net.consumers.of(p)) {
            assert(state.unmet_inputs[r] > 0);
            --state.unmet_inputs[r];
            ++state.counters.counter_decrements;
            if (state.unmet_inputs[r] == 0 &&
                (state.relevant.empty() || state.relevant[r]))
                wave.push_back(r);
        }
    }
    enqueue_wave(state, wave);
    return state;
}

}  // namespace

InferenceState init_state(const MivarNet& net, const Query& query) {
    return init_state_impl(net, query, {});
}

std::vector<RuleIndex> find_fireable(const InferenceState& state) {
    // The engine advances head as it fires; a manual fire_rule does not, so
    // filter fired rules out of the pending window instead of assuming it.
    std::vector<RuleIndex> pending;
    for (std::size_t i = state.head; i < state.agenda.size(); ++i)
        if (!state.fired[state.agenda[i]]) pending.push_back(state.agenda[i]);
    return pending;
}

std::vector<ParamIndex> fire_rule(InferenceState& state, const MivarNet& net, RuleIndex rule) {
    if (rule >= net.m() || state.fired[rule] || state.unmet_inputs[rule] != 0)
        throw Error(errc::not_fireable,
                    "rule " + (rule < net.m() ? net.rules[rule].id : std::to_string(rule)) +
                        " is not fireable");
    state.fired[rule] = 1;
    ++state.counters.rule_marks;  // the "launched" mark

    std::vector<ParamIndex> newly_known;
    for (ParamIndex p : net.rules[rule].outputs) {
        if (state.known[p]) continue;  // an already known output is left alone
        state.known[p] = 1;
        ++state.counters.known_marks;
        if (state.is_required[p]) {
            assert(state.required_remaining > 0);
            --state.required_remaining;
        }
        newly_known.push_back(p);
    }

    std::vector<RuleIndex> wave;
    for (ParamIndex p : newly_known) {
        for (RuleIndex r : net.consumers.of(p)) {
            if (state.fired[r]) continue;
            assert(state.unmet_inputs[r] > 0);
            --state.unmet_inputs[r];
            ++state.counters.counter_decrements;
            if (state.unmet_inputs[r] == 0 &&
                (state.relevant.empty() || state.relevant[r]))
                wave.push_back(r);
        }
    }
    enqueue_wave(state, wave);
    return newly_known;
}

std::vector<RuleIndex> backward_relevance(const MivarNet& net,
                                          std::span<const ParamIndex> find,
                                          std::span<const ParamIndex> given) {
    std::vector<std::uint8_t> stop(net.n(), 0);
    for (ParamIndex p : given) stop[p] = 1;
    std::vector<std::uint8_t> param_seen(net.n(), 0);
    std::vector<std::uint8_t> rule_seen(net.m(), 0);
    std::vector<ParamIndex> worklist;
    for (ParamIndex p : find) {
        if (!param_seen[p] && !stop[p]) {
            param_seen[p] = 1;
            worklist.push_back(p);
        }
    }
    std::vector<RuleIndex> relevant;
    while (!worklist.empty()) {
        ParamIndex p = worklist.back();
        worklist.pop_back();
        for (RuleIndex r : net.producers.of(p)) {
            if (rule_seen[r]) continue;
            rule_seen[r] = 1;
            relevant.push_back(r);
            for (ParamIndex input : net.rules[r].inputs) {
                if (!param_seen[input] && !stop[input]) {
                    param_seen[input] = 1;
                    worklist.push_back(input);
                }
            }
        }
    }
    std::sort(relevant.begin(), relevant.end());
    return relevant;
}

namespace {

MissingData make_missing_data(const MivarNet& net, const Query& query,
                              const InferenceState& state) {
    MissingData missing;
    for (ParamIndex p : query.find)
        if (!state.known[p]) missing.unreached_targets.push_back(p);
    // Relevant rules that can never fire with the data at hand: the blocked
    // frontier. Propagation stops at params that are already known.
    std::vector<ParamIndex> known_params;
    for (ParamIndex p = 0; p < net.n(); ++p)
        if (state.known[p]) known_params.push_back(p);
    for (RuleIndex r : backward_relevance(net, missing.unreached_targets, known_params))
        if (!state.fired[r]) missing.frontier.push_back(r);
    return missing;
}

}  // namespace

InferenceResult run_inference(const MivarNet& net, const Query& query,
                              const SolveOptions& options, InferenceState* state_out) {
    std::vector<std::uint8_t> relevant;
    if (options.restrict_to_relevant) {
        std::vector<ParamIndex> given_params;
        given_params.reserve(query.given.size());
        for (const auto& [p, value] : query.given) given_params.push_back(p);
        relevant.assign(net.m(), 0);
        for (RuleIndex r : backward_relevance(net, query.find, given_params)) relevant[r] = 1;
    }
    InferenceState local = init_state_impl(net, query, std::move(relevant));
    InferenceState& state = state_out ? (*state_out = std::move(local), *state_out) : local;

    SolutionPath path;
    bool done = !options.run_to_exhaustion && state.required_remaining == 0;
    while (!done && state.head < state.agenda.size()) {
        RuleIndex next;
        if (options.policy == TieBreakPolicy::fifo) {
            next = state.agenda[state.head++];
        } else {
            next = state.agenda.back();
            state.agenda.pop_back();
        }
        fire_rule(state, net, next);
        path.firing_order.push_back(next);
        done = !options.run_to_exhaustion && state.required_remaining == 0;
    }

    if (state.required_remaining == 0) return InferenceResult(std::move(path));
    return InferenceResult(make_missing_data(net, query, state));
}

SolutionPath prune_path(const MivarNet& net, const SolutionPath& path, const Query& query) {
    const std::size_t len = path.firing_order.size();
    constexpr std::uint32_t kNone = 0xffffffffu;

    std::vector<std::uint8_t> given(net.n(), 0);
    for (const auto& [p, value] : query.given) given[p] = 1;

    // First writer wins: the rule whose firing actually supplied each param.
    std::vector<std::uint32_t> writer(net.n(), kNone);
    for (std::size_t i = 0; i < len; ++i) {
        RuleIndex r = path.firing_order[i];
        if (r >= net.m()) throw Error(errc::invalid_path, "path references an unknown rule");
        for (ParamIndex p : net.rules[r].outputs)
            if (!given[p] && writer[p] == kNone) writer[p] = static_cast<std::uint32_t>(i);
    }

    std::vector<std::uint8_t> keep(len, 0);
    std::vector<std::uint8_t> seen(net.n(), 0);
    std::vector<ParamIndex> needed;
    for (ParamIndex p : query.find) {
        if (!seen[p]) {
            seen[p] = 1;
            needed.push_back(p);
        }
    }
    while (!needed.empty()) {
        ParamIndex p = needed.back();
        needed.pop_back();
        if (given[p]) continue;
        std::uint32_t w = writer[p];
        if (w == kNone)
            throw Error(errc::invalid_path,
                        "path does not derive required parameter '" + net.params[p].id + "'");
        if (keep[w]) continue;
        keep[w] = 1;
        for (ParamIndex input : net.rules[path.firing_order[w]].inputs) {
            if (!seen[input]) {
                seen[input] = 1;
                needed.push_back(input);
            }
        }
    }

    SolutionPath pruned;
    for (std::size_t i = 0; i < len; ++i)
        if (keep[i]) pruned.firing_order.push_back(path.firing_order[i]);
    return pruned;
}

std::vector<std::optional<double>> evaluate_path(
    const MivarNet& net, const SolutionPath& path,
    std::span<const std::pair<ParamIndex, double>> given) {
    std::vector<std::optional<double>> bindings(net.n());
    for (const auto& [p, value] : given) {
        if (p >= net.n()) throw Error(errc::unknown_id, "given parameter index out of range");
        if (!std::isfinite(value))
            throw Error(errc::non_finite_value,
                        "non-finite value for '" + net.params[p].id + "'");
        bindings[p] = value;
    }
    auto lookup = [&](std::string_view name) -> std::optional<double> {
        auto it = net.param_index.find(std::string(name));
        if (it == net.param_index.end()) return std::nullopt;
        return bindings[it->second];
    };
    for (RuleIndex r : path.firing_order) {
        if (r >= net.m()) throw Error(errc::invalid_path, "path references an unknown rule");
        const Rule& rule = net.rules[r];
        for (std::size_t k = 0; k < rule.outputs.size(); ++k) {
            ParamIndex out = rule.outputs[k];
            if (bindings[out]) continue;  // first writer wins
            try {
                bindings[out] = eval(rule.expressions[k], lookup);
            } catch (const Error& e) {
                throw EvalError(e.code(), rule.id, net.params[out].id,
                                "rule " + rule.id + ", output " + net.params[out].id + ": " +
                                    e.what());
            }
        }
    }
    return bindings;
}

std::variant<Solution, MissingData> solve(const MivarNet& net, const Query& query,
                                          const SolveOptions& options) {
    InferenceState state;
    InferenceResult result = run_inference(net, query, options, &state);
    if (std::holds_alternative<MissingData>(result))
        return std::get<MissingData>(std::move(result));

    Solution solution;
    solution.path = prune_path(net, std::get<SolutionPath>(result), query);
    solution.bindings = evaluate_path(net, solution.path, query.given);
    solution.stats = state.counters;
    return solution;
}

}  // namespace mivar
