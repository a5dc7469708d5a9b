#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "mivar/net.hpp"

namespace mivar {

/// GIVEN bindings and TO-FIND targets. given and find are disjoint, sorted
/// by parameter index, and duplicate-free; build through make_query.
struct Query {
    std::vector<std::pair<ParamIndex, double>> given;
    std::vector<ParamIndex> find;
};

/// Resolves names against the net and checks the Query invariants.
/// Throws Error(unknown_id) for absent ids, Error(query_overlap) if a
/// parameter is both given and required, Error(non_finite_value) for
/// non-finite bindings, Error(duplicate_id) for repeated ids.
Query make_query(const MivarNet& net,
                 std::span<const std::pair<std::string, double>> given,
                 std::span<const std::string> find);

/// Operation counts of one run, the engine's cost measure. Bounded by
/// known_marks <= n, rule_marks <= 2m, counter_decrements <= sum |inputs(r)|.
struct OpCounter {
    std::uint64_t known_marks = 0;        // parameters marked known
    std::uint64_t rule_marks = 0;         // agenda marks: one per enqueue, one per fire
    std::uint64_t counter_decrements = 0; // unmet-input counter decrements
};

enum class TieBreakPolicy {
    fifo,  // fire in discovery order; declaration order within one wave (default)
    lifo,  // fire the most recently discovered rule first
};

/// Mutable solve state. known only ever grows; between operations
/// unmet_inputs[r] == |inputs(r) \ known| for every rule the run may fire.
struct InferenceState {
    std::vector<std::uint8_t> known;       // per param
    std::vector<std::uint8_t> is_required; // per param, the w marks
    std::vector<std::uint32_t> unmet_inputs;  // per rule
    std::vector<std::uint8_t> fired;       // per rule
    std::vector<RuleIndex> agenda;         // discovered fireable rules; [head, end) pending
    std::size_t head = 0;
    std::uint32_t required_remaining = 0;
    OpCounter counters;
    std::vector<std::uint8_t> relevant;    // empty = no restriction
};

/// Ordered rule firings forming a derivation; no rule appears twice.
struct SolutionPath {
    std::vector<RuleIndex> firing_order;
};

/// Outcome of a blocked run: which targets stayed unknown and which relevant
/// rules can never fire with the data at hand.
struct MissingData {
    std::vector<ParamIndex> unreached_targets;
    std::vector<RuleIndex> frontier;
};

struct SolveOptions {
    TieBreakPolicy policy = TieBreakPolicy::fifo;
    bool run_to_exhaustion = false;     // keep firing after all targets are known
    bool restrict_to_relevant = false;  // combined mode: only fire backward-relevant rules
};

/// Mark given params known, set required marks, initialize unmet-input
/// counters, and enqueue rules that are already fireable.
InferenceState init_state(const MivarNet& net, const Query& query);

/// Discovered rules not yet fired, in firing order. Empty means blocked
/// (or finished).
std::vector<RuleIndex> find_fireable(const InferenceState& state);

/// Launch one rule: outputs become known, consumer counters drop, newly
/// enabled rules join the agenda in declaration order. Returns the outputs
/// that were not known before. Throws Error(not_fireable) if the rule has
/// unmet inputs or already fired.
std::vector<ParamIndex> fire_rule(InferenceState& state, const MivarNet& net, RuleIndex rule);

using InferenceResult = std::variant<SolutionPath, MissingData>;

/// The forward wave: fire rules until every find target is known (or, in
/// exhaustion mode, until nothing can fire). Purely symbolic; no arithmetic
/// runs here. state_out, when given, receives the final state.
InferenceResult run_inference(const MivarNet& net, const Query& query,
                              const SolveOptions& options = {},
                              InferenceState* state_out = nullptr);

/// Dead-rule elimination: keep only firings whose outputs are transitively
/// needed for the find targets under first-writer-wins semantics. The result
/// is a causally valid subsequence of the input; idempotent.
SolutionPath prune_path(const MivarNet& net, const SolutionPath& path, const Query& query);

/// The backward wave: rules reachable from the find targets by repeatedly
/// following producer edges, stopping at given params. Sorted by rule index.
std::vector<RuleIndex> backward_relevance(const MivarNet& net,
                                          std::span<const ParamIndex> find,
                                          std::span<const ParamIndex> given = {});

/// Execute the path numerically. Returns per-param bindings (given plus
/// derived); a parameter already bound is never overwritten. Throws EvalError
/// tagged with the rule and output ids on division by zero, non-finite
/// intermediates, or unbound inputs.
std::vector<std::optional<double>> evaluate_path(
    const MivarNet& net, const SolutionPath& path,
    std::span<const std::pair<ParamIndex, double>> given);

struct Solution {
    SolutionPath path;                           // pruned firing order
    std::vector<std::optional<double>> bindings; // per param index
    OpCounter stats;
};

/// run_inference -> prune_path -> evaluate_path.
std::variant<Solution, MissingData> solve(const MivarNet& net, const Query& query,
                                          const SolveOptions& options = {});

}  // namespace mivar
