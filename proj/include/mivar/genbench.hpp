#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mivar/inference.hpp"
#include "mivar/net.hpp"

namespace mivar {

/// Recipe for a synthetic chain net over objects P1..Pn: each consecutive
/// triple (a, b, c) = (P_i, P_{i+1}, P_{i+2}) contributes the rule c = a + b
/// and, with inverses on, also a = c - b and b = c - a, giving 3(n-2) rules.
/// With P1 = P2 = 10 the values grow like a Fibonacci sequence and overflow
/// doubles near n = 1480; bounded_values switches the triple to
/// c = (a + b)/2 (inverses 2c - b, 2c - a), which stays finite at any n.
struct GenSpec {
    std::uint32_t n_objects = 3;     // >= 3
    bool include_inverses = true;
    bool bounded_values = false;
    std::uint64_t seed = 0;          // reserved for randomized variants
};

std::uint64_t chain_rule_count(const GenSpec& spec);

/// Deterministic: equal specs produce identical nets (ids, order,
/// expressions). Throws Error(bad_gen_spec) when n_objects < 3.
MivarNet generate_chain(const GenSpec& spec);

/// The standard benchmark query: given P1 = 10, P2 = 10; find the last
/// object. The net must have at least 3 params with the chain naming.
Query standard_query(const MivarNet& net);

struct BenchRecord {
    std::uint32_t n_objects = 0;
    std::uint64_t n_rules = 0;
    double solve_ms = 0;             // median over trials
    std::vector<double> trial_ms;
    std::uint64_t path_length = 0;
    OpCounter stats;                 // from the last trial
};

/// For each size: generate once, then time run_inference + prune_path
/// `repeats` times (single-threaded, FIFO, early exit); generation and
/// evaluation are outside the clock. A failed solve on a generated net is a
/// logic error and throws.
std::vector<BenchRecord> run_benchmark(std::span<const std::uint32_t> sizes, int repeats,
                                       const GenSpec& base = {});

struct ScalingFit {
    double slope = 0;
    double r2 = 0;
};

/// Least-squares fit of log10(solve_ms) vs log10(n_objects). Requires at
/// least 3 records spanning at least 2 decades of n_objects; throws
/// Error(insufficient_data) otherwise.
ScalingFit fit_scaling(std::span<const BenchRecord> records);

/// Header `n_objects,n_rules,run,solve_ms,path_len,counter_decrements`;
/// one row per trial (run = 1-based index) plus a `median` row per size.
void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records);

}  // namespace mivar
