#include "mivar/genbench.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>

#include "mivar/error.hpp"
#include "mivar/expr.hpp"

namespace mivar {
namespace {

std::string param_name(std::uint32_t i) { return "P" + std::to_string(i); }

Expr var(std::uint32_t i) { return Expr::variable(param_name(i)); }

using Kind = ExprNode::Kind;

void append_csv_double(std::string& out, double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    out.append(buf, end);
}

}  // namespace

std::uint64_t chain_rule_count(const GenSpec& spec) {
    if (spec.n_objects < 3)
        throw Error(errc::bad_gen_spec, "chain generation needs at least 3 objects");
    std::uint64_t triples = spec.n_objects - 2;
    return spec.include_inverses ? 3 * triples : triples;
}

MivarNet generate_chain(const GenSpec& spec) {
    const std::uint64_t m = chain_rule_count(spec);
    const std::uint32_t n = spec.n_objects;

    NetBuilder builder;
    builder.reserve(n, m);
    for (std::uint32_t i = 1; i <= n; ++i)
        builder.add_param(Parameter{param_name(i), "", std::nullopt});

    std::uint64_t next_rule = 1;
    auto add = [&](ParamIndex in1, ParamIndex in2, ParamIndex out, Expr expr) {
        Rule rule;
        rule.id = "R" + std::to_string(next_rule++);
        rule.inputs = {in1, in2};
        rule.outputs = {out};
        rule.expressions.push_back(std::move(expr));
        builder.add_rule_resolved(std::move(rule));
    };

    for (std::uint32_t i = 1; i + 2 <= n; ++i) {
        // Triple (a, b, c) = (P_i, P_{i+1}, P_{i+2}); indices are 0-based.
        const ParamIndex a = i - 1, b = i, c = i + 1;
        const std::uint32_t an = i, bn = i + 1, cn = i + 2;
        if (spec.bounded_values) {
            add(a, b, c, Expr::binary(Kind::divide, Expr::binary(Kind::add, var(an), var(bn)),
                                      Expr::number(2)));
            if (spec.include_inverses) {
                add(c, b, a, Expr::binary(Kind::sub,
                                          Expr::binary(Kind::mul, Expr::number(2), var(cn)),
                                          var(bn)));
                add(c, a, b, Expr::binary(Kind::sub,
                                          Expr::binary(Kind::mul, Expr::number(2), var(cn)),
                                          var(an)));
            }
        } else {
            add(a, b, c, Expr::binary(Kind::add, var(an), var(bn)));
            if (spec.include_inverses) {
                add(c, b, a, Expr::binary(Kind::sub, var(cn), var(bn)));
                add(c, a, b, Expr::binary(Kind::sub, var(cn), var(an)));
            }
        }
    }
    return std::move(builder).finish();
}

Query standard_query(const MivarNet& net) {
    if (net.n() < 3) throw Error(errc::bad_gen_spec, "standard query needs at least 3 objects");
    Query query;
    query.given = {{0, 10.0}, {1, 10.0}};
    query.find = {static_cast<ParamIndex>(net.n() - 1)};
    return query;
}

std::vector<BenchRecord> run_benchmark(std::span<const std::uint32_t> sizes, int repeats,
                                       const GenSpec& base) {
    if (repeats < 1) throw Error(errc::bad_gen_spec, "repeats must be at least 1");
    std::vector<BenchRecord> records;
    records.reserve(sizes.size());
    for (std::uint32_t size : sizes) {
        GenSpec spec = base;
        spec.n_objects = size;
        const MivarNet net = generate_chain(spec);
        const Query query = standard_query(net);

        BenchRecord record;
        record.n_objects = size;
        record.n_rules = net.m();

        for (int run = -1; run < repeats; ++run) {  // run -1 is an untimed warmup
            InferenceState state;
            const auto start = std::chrono::steady_clock::now();
            InferenceResult result = run_inference(net, query, {}, &state);
            auto* path = std::get_if<SolutionPath>(&result);
            if (!path) throw std::logic_error("generated chain net failed to solve");
            SolutionPath pruned = prune_path(net, *path, query);
            const auto stop = std::chrono::steady_clock::now();
            if (run < 0) continue;
            record.trial_ms.push_back(
                std::chrono::duration<double, std::milli>(stop - start).count());
            record.path_length = pruned.firing_order.size();
            record.stats = state.counters;
        }

        std::vector<double> sorted = record.trial_ms;
        std::sort(sorted.begin(), sorted.end());
        const std::size_t mid = sorted.size() / 2;
        record.solve_ms =
            sorted.size() % 2 ? sorted[mid] : (sorted[mid - 1] + sorted[mid]) / 2.0;
        records.push_back(std::move(record));
    }
    return records;
}

ScalingFit fit_scaling(std::span<const BenchRecord> records) {
    if (records.size() < 3)
        throw Error(errc::insufficient_data, "scaling fit needs at least 3 records");
    std::uint32_t n_min = records[0].n_objects, n_max = records[0].n_objects;
    for (const BenchRecord& r : records) {
        n_min = std::min(n_min, r.n_objects);
        n_max = std::max(n_max, r.n_objects);
    }
    if (static_cast<double>(n_max) < 100.0 * n_min)
        throw Error(errc::insufficient_data, "scaling fit needs sizes spanning 2 decades");

    std::vector<double> xs, ys;
    for (const BenchRecord& r : records) {
        xs.push_back(std::log10(static_cast<double>(r.n_objects)));
        ys.push_back(std::log10(std::max(r.solve_ms, 1e-6)));
    }
    const double k = static_cast<double>(xs.size());
    double x_mean = 0, y_mean = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        x_mean += xs[i];
        y_mean += ys[i];
    }
    x_mean /= k;
    y_mean /= k;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
        sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
    }
    ScalingFit fit;
    fit.slope = sxy / sxx;
    const double intercept = y_mean - fit.slope * x_mean;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double predicted = fit.slope * xs[i] + intercept;
        ss_res += (ys[i] - predicted) * (ys[i] - predicted);
        ss_tot += (ys[i] - y_mean) * (ys[i] - y_mean);
    }
    fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : (ss_res > 0 ? 0.0 : 1.0);
    return fit;
}

void write_bench_csv(std::ostream& out, std::span<const BenchRecord> records) {
    out << "n_objects,n_rules,run,solve_ms,path_len,counter_decrements\n";
    std::string line;
    for (const BenchRecord& record : records) {
        const std::string prefix =
            std::to_string(record.n_objects) + ',' + std::to_string(record.n_rules) + ',';
        const std::string suffix = ',' + std::to_string(record.path_length) + ',' +
                                   std::to_string(record.stats.counter_decrements) + '\n';
        for (std::size_t run = 0; run < record.trial_ms.size(); ++run) {
            line = prefix + std::to_string(run + 1) + ',';
            append_csv_double(line, record.trial_ms[run]);
            line += suffix;
            out << line;
        }
        line = prefix + "median,";
        append_csv_double(line, record.solve_ms);
        line += suffix;
        out << line;
    }
}

}  // namespace mivar
