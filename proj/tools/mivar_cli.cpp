// Command-line front end: validate | solve | generate | bench | export-dot.
//
// Exit codes: 0 success, 1 validation findings or internal error, 2 usage,
// 3 parse/schema error, 4 missing data, 5 evaluation error.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "CLI11.hpp"
#include "mivar/error.hpp"
#include "mivar/genbench.hpp"
#include "mivar/inference.hpp"
#include "mivar/kb_io.hpp"
#include "mivar/net.hpp"
#include "mivar/trace.hpp"

namespace {

using namespace mivar;

constexpr int kExitOk = 0;
constexpr int kExitFindings = 1;
constexpr int kExitUsage = 2;
constexpr int kExitParse = 3;
constexpr int kExitMissingData = 4;
constexpr int kExitEval = 5;

int exit_code_for(const Error& error) {
    switch (error.code()) {
        case errc::parse_error:
        case errc::xml_error:
        case errc::schema_error:
            return kExitParse;
        case errc::division_by_zero:
        case errc::non_finite_result:
        case errc::unbound_variable:
            return kExitEval;
        case errc::unknown_id:
        case errc::duplicate_id:
        case errc::query_overlap:
        case errc::non_finite_value:
        case errc::bad_gen_spec:
        case errc::trace_too_large:
        case errc::insufficient_data:
            return kExitUsage;
        default:
            return kExitFindings;
    }
}

std::string fmt_double(double v) {
    char buf[32];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, end);
}

std::vector<std::pair<std::string, double>> parse_given(const std::vector<std::string>& specs) {
    std::vector<std::pair<std::string, double>> given;
    for (const std::string& spec : specs) {
        const std::size_t eq = spec.find('=');
        if (eq == std::string::npos || eq == 0)
            throw Error(errc::unknown_id, "bad --given binding '" + spec + "', expected id=value");
        double value = 0;
        const char* begin = spec.data() + eq + 1;
        const char* end = spec.data() + spec.size();
        auto [p, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc() || p != end)
            throw Error(errc::non_finite_value,
                        "bad value in --given binding '" + spec + "'");
        given.emplace_back(spec.substr(0, eq), value);
    }
    return given;
}

TieBreakPolicy parse_policy(const std::string& name) {
    if (name == "fifo") return TieBreakPolicy::fifo;
    if (name == "lifo") return TieBreakPolicy::lifo;
    throw Error(errc::bad_gen_spec, "unknown policy '" + name + "'");
}

NetFileFormat resolve_format(const std::string& explicit_format, const std::string& path) {
    if (explicit_format == "xml") return NetFileFormat::xml;
    if (explicit_format == "tsv") return NetFileFormat::tsv;
    if (path.size() >= 4 && path.substr(path.size() - 4) == ".tsv") return NetFileFormat::tsv;
    return NetFileFormat::xml;
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::parse_error, "cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error(errc::parse_error, "write to '" + path + "' failed");
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& kb_path) {
    KbFile kb = read_net_file(kb_path);
    std::vector<Violation> violations = validate_net(kb.net);
    std::cout << "n=" << kb.net.n() << ", m=" << kb.net.m()
              << (violations.empty() ? ", OK" : "") << "\n";
    for (const Violation& v : violations)
        std::cout << "violation: " << violation_kind_name(v.kind) << " (" << v.entity
                  << "): " << v.detail << "\n";
    return violations.empty() ? kExitOk : kExitFindings;
}

struct SolveArgs {
    std::string kb_path;
    std::vector<std::string> given;
    std::vector<std::string> find;
    std::string policy = "fifo";
    bool backward = false;
    bool trace = false;
    std::string dot_path;
};

int cmd_solve(const SolveArgs& args) {
    KbFile kb = read_net_file(args.kb_path);
    const auto given = parse_given(args.given);
    const Query query = make_query(kb.net, given, args.find);
    const TieBreakPolicy policy = parse_policy(args.policy);

    if (args.trace) {
        TraceOptions trace_options;
        trace_options.policy = policy;
        const Trace trace = trace_matrix(kb.net, query, trace_options);
        std::cout << render_trace(trace) << "\n";
    }

    SolveOptions options;
    options.policy = policy;
    options.restrict_to_relevant = args.backward;
    auto outcome = solve(kb.net, query, options);

    if (const auto* missing = std::get_if<MissingData>(&outcome)) {
        std::cout << "unreached:";
        for (ParamIndex p : missing->unreached_targets) std::cout << ' ' << kb.net.params[p].id;
        std::cout << "\n";
        if (!missing->frontier.empty()) {
            std::cout << "blocked:";
            for (RuleIndex r : missing->frontier) std::cout << ' ' << kb.net.rules[r].id;
            std::cout << "\n";
        }
        return kExitMissingData;
    }

    const Solution& solution = std::get<Solution>(outcome);
    std::cout << "path:";
    for (RuleIndex r : solution.path.firing_order) std::cout << ' ' << kb.net.rules[r].id;
    std::cout << "\n";
    for (ParamIndex p : query.find)
        std::cout << kb.net.params[p].id << " = " << fmt_double(*solution.bindings[p]) << "\n";
    std::cout << "stats: known_marks=" << solution.stats.known_marks
              << " rule_marks=" << solution.stats.rule_marks
              << " counter_decrements=" << solution.stats.counter_decrements << "\n";

    if (!args.dot_path.empty())
        write_text_file(args.dot_path, export_dot(kb.net, solution.path, query));
    return kExitOk;
}

struct ExportDotArgs {
    std::string kb_path;
    std::vector<std::string> given;
    std::vector<std::string> find;
    std::string out_path;
};

int cmd_export_dot(const ExportDotArgs& args) {
    KbFile kb = read_net_file(args.kb_path);
    const auto given = parse_given(args.given);
    const Query query = make_query(kb.net, given, args.find);
    auto outcome = solve(kb.net, query, {});
    if (const auto* missing = std::get_if<MissingData>(&outcome)) {
        std::cerr << "unreached:";
        for (ParamIndex p : missing->unreached_targets) std::cerr << ' ' << kb.net.params[p].id;
        std::cerr << "\n";
        return kExitMissingData;
    }
    const std::string dot = export_dot(kb.net, std::get<Solution>(outcome).path, query);
    if (args.out_path.empty()) {
        std::cout << dot;
    } else {
        write_text_file(args.out_path, dot);
        std::cout << "wrote: " << args.out_path << "\n";
    }
    return kExitOk;
}

struct GenerateArgs {
    std::uint32_t n_objects = 0;
    std::string out_path;
    std::string format;  // "", "xml", or "tsv"
    bool no_inverses = false;
    bool bounded_values = false;
};

int cmd_generate(const GenerateArgs& args) {
    GenSpec spec;
    spec.n_objects = args.n_objects;
    spec.include_inverses = !args.no_inverses;
    spec.bounded_values = args.bounded_values;
    const MivarNet net = generate_chain(spec);
    std::cout << "objects: " << net.n() << "\nrules: " << net.m() << "\n";
    if (!args.out_path.empty()) {
        write_net_file(args.out_path, net, derive_metadata(net),
                       resolve_format(args.format, args.out_path));
        std::cout << "wrote: " << args.out_path << "\n";
    }
    return kExitOk;
}

struct BenchArgs {
    std::vector<std::string> sizes;
    int repeats = 5;
    std::string out_csv;
    bool selftest = false;
    bool bounded_values = false;
};

std::vector<std::uint32_t> parse_sizes(const std::vector<std::string>& specs) {
    std::vector<std::uint32_t> sizes;
    for (const std::string& spec : specs) {
        double v = 0;
        auto [p, ec] = std::from_chars(spec.data(), spec.data() + spec.size(), v);
        if (ec != std::errc() || p != spec.data() + spec.size() || v < 3 || v > 4e9)
            throw Error(errc::bad_gen_spec, "bad size '" + spec + "'");
        sizes.push_back(static_cast<std::uint32_t>(v + 0.5));
    }
    return sizes;
}

std::vector<BenchRecord> selftest_records() {
    // Canned perfectly linear timings: slope 1, r2 1 by construction.
    std::vector<BenchRecord> records;
    for (std::uint32_t n : {1'000u, 10'000u, 100'000u}) {
        BenchRecord r;
        r.n_objects = n;
        r.n_rules = 3ull * (n - 2);
        r.solve_ms = n / 1000.0;
        r.trial_ms = {r.solve_ms};
        r.path_length = n - 2;
        records.push_back(r);
    }
    return records;
}

int cmd_bench(const BenchArgs& args) {
    std::vector<BenchRecord> records;
    if (args.selftest) {
        records = selftest_records();
    } else {
        if (args.sizes.empty())
            throw Error(errc::bad_gen_spec, "--sizes is required unless --selftest is given");
        GenSpec base;
        base.bounded_values = args.bounded_values;
        records = run_benchmark(parse_sizes(args.sizes), args.repeats, base);
    }

    if (args.out_csv.empty()) {
        write_bench_csv(std::cout, records);
    } else {
        std::ofstream out(args.out_csv, std::ios::binary);
        if (!out) throw Error(errc::parse_error, "cannot open '" + args.out_csv + "' for writing");
        write_bench_csv(out, records);
    }

    try {
        const ScalingFit fit = fit_scaling(records);
        std::cout << "slope: " << fmt_double(fit.slope) << "\nr2: " << fmt_double(fit.r2) << "\n";
    } catch (const Error& e) {
        if (e.code() != errc::insufficient_data) throw;
        std::cout << "slope: insufficient data\n";
    }
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIVAR bipartite net inference engine"};
    app.require_subcommand(1);

    std::string validate_path;
    CLI::App* validate = app.add_subcommand("validate", "Load a net file and check invariants");
    validate->add_option("kb", validate_path, "net file (xml or tsv)")->required();

    SolveArgs solve_args;
    CLI::App* solve = app.add_subcommand("solve", "Find and evaluate a derivation path");
    solve->add_option("kb", solve_args.kb_path, "net file (xml or tsv)")->required();
    solve->add_option("--given", solve_args.given, "known bindings id=value")
        ->required()
        ->delimiter(',');
    solve->add_option("--find", solve_args.find, "required parameter ids")
        ->required()
        ->delimiter(',');
    solve->add_option("--policy", solve_args.policy, "tie-break policy: fifo or lifo")
        ->check(CLI::IsMember({"fifo", "lifo"}));
    solve->add_flag("--backward", solve_args.backward,
                    "restrict the forward wave to backward-relevant rules");
    solve->add_flag("--trace", solve_args.trace, "print matrix snapshots (small nets)");
    solve->add_option("--dot", solve_args.dot_path, "write the solution graph to this DOT file");

    GenerateArgs gen_args;
    CLI::App* generate = app.add_subcommand("generate", "Generate a synthetic chain net");
    generate->add_option("n", gen_args.n_objects, "number of objects (>= 3)")->required();
    generate->add_option("-o,--output", gen_args.out_path, "output net file");
    generate->add_option("--format", gen_args.format, "output format")
        ->check(CLI::IsMember({"xml", "tsv"}));
    generate->add_flag("--no-inverses", gen_args.no_inverses, "emit only the additive rules");
    generate->add_flag("--bounded-values", gen_args.bounded_values,
                       "averaging rules that keep values finite at any scale");

    BenchArgs bench_args;
    CLI::App* bench = app.add_subcommand("bench", "Time solves over generated chain nets");
    bench->add_option("--sizes", bench_args.sizes, "object counts, e.g. 1e4,1e5,1e6")
        ->delimiter(',');
    bench->add_option("--repeats", bench_args.repeats, "trials per size")
        ->check(CLI::PositiveNumber);
    bench->add_option("-o,--output", bench_args.out_csv, "write trial CSV to this file");
    bench->add_flag("--selftest", bench_args.selftest, "replay canned linear timings");
    bench->add_flag("--bounded-values", bench_args.bounded_values,
                    "generate with the bounded-value rules");

    ExportDotArgs dot_args;
    CLI::App* export_dot_cmd = app.add_subcommand("export-dot", "Solve and export the DOT graph");
    export_dot_cmd->add_option("kb", dot_args.kb_path, "net file (xml or tsv)")->required();
    export_dot_cmd->add_option("--given", dot_args.given, "known bindings id=value")
        ->required()
        ->delimiter(',');
    export_dot_cmd->add_option("--find", dot_args.find, "required parameter ids")
        ->required()
        ->delimiter(',');
    export_dot_cmd->add_option("-o,--output", dot_args.out_path,
                               "output DOT file (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (app.got_subcommand(validate)) return cmd_validate(validate_path);
        if (app.got_subcommand(solve)) return cmd_solve(solve_args);
        if (app.got_subcommand(generate)) return cmd_generate(gen_args);
        if (app.got_subcommand(bench)) return cmd_bench(bench_args);
        if (app.got_subcommand(export_dot_cmd)) return cmd_export_dot(dot_args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return kExitFindings;
    }
    return kExitUsage;
}
