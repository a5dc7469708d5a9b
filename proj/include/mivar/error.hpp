#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mivar {

/// Classification of every failure the library reports. The CLI maps these
/// onto its documented exit codes.
enum class errc {
    // net construction / validation
    duplicate_id,
    unknown_param_ref,
    self_loop,
    empty_io,
    invalid_id,
    missing_expression,
    expr_var_not_declared,
    non_finite_value,
    // queries
    unknown_id,
    query_overlap,
    // engine
    not_fireable,
    invalid_path,
    trace_too_large,
    // expression parsing / evaluation
    parse_error,
    unbound_variable,
    division_by_zero,
    non_finite_result,
    // knowledge-base I/O
    xml_error,
    schema_error,
    // benchmarking
    bad_gen_spec,
    insufficient_data,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    errc code() const { return code_; }

private:
    errc code_;
};

/// Expression syntax error. `offset` is the byte position in the source text.
class ParseError : public Error {
public:
    ParseError(std::size_t offset, const std::string& expected, const std::string& message)
        : Error(errc::parse_error, message), offset_(offset), expected_(expected) {}

    std::size_t offset() const { return offset_; }
    const std::string& expected() const { return expected_; }

private:
    std::size_t offset_;
    std::string expected_;
};

/// Numeric failure while executing a solution path, tagged with the rule and
/// output parameter it happened in. The symbolic path stays valid.
class EvalError : public Error {
public:
    EvalError(errc cause, std::string rule_id, std::string param_id, const std::string& message)
        : Error(cause, message), rule_id_(std::move(rule_id)), param_id_(std::move(param_id)) {}

    const std::string& rule_id() const { return rule_id_; }
    const std::string& param_id() const { return param_id_; }

private:
    std::string rule_id_;
    std::string param_id_;
};

}  // namespace mivar
