#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mivar/inference.hpp"
#include "mivar/net.hpp"

namespace mivar {

/// Marks of the working matrix: x/y net structure, z/w/z(w) service-row
/// value marks, 1/2 service-column rule marks.
enum class CellMark : std::uint8_t {
    empty,
    input,      // x: rule consumes the variable
    output,     // y: rule produces the variable
    known,      // z
    required,   // w
    satisfied,  // z written over a w
    ready,      // 1: rule can fire
    launched,   // 2: rule has fired
};

/// One (m+1) x (n+1) snapshot: rule rows 0..m-1, the service value row m,
/// variable columns 0..n-1, the service rule column n.
struct MatrixView {
    std::uint32_t rows = 0;
    std::uint32_t cols = 0;
    std::vector<CellMark> cells;

    CellMark at(std::uint32_t row, std::uint32_t col) const { return cells[row * cols + col]; }
    CellMark& at(std::uint32_t row, std::uint32_t col) { return cells[row * cols + col]; }
};

/// Step-by-step record of the literal matrix algorithm. Snapshot 0 is the
/// net structure plus the initial known/required marks; later snapshots add
/// only service-row/-column marks.
struct Trace {
    std::vector<MatrixView> snapshots;
    std::vector<RuleIndex> fired_rules;
    bool success = false;
};

struct TraceOptions {
    TieBreakPolicy policy = TieBreakPolicy::fifo;
    std::uint64_t max_cells = 1'000'000;  // guard on m*n
};

/// Run the matrix form of the inference loop: rescan rule rows top to bottom
/// each wave, mark newly fireable rules, fire one per wave by the policy.
/// Same fired set and success flag as run_inference under the same policy.
/// Throws Error(trace_too_large) when m*n exceeds options.max_cells.
Trace trace_matrix(const MivarNet& net, const Query& query, const TraceOptions& options = {});

/// Text form, one character per cell: . X Y Z W z (satisfied) 1 2.
/// Rows end with a space and the service-column character.
std::string render_view(const MatrixView& view);
std::string render_trace(const Trace& trace);

}  // namespace mivar
