#include "mivar/trace.hpp"

#include <cassert>

#include "mivar/error.hpp"

namespace mivar {
namespace {

bool value_known(CellMark mark) {
    return mark == CellMark::known || mark == CellMark::satisfied;
}

char mark_char(CellMark mark) {
    switch (mark) {
        case CellMark::empty: return '.';
        case CellMark::input: return 'X';
        case CellMark::output: return 'Y';
        case CellMark::known: return 'Z';
        case CellMark::required: return 'W';
        case CellMark::satisfied: return 'z';
        case CellMark::ready: return '1';
        case CellMark::launched: return '2';
    }
    return '?';
}

}  // namespace

Trace trace_matrix(const MivarNet& net, const Query& query, const TraceOptions& options) {
    const std::uint32_t m = net.m();
    const std::uint32_t n = net.n();
    if (static_cast<std::uint64_t>(m) * n > options.max_cells) {
        throw Error(errc::trace_too_large,
                    "matrix trace of " + std::to_string(m) + " rules x " + std::to_string(n) +
                        " objects exceeds the cell cap of " + std::to_string(options.max_cells));
    }

    MatrixView view;
    view.rows = m + 1;
    view.cols = n + 1;
    view.cells.assign(static_cast<std::size_t>(view.rows) * view.cols, CellMark::empty);

    for (RuleIndex r = 0; r < m; ++r) {
        for (ParamIndex p : net.rules[r].inputs) view.at(r, p) = CellMark::input;
        for (ParamIndex p : net.rules[r].outputs) view.at(r, p) = CellMark::output;
    }
    std::uint32_t required_remaining = 0;
    for (ParamIndex p : query.find) {
        view.at(m, p) = CellMark::required;
        ++required_remaining;
    }
    for (const auto& [p, value] : query.given) {
        (void)value;
        assert(view.at(m, p) != CellMark::required);
        view.at(m, p) = CellMark::known;
    }

    Trace trace;
    trace.snapshots.push_back(view);
    if (required_remaining == 0) {
        trace.success = true;
        return trace;
    }

    std::vector<RuleIndex> agenda;
    std::size_t head = 0;
    for (;;) {
        // Scan every rule row top to bottom and mark the newly fireable ones.
        bool marked_any = false;
        for (RuleIndex r = 0; r < m; ++r) {
            if (view.at(r, n) != CellMark::empty) continue;
            bool fireable = true;
            for (ParamIndex p : net.rules[r].inputs) {
                if (!value_known(view.at(m, p))) {
                    fireable = false;
                    break;
                }
            }
            if (!fireable) continue;
            view.at(r, n) = CellMark::ready;
            agenda.push_back(r);
            marked_any = true;
        }
        if (marked_any) trace.snapshots.push_back(view);

        if (head >= agenda.size()) break;  // nothing fireable: blocked
        RuleIndex r;
        if (options.policy == TieBreakPolicy::fifo) {
            r = agenda[head++];
        } else {
            r = agenda.back();
            agenda.pop_back();
        }

        view.at(r, n) = CellMark::launched;
        trace.fired_rules.push_back(r);
        for (ParamIndex p : net.rules[r].outputs) {
            CellMark& cell = view.at(m, p);
            if (cell == CellMark::required) {
                cell = CellMark::satisfied;
                --required_remaining;
            } else if (cell == CellMark::empty) {
                cell = CellMark::known;
            }
        }
        trace.snapshots.push_back(view);
        if (required_remaining == 0) {
            trace.success = true;
            break;
        }
    }
    return trace;
}

std::string render_view(const MatrixView& view) {
    std::string out;
    out.reserve(static_cast<std::size_t>(view.rows) * (view.cols + 2));
    for (std::uint32_t row = 0; row < view.rows; ++row) {
        for (std::uint32_t col = 0; col + 1 < view.cols; ++col) out += mark_char(view.at(row, col));
        out += ' ';
        out += mark_char(view.at(row, view.cols - 1));
        out += '\n';
    }
    return out;
}

std::string render_trace(const Trace& trace) {
    std::string out;
    for (std::size_t i = 0; i < trace.snapshots.size(); ++i) {
        out += "# step " + std::to_string(i) + "\n";
        out += render_view(trace.snapshots[i]);
        if (i + 1 < trace.snapshots.size()) out += '\n';
    }
    return out;
}

}  // namespace mivar
