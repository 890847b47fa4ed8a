#pragma once

#include <memory>

#include "ctabsim/catalog.hpp"
#include "ctabsim/query.hpp"

namespace ctab {

enum class PlanOp {
    RowScan,
    MVRead,
    CAccess,
    RangeCollapse,
    BandJoin,
    RangeIntersect,
    FetchColumns,
    Aggregate,
    Sort
};

enum class AccessPath { ScanF, SeekV, SeekFRange };

inline const char* planOpName(PlanOp op) {
    switch (op) {
        case PlanOp::RowScan: return "RowScan";
        case PlanOp::MVRead: return "MVRead";
        case PlanOp::CAccess: return "CAccess";
        case PlanOp::RangeCollapse: return "RangeCollapse";
        case PlanOp::BandJoin: return "BandJoin";
        case PlanOp::RangeIntersect: return "RangeIntersect";
        case PlanOp::FetchColumns: return "FetchColumns";
        case PlanOp::Aggregate: return "Aggregate";
        case PlanOp::Sort: return "Sort";
    }
    return "?";
}

enum class AggMode { Hash, Stream };

/// One output aggregate, already translated for its input shape.
/// Rollup aggregates read pre-aggregated view columns (auxColumn carries the
/// group count for AVG); compressed aggregates weight by run multiplicity.
struct AggItem {
    AggFn fn = AggFn::CountStar;
    std::string column;      // argument column ("" for plain COUNT(*))
    std::string auxColumn;   // rollup AVG: count column
    bool rollup = false;     // COUNT already summed into `column`
};

struct PlanNode {
    PlanOp op = PlanOp::RowScan;
    std::vector<std::unique_ptr<PlanNode>> children;

    // RowScan / MVRead
    std::string table;                    // logical source key
    std::vector<Predicate> filters;       // scan filters or MV residual filters
    const MVTable* view = nullptr;

    // CAccess / BandJoin inner side
    const EncodedProjection* ep = nullptr;
    const CTable* ctable = nullptr;
    AccessPath path = AccessPath::ScanF;
    std::optional<Predicate> vFilter;

    // Columns carried by the tuples this node emits (compressed chain) or,
    // for FetchColumns, the projected output columns.
    std::vector<std::string> outCols;

    // Aggregate / Sort
    AggMode aggMode = AggMode::Hash;
    std::vector<std::string> keys;
    std::vector<AggItem> aggs;
    std::vector<SelectItem> outputs;      // final select layout
    bool compressedInput = false;

    uint64_t estimatedBytes = 0;          // stored bytes this node is expected to read
};

struct Plan {
    std::unique_ptr<PlanNode> root;
    std::string mode;  // row | mv | ctable | ctable-intersect

    uint64_t totalEstimatedBytes() const {
        uint64_t total = 0;
        walk(root.get(), [&](const PlanNode* n) { total += n->estimatedBytes; });
        return total;
    }

    template <class F>
    static void walk(const PlanNode* n, F&& f) {
        if (!n) return;
        f(n);
        for (const auto& c : n->children) walk(c.get(), f);
    }
};

namespace detail {

inline void explainNode(const PlanNode* n, int indent, std::ostream& out) {
    out << std::string(static_cast<size_t>(indent) * 2, ' ') << planOpName(n->op);
    switch (n->op) {
        case PlanOp::RowScan:
            out << " " << n->table;
            for (const auto& f : n->filters) out << " [" << printPredicate(f) << "]";
            break;
        case PlanOp::MVRead:
            out << " " << n->view->def.name;
            for (const auto& f : n->filters) out << " [" << printPredicate(f) << "]";
            break;
        case PlanOp::CAccess:
            out << " " << n->ep->name << "." << n->ctable->column << "@" << n->ctable->depth
                << " path=" << (n->path == AccessPath::ScanF ? "scanF" : "seekV");
            if (n->vFilter) out << " [" << printPredicate(*n->vFilter) << "]";
            break;
        case PlanOp::RangeCollapse:
            out << " -> single (xMin, xMax) = (MIN(f), MAX(f+c-1)) over qualifying runs";
            break;
        case PlanOp::BandJoin:
            out << " inner=" << n->ep->name << "." << n->ctable->column << "@"
                << n->ctable->depth << " pred=[inner.f BETWEEN outer.f AND outer.f+outer.c-1]";
            if (n->vFilter) out << " [" << printPredicate(*n->vFilter) << "]";
            break;
        case PlanOp::RangeIntersect:
            out << " of " << n->children.size() << " id-range sets";
            break;
        case PlanOp::FetchColumns:
            out << " [";
            for (size_t i = 0; i < n->outCols.size(); ++i) out << (i ? "," : "") << n->outCols[i];
            out << "]";
            break;
        case PlanOp::Aggregate: {
            out << "(" << (n->aggMode == AggMode::Hash ? "hash" : "stream") << ") keys=[";
            for (size_t i = 0; i < n->keys.size(); ++i) out << (i ? "," : "") << n->keys[i];
            out << "] aggs=[";
            for (size_t i = 0; i < n->aggs.size(); ++i) {
                const AggItem& a = n->aggs[i];
                if (i) out << ",";
                if (n->compressedInput) {
                    if (a.fn == AggFn::CountStar) out << "SUM(c)";
                    else if (a.fn == AggFn::Sum) out << "SUM(c*v(" << a.column << "))";
                    else out << aggFnName(a.fn) << "(v(" << a.column << "))";
                } else {
                    out << aggFnName(a.fn) << "(" << (a.column.empty() ? "*" : a.column) << ")";
                }
            }
            out << "]";
            break;
        }
        case PlanOp::Sort:
            out << " keys=[";
            for (size_t i = 0; i < n->keys.size(); ++i) out << (i ? "," : "") << n->keys[i];
            out << "]";
            break;
    }
    out << " est=" << n->estimatedBytes << "B\n";
    for (const auto& c : n->children) explainNode(c.get(), indent + 1, out);
}

}  // namespace detail

/// Stable indented text rendering of a plan tree.
inline std::string explainPlan(const Plan& p) {
    std::ostringstream out;
    out << "mode=" << p.mode << " est_total=" << p.totalEstimatedBytes() << "B\n";
    detail::explainNode(p.root.get(), 0, out);
    return out.str();
}

}  // namespace ctab
