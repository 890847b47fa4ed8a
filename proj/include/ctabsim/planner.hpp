#pragma once

#include <algorithm>

#include "ctabsim/plan.hpp"

namespace ctab {

struct PlannerOptions {
    uint64_t streamGroupThreshold = 10000;  // estimated groups above this -> sort + stream
};

namespace detail {

/// Fraction of positions covered by the runs of `ct` qualifying under pred.
inline double coveredFraction(const CTable& ct, const ValuePred& pred) {
    if (ct.N == 0) return 0.0;
    uint64_t covered = 0;
    for (const Run& r : ct.seekV(pred)) covered += r.c;
    return static_cast<double>(covered) / static_cast<double>(ct.N);
}

inline uint64_t qualifyingTupleCount(const CTable& ct, const ValuePred& pred) {
    return ct.seekV(pred).size();
}

/// Estimated distinct-group count from run statistics.
inline uint64_t estimateGroups(const EncodedProjection& ep, const std::vector<std::string>& keys) {
    if (keys.empty()) return 1;
    uint64_t groups = 1;
    for (const auto& k : keys) {
        const CTable* ct = ep.findCTable(k);
        uint64_t distinct = ct ? ct->tupleCount() : ep.N;
        if (groups > ep.N / std::max<uint64_t>(distinct, 1)) return ep.N;
        groups *= std::max<uint64_t>(distinct, 1);
    }
    return std::min<uint64_t>(groups, ep.N);
}

inline AggItem plainAggItem(const SelectItem& s) {
    return AggItem{s.fn, s.column, "", false};
}

inline std::vector<AggItem> plainAggItems(const Query& q) {
    std::vector<AggItem> out;
    for (const auto& s : q.selects)
        if (s.isAgg) out.push_back(plainAggItem(s));
    return out;
}

}  // namespace detail

/// Row baseline: scan the raw (possibly pre-joined) table, filter, hash-aggregate.
inline Plan planRow(const Query& q, const Catalog& catalog) {
    const Table& raw = catalog.rawTableFor(q.source);

    auto scan = std::make_unique<PlanNode>();
    scan->op = PlanOp::RowScan;
    scan->table = q.source;
    scan->filters = q.filters;
    scan->estimatedBytes = static_cast<uint64_t>(raw.rowCount()) *
                           static_cast<uint64_t>(raw.rowWidth() + kRowStoreOverheadBytes);

    Plan p;
    p.mode = "row";
    if (q.isAggregate()) {
        auto agg = std::make_unique<PlanNode>();
        agg->op = PlanOp::Aggregate;
        agg->aggMode = AggMode::Hash;
        agg->keys = q.groupBy;
        agg->aggs = detail::plainAggItems(q);
        agg->outputs = q.selects;
        agg->children.push_back(std::move(scan));
        p.root = std::move(agg);
    } else {
        auto proj = std::make_unique<PlanNode>();
        proj->op = PlanOp::FetchColumns;
        for (const auto& s : q.selects) proj->outCols.push_back(s.column);
        proj->children.push_back(std::move(scan));
        p.root = std::move(proj);
    }
    return p;
}

/// View matching: groups contained, filters on group columns, every aggregate
/// derivable by roll-up. First matching view in declaration order wins.
inline std::optional<Plan> matchView(const Query& q, const Catalog& catalog) {
    if (!q.isAggregate()) return std::nullopt;
    for (const auto& view : catalog.views) {
        if (view.sourceKey != q.source) continue;

        auto inGroup = [&](const std::string& c) {
            for (const auto& g : view.def.group)
                if (g == c) return true;
            return false;
        };
        bool ok = true;
        for (const auto& g : q.groupBy) ok &= inGroup(g);
        for (const auto& f : q.filters) ok &= inGroup(f.column);
        if (!ok) continue;

        auto viewAggColumn = [&](AggFn fn, const std::string& col) -> std::string {
            for (const auto& a : view.def.aggs) {
                if (a.fn == fn && (fn == AggFn::CountStar || a.column == col))
                    return a.outputName();
            }
            return "";
        };

        std::vector<AggItem> items;
        for (const auto& s : q.selects) {
            if (!s.isAgg) continue;
            AggItem item;
            item.rollup = true;
            switch (s.fn) {
                case AggFn::CountStar:
                    item.fn = AggFn::Sum;
                    item.column = viewAggColumn(AggFn::CountStar, "");
                    break;
                case AggFn::Sum:
                    item.fn = AggFn::Sum;
                    item.column = viewAggColumn(AggFn::Sum, s.column);
                    break;
                case AggFn::Max:
                    item.fn = AggFn::Max;
                    item.column = viewAggColumn(AggFn::Max, s.column);
                    break;
                case AggFn::Min:
                    item.fn = AggFn::Min;
                    item.column = viewAggColumn(AggFn::Min, s.column);
                    break;
                case AggFn::Avg:
                    item.fn = AggFn::Avg;
                    item.column = viewAggColumn(AggFn::Sum, s.column);
                    item.auxColumn = viewAggColumn(AggFn::CountStar, "");
                    if (item.auxColumn.empty()) item.column = "";
                    break;
            }
            if (item.column.empty()) { ok = false; break; }
            items.push_back(std::move(item));
        }
        if (!ok) continue;

        auto read = std::make_unique<PlanNode>();
        read->op = PlanOp::MVRead;
        read->view = &view;
        read->table = q.source;
        read->filters = q.filters;
        read->estimatedBytes =
            static_cast<uint64_t>(view.data.rowCount()) *
            static_cast<uint64_t>(view.data.rowWidth() + kRowStoreOverheadBytes);

        auto agg = std::make_unique<PlanNode>();
        agg->op = PlanOp::Aggregate;
        agg->aggMode = AggMode::Hash;
        agg->keys = q.groupBy;
        agg->aggs = std::move(items);
        agg->outputs = q.selects;
        agg->children.push_back(std::move(read));

        Plan p;
        p.mode = "mv";
        p.root = std::move(agg);
        return p;
    }
    return std::nullopt;
}

/// Band-join chain over the projection's c-tables, shallow to deep, with the
/// count(*) -> SUM(c) family of aggregate translations.
inline Plan planCTable(const Query& q, const EncodedProjection& ep,
                       const PlannerOptions& opts = {}) {
    std::vector<std::string> refs = q.referencedColumns();
    // a bare COUNT(*) references nothing; count run lengths of the leading
    // column, which has the fewest stored tuples
    if (refs.empty() && !ep.sortOrder.empty()) refs.push_back(ep.sortOrder.front());
    for (const auto& c : refs)
        if (!ep.findCTable(c))
            throw PlanError("column " + c + " not in projection " + ep.name);
    std::sort(refs.begin(), refs.end(), [&](const std::string& a, const std::string& b) {
        return ep.depthOf(a) < ep.depthOf(b);
    });

    auto filtersOn = [&](const std::string& col) {
        std::vector<Predicate> out;
        for (const auto& f : q.filters)
            if (f.column == col) out.push_back(f);
        return out;
    };

    double selFrac = 1.0;
    std::unique_ptr<PlanNode> chain;
    std::vector<std::string> carried;

    for (size_t i = 0; i < refs.size(); ++i) {
        const CTable& ct = ep.ctableFor(refs[i]);
        auto preds = filtersOn(refs[i]);
        auto node = std::make_unique<PlanNode>();
        node->ep = &ep;
        node->ctable = &ct;
        if (i == 0) {
            node->op = PlanOp::CAccess;
            if (!preds.empty()) {
                node->path = AccessPath::SeekV;
                node->vFilter = preds.front();
                node->filters.assign(preds.begin() + 1, preds.end());
                node->estimatedBytes = detail::qualifyingTupleCount(ct, preds.front().pred) *
                                       static_cast<uint64_t>(ct.tupleWidth(ep.overheadBytes));
                selFrac = detail::coveredFraction(ct, preds.front().pred);
            } else {
                node->path = AccessPath::ScanF;
                node->estimatedBytes = ct.sizeBytes(ep.overheadBytes);
            }
        } else {
            node->op = PlanOp::BandJoin;
            if (!preds.empty()) {
                node->vFilter = preds.front();
                node->filters.assign(preds.begin() + 1, preds.end());
            }
            node->estimatedBytes = static_cast<uint64_t>(
                selFrac * static_cast<double>(ct.sizeBytes(ep.overheadBytes)));
            node->children.push_back(std::move(chain));
        }
        carried.push_back(refs[i]);
        node->outCols = carried;
        chain = std::move(node);
    }

    Plan p;
    p.mode = "ctable";
    if (q.isAggregate()) {
        auto agg = std::make_unique<PlanNode>();
        agg->op = PlanOp::Aggregate;
        agg->compressedInput = true;
        agg->keys = q.groupBy;
        agg->aggs = detail::plainAggItems(q);
        agg->outputs = q.selects;
        uint64_t groups = detail::estimateGroups(ep, q.groupBy);
        if (groups > opts.streamGroupThreshold) {
            agg->aggMode = AggMode::Stream;
            auto sort = std::make_unique<PlanNode>();
            sort->op = PlanOp::Sort;
            sort->keys = q.groupBy;
            sort->outCols = chain->outCols;
            sort->compressedInput = true;
            sort->children.push_back(std::move(chain));
            chain = std::move(sort);
        }
        agg->children.push_back(std::move(chain));
        p.root = std::move(agg);
    } else {
        auto fetch = std::make_unique<PlanNode>();
        fetch->op = PlanOp::FetchColumns;
        fetch->compressedInput = true;
        for (const auto& s : q.selects) fetch->outCols.push_back(s.column);
        fetch->children.push_back(std::move(chain));
        p.root = std::move(fetch);
    }
    return p;
}

namespace detail {

inline PlanNode* chainLeaf(PlanNode* n) {
    while (!n->children.empty()) n = n->children.front().get();
    return n;
}

/// Is `col` consumed above the chain (group key, aggregate arg, or output)?
inline bool columnConsumed(const PlanNode* root, const std::string& col) {
    bool used = false;
    Plan::walk(root, [&](const PlanNode* n) {
        if (n->op == PlanOp::Aggregate) {
            for (const auto& k : n->keys) used |= (k == col);
            for (const auto& a : n->aggs) used |= (a.column == col);
        }
        if (n->op == PlanOp::FetchColumns)
            for (const auto& c : n->outCols) used |= (c == col);
    });
    return used;
}

}  // namespace detail

/// Replace a leading-column access that only restricts tuples by a single
/// (MIN(f), MAX(f+c-1)) range feeding the next band join.
inline Plan optimizeCollapseRange(Plan p, const EncodedProjection& ep) {
    PlanNode* leaf = detail::chainLeaf(p.root.get());
    if (leaf->op != PlanOp::CAccess || leaf->path != AccessPath::SeekV) return p;
    if (leaf->ctable->depth != 1 || !leaf->vFilter || !leaf->filters.empty()) return p;
    const std::string col = leaf->ctable->column;
    if (detail::columnConsumed(p.root.get(), col)) return p;

    // splice a RangeCollapse above the leaf and drop the column downstream
    PlanNode* parent = nullptr;
    PlanNode* n = p.root.get();
    while (!n->children.empty()) {
        parent = n;
        n = n->children.front().get();
    }
    auto collapse = std::make_unique<PlanNode>();
    collapse->op = PlanOp::RangeCollapse;
    if (parent) {
        collapse->children.push_back(std::move(parent->children.front()));
        parent->children.front() = std::move(collapse);
    } else {
        collapse->children.push_back(std::move(p.root));
        p.root = std::move(collapse);
    }
    Plan::walk(p.root.get(), [&](const PlanNode* cn) {
        auto* m = const_cast<PlanNode*>(cn);
        if (m->op == PlanOp::RangeCollapse || m->op == PlanOp::BandJoin ||
            m->op == PlanOp::Sort || m->op == PlanOp::CAccess)
            m->outCols.erase(std::remove(m->outCols.begin(), m->outCols.end(), col),
                             m->outCols.end());
    });
    return p;
}

/// Answer multi-predicate queries by seeking each filtered c-table on value,
/// intersecting the id-ranges, then fetching the remaining columns.
inline std::optional<Plan> optimizeIndexIntersect(const Query& q, const EncodedProjection& ep) {
    std::vector<std::string> filtered;
    for (const auto& f : q.filters) {
        const CTable* ct = ep.findCTable(f.column);
        if (!ct || ct->depth == 1) return std::nullopt;
        bool seen = false;
        for (const auto& c : filtered) seen |= (c == f.column);
        if (!seen) filtered.push_back(f.column);
    }
    if (filtered.size() < 2) return std::nullopt;
    for (const auto& c : q.referencedColumns())
        if (!ep.findCTable(c)) return std::nullopt;

    auto intersect = std::make_unique<PlanNode>();
    intersect->op = PlanOp::RangeIntersect;
    intersect->ep = &ep;
    for (const auto& col : filtered) {
        auto child = std::make_unique<PlanNode>();
        child->op = PlanOp::CAccess;
        child->ep = &ep;
        child->ctable = &ep.ctableFor(col);
        child->path = AccessPath::SeekV;
        std::vector<Predicate> preds;
        for (const auto& f : q.filters)
            if (f.column == col) preds.push_back(f);
        child->vFilter = preds.front();
        child->filters.assign(preds.begin() + 1, preds.end());
        child->outCols = {col};
        child->estimatedBytes =
            detail::qualifyingTupleCount(*child->ctable, preds.front().pred) *
            static_cast<uint64_t>(child->ctable->tupleWidth(ep.overheadBytes));
        intersect->children.push_back(std::move(child));
    }

    // columns needed downstream (plain selects, group keys, aggregate args)
    std::vector<std::string> needed;
    auto add = [&](const std::string& c) {
        if (c.empty()) return;
        for (const auto& x : needed)
            if (x == c) return;
        needed.push_back(c);
    };
    for (const auto& s : q.selects) add(s.column);
    for (const auto& g : q.groupBy) add(g);

    double minFrac = 1.0;
    for (const auto& child : intersect->children) {
        double f = detail::coveredFraction(*child->ctable, child->vFilter->pred);
        minFrac = std::min(minFrac, f);
    }

    auto fetch = std::make_unique<PlanNode>();
    fetch->op = PlanOp::FetchColumns;
    fetch->ep = &ep;
    fetch->outCols = needed;
    fetch->filters = q.filters;  // equality literals short-circuit lookups
    uint64_t fetchBytes = 0;
    for (const auto& c : needed) {
        const CTable& ct = ep.ctableFor(c);
        fetchBytes += static_cast<uint64_t>(minFrac * static_cast<double>(ep.N)) *
                      static_cast<uint64_t>(ct.tupleWidth(ep.overheadBytes));
    }
    fetch->estimatedBytes = fetchBytes;
    fetch->children.push_back(std::move(intersect));

    Plan p;
    p.mode = "ctable-intersect";
    if (q.isAggregate()) {
        auto agg = std::make_unique<PlanNode>();
        agg->op = PlanOp::Aggregate;
        agg->aggMode = AggMode::Hash;
        agg->keys = q.groupBy;
        agg->aggs = detail::plainAggItems(q);
        agg->outputs = q.selects;
        agg->children.push_back(std::move(fetch));
        p.root = std::move(agg);
    } else {
        // fetch projects exactly the select order for non-aggregate queries
        p.root = std::move(fetch);
        p.root->outCols.clear();
        for (const auto& s : q.selects) p.root->outCols.push_back(s.column);
    }
    return p;
}

/// BandJoin depth invariant: inner deeper than everything in its outer subtree.
inline void checkPlanInvariants(const Plan& p) {
    Plan::walk(p.root.get(), [&](const PlanNode* n) {
        if (n->op != PlanOp::BandJoin) return;
        int innerDepth = n->ctable->depth;
        Plan::walk(n->children.front().get(), [&](const PlanNode* c) {
            if (c->ctable && c->ctable->depth >= innerDepth)
                throw PlanError("band join inner depth must exceed outer depths");
        });
    });
}

enum class PlanMode { Row, Mv, CTable, Auto };

inline PlanMode planModeFromName(const std::string& s) {
    if (s == "row") return PlanMode::Row;
    if (s == "mv") return PlanMode::Mv;
    if (s == "ctable") return PlanMode::CTable;
    if (s == "auto") return PlanMode::Auto;
    throw PlanError("unknown mode: " + s);
}

/// Forced modes return that plan or fail; auto ranks candidates by estimated
/// stored bytes read and picks the cheapest.
inline Plan selectPlan(const Query& q, const Catalog& catalog, PlanMode mode,
                       const PlannerOptions& opts = {}) {
    auto ctablePlan = [&]() -> std::optional<Plan> {
        const EncodedProjection* ep = catalog.coveringProjection(q.source, q.referencedColumns());
        if (!ep) return std::nullopt;
        Plan chain = optimizeCollapseRange(planCTable(q, *ep, opts), *ep);
        checkPlanInvariants(chain);
        return chain;
    };

    switch (mode) {
        case PlanMode::Row: return planRow(q, catalog);
        case PlanMode::Mv: {
            auto p = matchView(q, catalog);
            if (!p) throw PlanError("no materialized view matches this query");
            return std::move(*p);
        }
        case PlanMode::CTable: {
            auto p = ctablePlan();
            if (!p) throw PlanError("no projection covers the referenced columns of " + q.source);
            return std::move(*p);
        }
        case PlanMode::Auto: break;
    }

    std::vector<Plan> candidates;
    if (auto mv = matchView(q, catalog)) candidates.push_back(std::move(*mv));
    if (auto ct = ctablePlan()) {
        const EncodedProjection* ep = catalog.coveringProjection(q.source, q.referencedColumns());
        if (auto ix = optimizeIndexIntersect(q, *ep)) {
            if (ix->totalEstimatedBytes() < ct->totalEstimatedBytes())
                candidates.push_back(std::move(*ix));
            else
                candidates.push_back(std::move(*ct));
        } else {
            candidates.push_back(std::move(*ct));
        }
    }
    candidates.push_back(planRow(q, catalog));

    size_t best = 0;
    for (size_t i = 1; i < candidates.size(); ++i)
        if (candidates[i].totalEstimatedBytes() < candidates[best].totalEstimatedBytes())
            best = i;
    return std::move(candidates[best]);
}

}  // namespace ctab
