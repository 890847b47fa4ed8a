#pragma once

#include <limits>

#include "ctabsim/planner.hpp"

namespace ctab {

struct CostNode {
    int id = 0;
    std::string op;
    uint64_t tuplesRead = 0;  // stored tuples touched by this node
    uint64_t tuplesOut = 0;
    uint64_t bytesRead = 0;   // stored bytes those touches were charged
};

struct CostReport {
    std::vector<CostNode> perNode;
    uint64_t tuplesRead = 0;
    uint64_t bytesRead = 0;
    uint64_t pages = 0;

    void finalize() {
        tuplesRead = bytesRead = 0;
        for (const auto& n : perNode) {
            tuplesRead += n.tuplesRead;
            bytesRead += n.bytesRead;
        }
        pages = pagesOf(bytesRead);
    }
};

struct QueryResult {
    std::vector<std::string> columns;
    std::vector<Row> rows;
};

/// Order-insensitive multiset equality over value tuples.
inline bool resultsEqual(const QueryResult& a, const QueryResult& b) {
    if (a.rows.size() != b.rows.size()) return false;
    if (!a.rows.empty() && a.rows[0].size() != b.rows[0].size()) return false;
    auto key = [](const Row& r) {
        std::string k;
        for (const auto& v : r) {
            k += v.toString();
            k += '\x1f';
        }
        return k;
    };
    std::vector<std::string> ka, kb;
    for (const auto& r : a.rows) ka.push_back(key(r));
    for (const auto& r : b.rows) kb.push_back(key(r));
    std::sort(ka.begin(), ka.end());
    std::sort(kb.begin(), kb.end());
    return ka == kb;
}

namespace detail {

struct PosTuple {
    uint32_t lo = 0, hi = 0;  // id range covered; multiplicity = hi-lo+1
    Row vals;                 // values of the chain columns joined so far
};

struct Dataset {
    bool compressed = false;
    std::vector<std::string> cols;  // names of row columns / chain columns
    std::vector<Row> rows;          // !compressed
    std::vector<PosTuple> ptuples;  // compressed

    size_t count() const { return compressed ? ptuples.size() : rows.size(); }

    int colIndex(const std::string& c) const {
        for (size_t i = 0; i < cols.size(); ++i)
            if (cols[i] == c) return static_cast<int>(i);
        throw ExecError("executor: missing column " + c);
    }
};

struct AggAccum {
    int64_t count = 0;
    __int128 sum = 0;
    __int128 avgCount = 0;
    Value extremum;
    ValueTag sumTag = ValueTag::Int;
    bool hasExtremum = false;
    bool hasSum = false;
};

inline int64_t narrow128(__int128 v, const char* what) {
    if (v > std::numeric_limits<int64_t>::max() || v < std::numeric_limits<int64_t>::min())
        throw ExecError(std::string("arithmetic overflow in ") + what);
    return static_cast<int64_t>(v);
}

inline bool rowPasses(const Row& r, const std::vector<Predicate>& preds,
                      const std::vector<int>& idx) {
    for (size_t i = 0; i < preds.size(); ++i)
        if (!preds[i].pred.matches(r[idx[i]])) return false;
    return true;
}

}  // namespace detail

/// Pull-based plan evaluation with per-operator tuple/byte accounting.
class Executor {
  public:
    explicit Executor(const Catalog& catalog) : catalog_(catalog) {}

    std::pair<QueryResult, CostReport> run(const Plan& plan) {
        cost_ = CostReport{};
        nextId_ = 0;
        detail::Dataset out = eval(plan.root.get());
        QueryResult result;
        result.columns = out.cols;
        if (out.compressed) throw ExecError("plan root must produce rows");
        result.rows = std::move(out.rows);
        cost_.finalize();
        return {std::move(result), std::move(cost_)};
    }

  private:
    const Catalog& catalog_;
    CostReport cost_;
    int nextId_ = 0;

    CostNode* node(const PlanNode* n) {
        cost_.perNode.push_back(CostNode{});
        auto& c = cost_.perNode.back();
        c.id = nextId_++;
        c.op = planOpName(n->op);
        return &c;
    }

    detail::Dataset eval(const PlanNode* n) {
        switch (n->op) {
            case PlanOp::RowScan: return evalRowScan(n);
            case PlanOp::MVRead: return evalMVRead(n);
            case PlanOp::CAccess: return evalCAccess(n);
            case PlanOp::RangeCollapse: return evalCollapse(n);
            case PlanOp::BandJoin: return evalBandJoin(n);
            case PlanOp::RangeIntersect: return evalIntersect(n);
            case PlanOp::FetchColumns: return evalFetch(n);
            case PlanOp::Sort: return evalSort(n);
            case PlanOp::Aggregate: return evalAggregate(n);
        }
        throw ExecError("unknown plan node");
    }

    detail::Dataset evalRowScan(const PlanNode* n) {
        auto* c = node(n);
        const Table& t = catalog_.rawTableFor(n->table);
        detail::Dataset out;
        for (const auto& cd : t.columns) out.cols.push_back(cd.name);
        std::vector<int> idx;
        for (const auto& f : n->filters) idx.push_back(t.requireColumn(f.column));
        const uint64_t width = static_cast<uint64_t>(t.rowWidth() + kRowStoreOverheadBytes);
        for (const Row& r : t.rows) {
            c->tuplesRead++;
            c->bytesRead += width;
            if (detail::rowPasses(r, n->filters, idx)) out.rows.push_back(r);
        }
        c->tuplesOut = out.rows.size();
        return out;
    }

    detail::Dataset evalMVRead(const PlanNode* n) {
        auto* c = node(n);
        const Table& t = n->view->data;
        detail::Dataset out;
        for (const auto& cd : t.columns) out.cols.push_back(cd.name);
        std::vector<int> idx;
        for (const auto& f : n->filters) idx.push_back(t.requireColumn(f.column));
        const uint64_t width = static_cast<uint64_t>(t.rowWidth() + kRowStoreOverheadBytes);
        for (const Row& r : t.rows) {
            c->tuplesRead++;
            c->bytesRead += width;
            if (detail::rowPasses(r, n->filters, idx)) out.rows.push_back(r);
        }
        c->tuplesOut = out.rows.size();
        return out;
    }

    detail::Dataset evalCAccess(const PlanNode* n) {
        auto* c = node(n);
        const CTable& ct = *n->ctable;
        const uint64_t width = static_cast<uint64_t>(ct.tupleWidth(n->ep->overheadBytes));
        detail::Dataset out;
        out.compressed = true;
        out.cols = {ct.column};
        auto emit = [&](const Run& r) {
            if (!n->filters.empty())
                for (const auto& f : n->filters)
                    if (!f.pred.matches(r.v)) return;
            out.ptuples.push_back(detail::PosTuple{r.f, r.last(), {r.v}});
        };
        if (n->path == AccessPath::SeekV) {
            for (const Run& r : ct.seekV(n->vFilter->pred)) {
                c->tuplesRead++;
                c->bytesRead += width;
                emit(r);
            }
        } else {
            for (size_t i = 0; i < ct.tupleCount(); ++i) {
                c->tuplesRead++;
                c->bytesRead += width;
                emit(ct.runAt(i));
            }
        }
        c->tuplesOut = out.ptuples.size();
        return out;
    }

    detail::Dataset evalCollapse(const PlanNode* n) {
        detail::Dataset in = eval(n->children.front().get());
        auto* c = node(n);
        detail::Dataset out;
        out.compressed = true;
        if (!in.ptuples.empty()) {
            uint32_t lo = in.ptuples.front().lo, hi = in.ptuples.front().hi;
            for (const auto& pt : in.ptuples) {
                lo = std::min(lo, pt.lo);
                hi = std::max(hi, pt.hi);
            }
            out.ptuples.push_back(detail::PosTuple{lo, hi, {}});
        }
        c->tuplesOut = out.ptuples.size();
        return out;
    }

    detail::Dataset evalBandJoin(const PlanNode* n) {
        detail::Dataset in = eval(n->children.front().get());
        auto* c = node(n);
        const CTable& ct = *n->ctable;
        const uint64_t width = static_cast<uint64_t>(ct.tupleWidth(n->ep->overheadBytes));
        detail::Dataset out;
        out.compressed = true;
        out.cols = in.cols;
        out.cols.push_back(ct.column);
        for (const auto& pt : in.ptuples) {
            // one f-range seek on the inner per outer tuple
            for (const Run& r : ct.seekFRange(pt.lo, pt.hi)) {
                c->tuplesRead++;
                c->bytesRead += width;
                if (n->vFilter && !n->vFilter->pred.matches(r.v)) continue;
                bool pass = true;
                for (const auto& f : n->filters) pass &= f.pred.matches(r.v);
                if (!pass) continue;
                detail::PosTuple t;
                t.lo = r.f;
                t.hi = r.last();
                t.vals = pt.vals;
                t.vals.push_back(r.v);
                out.ptuples.push_back(std::move(t));
            }
        }
        c->tuplesOut = out.ptuples.size();
        return out;
    }

    detail::Dataset evalIntersect(const PlanNode* n) {
        std::vector<std::vector<detail::PosTuple>> sets;
        for (const auto& ch : n->children) {
            detail::Dataset d = eval(ch.get());
            std::sort(d.ptuples.begin(), d.ptuples.end(),
                      [](const detail::PosTuple& a, const detail::PosTuple& b) {
                          return a.lo < b.lo;
                      });
            sets.push_back(std::move(d.ptuples));
        }
        auto* c = node(n);
        std::vector<detail::PosTuple> acc = std::move(sets.front());
        for (size_t s = 1; s < sets.size(); ++s) {
            const auto& other = sets[s];
            std::vector<detail::PosTuple> merged;
            size_t i = 0, j = 0;
            while (i < acc.size() && j < other.size()) {
                uint32_t lo = std::max(acc[i].lo, other[j].lo);
                uint32_t hi = std::min(acc[i].hi, other[j].hi);
                if (lo <= hi) merged.push_back(detail::PosTuple{lo, hi, {}});
                if (acc[i].hi < other[j].hi) ++i;
                else ++j;
            }
            acc = std::move(merged);
        }
        detail::Dataset out;
        out.compressed = true;
        out.ptuples = std::move(acc);
        c->tuplesOut = out.ptuples.size();
        return out;
    }

    detail::Dataset evalFetch(const PlanNode* n) {
        detail::Dataset in = eval(n->children.front().get());
        auto* c = node(n);
        detail::Dataset out;
        out.cols = n->outCols;

        if (!in.compressed) {
            // plain projection of row input
            std::vector<int> idx;
            for (const auto& col : n->outCols) idx.push_back(in.colIndex(col));
            for (const Row& r : in.rows) {
                Row pr;
                pr.reserve(idx.size());
                for (int i : idx) pr.push_back(r[i]);
                out.rows.push_back(std::move(pr));
            }
        } else if (!n->ep) {
            // chain expansion: every output column is carried by the tuples
            std::vector<int> idx;
            for (const auto& col : n->outCols) idx.push_back(in.colIndex(col));
            for (const auto& pt : in.ptuples) {
                Row pr;
                pr.reserve(idx.size());
                for (int i : idx) pr.push_back(pt.vals[i]);
                for (uint32_t k = pt.lo; k <= pt.hi; ++k) out.rows.push_back(pr);
            }
        } else {
            // id-range input: fetch each column by position, except values an
            // equality predicate already pins
            std::vector<const Value*> pinned(n->outCols.size(), nullptr);
            std::vector<const CTable*> cts(n->outCols.size(), nullptr);
            for (size_t i = 0; i < n->outCols.size(); ++i) {
                for (const auto& f : n->filters)
                    if (f.column == n->outCols[i] && f.pred.op == CompareOp::Eq)
                        pinned[i] = &f.pred.lo;
                if (!pinned[i]) cts[i] = &n->ep->ctableFor(n->outCols[i]);
            }
            for (const auto& pt : in.ptuples) {
                for (uint32_t id = pt.lo; id <= pt.hi; ++id) {
                    Row pr;
                    pr.reserve(n->outCols.size());
                    for (size_t i = 0; i < n->outCols.size(); ++i) {
                        if (pinned[i]) {
                            pr.push_back(*pinned[i]);
                        } else {
                            c->tuplesRead++;
                            c->bytesRead +=
                                static_cast<uint64_t>(cts[i]->tupleWidth(n->ep->overheadBytes));
                            pr.push_back(cts[i]->lookupValueAt(id));
                        }
                    }
                    out.rows.push_back(std::move(pr));
                }
            }
        }
        c->tuplesOut = out.rows.size();
        return out;
    }

    detail::Dataset evalSort(const PlanNode* n) {
        detail::Dataset in = eval(n->children.front().get());
        auto* c = node(n);
        std::vector<int> idx;
        for (const auto& k : n->keys) idx.push_back(in.colIndex(k));
        if (in.compressed) {
            std::stable_sort(in.ptuples.begin(), in.ptuples.end(),
                             [&](const detail::PosTuple& a, const detail::PosTuple& b) {
                                 for (int i : idx) {
                                     int cmp = compareValues(a.vals[i], b.vals[i]);
                                     if (cmp) return cmp < 0;
                                 }
                                 return false;
                             });
        } else {
            sortRows(in.rows, idx);
        }
        c->tuplesOut = in.count();
        return in;
    }

    detail::Dataset evalAggregate(const PlanNode* n) {
        detail::Dataset in = eval(n->children.front().get());
        auto* c = node(n);

        std::vector<int> keyIdx;
        for (const auto& k : n->keys) keyIdx.push_back(in.colIndex(k));

        // resolve aggregate argument columns
        std::vector<int> argIdx(n->aggs.size(), -1), auxIdx(n->aggs.size(), -1);
        for (size_t i = 0; i < n->aggs.size(); ++i) {
            if (!n->aggs[i].column.empty()) argIdx[i] = in.colIndex(n->aggs[i].column);
            if (!n->aggs[i].auxColumn.empty()) auxIdx[i] = in.colIndex(n->aggs[i].auxColumn);
        }

        std::vector<int> keyOrder(keyIdx.size());
        for (size_t i = 0; i < keyOrder.size(); ++i) keyOrder[i] = static_cast<int>(i);

        std::vector<std::pair<Row, std::vector<detail::AggAccum>>> groups;
        std::map<Row, size_t, ctab::detail::RowLess> lookup{ctab::detail::RowLess{&keyOrder}};

        auto accumulate = [&](const Row& key, const Row& vals, uint64_t mult) {
            size_t slot;
            if (n->aggMode == AggMode::Hash) {
                auto it = lookup.find(key);
                if (it == lookup.end()) {
                    slot = groups.size();
                    groups.emplace_back(key, std::vector<detail::AggAccum>(n->aggs.size()));
                    lookup.emplace(key, slot);
                } else {
                    slot = it->second;
                }
            } else {
                // stream mode: input must arrive sorted by the grouping keys
                auto cmpLast = [&]() {
                    return keyOrder.empty() ? Ordering::Equal
                                            : compareRows(groups.back().first, key, keyOrder);
                };
                if (groups.empty() || cmpLast() != Ordering::Equal) {
                    if (!groups.empty() && cmpLast() == Ordering::Greater)
                        throw ExecError("stream aggregate received unsorted input");
                    groups.emplace_back(key, std::vector<detail::AggAccum>(n->aggs.size()));
                }
                slot = groups.size() - 1;
            }
            auto& accs = groups[slot].second;
            for (size_t i = 0; i < n->aggs.size(); ++i) {
                const AggItem& a = n->aggs[i];
                detail::AggAccum& acc = accs[i];
                const Value* v = argIdx[i] >= 0 ? &vals[argIdx[i]] : nullptr;
                switch (a.fn) {
                    case AggFn::CountStar:
                        acc.count += static_cast<int64_t>(mult);
                        break;
                    case AggFn::Sum:
                        acc.sum += static_cast<__int128>(v->num) * static_cast<__int128>(mult);
                        acc.sumTag = v->tag == ValueTag::Money ? ValueTag::Money : ValueTag::Int;
                        acc.hasSum = true;
                        break;
                    case AggFn::Max:
                        if (!acc.hasExtremum || valueLt(acc.extremum, *v)) acc.extremum = *v;
                        acc.hasExtremum = true;
                        break;
                    case AggFn::Min:
                        if (!acc.hasExtremum || valueLt(*v, acc.extremum)) acc.extremum = *v;
                        acc.hasExtremum = true;
                        break;
                    case AggFn::Avg:
                        acc.sum += static_cast<__int128>(v->num) * static_cast<__int128>(mult);
                        acc.sumTag = v->tag == ValueTag::Money ? ValueTag::Money : ValueTag::Int;
                        acc.avgCount += a.rollup && auxIdx[i] >= 0
                                            ? static_cast<__int128>(vals[auxIdx[i]].num)
                                            : static_cast<__int128>(mult);
                        break;
                }
            }
        };

        if (in.compressed) {
            for (const auto& pt : in.ptuples) {
                Row key;
                key.reserve(keyIdx.size());
                for (int i : keyIdx) key.push_back(pt.vals[i]);
                accumulate(key, pt.vals, static_cast<uint64_t>(pt.hi - pt.lo + 1));
            }
        } else {
            for (const Row& r : in.rows) {
                Row key;
                key.reserve(keyIdx.size());
                for (int i : keyIdx) key.push_back(r[i]);
                uint64_t mult = 1;
                // rollup counts: pre-aggregated rows carry their group size
                for (size_t i = 0; i < n->aggs.size(); ++i)
                    if (n->aggs[i].rollup && n->aggs[i].fn == AggFn::CountStar)
                        mult = static_cast<uint64_t>(r[argIdx[i]].num);
                accumulate(key, r, mult);
            }
        }

        detail::Dataset out;
        size_t aggSlot = 0;
        std::vector<int> layoutKey;  // per output: key position or ~agg position
        for (const auto& s : n->outputs) {
            if (s.isAgg) {
                std::string nm = s.fn == AggFn::CountStar
                                     ? "count"
                                     : std::string(aggFnName(s.fn)) + "(" + s.column + ")";
                out.cols.push_back(nm);
                layoutKey.push_back(~static_cast<int>(aggSlot++));
            } else {
                int kpos = -1;
                for (size_t i = 0; i < n->keys.size(); ++i)
                    if (n->keys[i] == s.column) kpos = static_cast<int>(i);
                if (kpos < 0) throw ExecError("output column not a group key: " + s.column);
                out.cols.push_back(s.column);
                layoutKey.push_back(kpos);
            }
        }

        for (const auto& [key, accs] : groups) {
            Row row;
            row.reserve(layoutKey.size());
            size_t slot = 0;
            for (int lk : layoutKey) {
                if (lk >= 0) {
                    row.push_back(key[lk]);
                    continue;
                }
                size_t ai = static_cast<size_t>(~lk);
                const AggItem& a = n->aggs[ai];
                const detail::AggAccum& acc = accs[ai];
                (void)slot;
                switch (a.fn) {
                    case AggFn::CountStar:
                        row.push_back(Value::Int(acc.count));
                        break;
                    case AggFn::Sum:
                        row.push_back(Value{acc.sumTag, detail::narrow128(acc.sum, "SUM"),
                                            nullptr});
                        break;
                    case AggFn::Max:
                    case AggFn::Min:
                        row.push_back(acc.extremum);
                        break;
                    case AggFn::Avg: {
                        if (acc.avgCount == 0) throw ExecError("AVG over empty group");
                        __int128 qv = acc.sum / acc.avgCount;  // truncates toward zero
                        row.push_back(Value{acc.sumTag, detail::narrow128(qv, "AVG"), nullptr});
                        break;
                    }
                }
            }
            out.rows.push_back(std::move(row));
        }
        // hash groups come back in key order via the lookup map for determinism
        if (n->aggMode == AggMode::Hash && !n->keys.empty()) {
            std::vector<Row> ordered;
            ordered.reserve(out.rows.size());
            for (const auto& [key, slot] : lookup) ordered.push_back(std::move(out.rows[slot]));
            out.rows = std::move(ordered);
        }
        c->tuplesOut = out.rows.size();
        return out;
    }
};

inline std::pair<QueryResult, CostReport> execute(const Plan& plan, const Catalog& catalog) {
    return Executor(catalog).run(plan);
}

}  // namespace ctab
