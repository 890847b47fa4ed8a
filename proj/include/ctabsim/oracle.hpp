#pragma once

#include <limits>

#include "ctabsim/builder.hpp"
#include "ctabsim/executor.hpp"

namespace ctab {

/// Brute-force reference evaluator: nested-loop joins, row-at-a-time
/// filtering, direct group-by over uncompressed rows. Shares nothing with the
/// planner/executor code paths.
class Oracle {
  public:
    Oracle(const std::map<std::string, Table>& baseTables,
           const std::vector<ProjectionDef>& sourceDefs)
        : base_(baseTables), defs_(sourceDefs) {}

    QueryResult evaluate(const Query& q) {
        const Table& src = sourceRows(q.source);

        std::vector<int> filterIdx;
        for (const auto& f : q.filters) filterIdx.push_back(src.requireColumn(f.column));

        std::vector<const Row*> matching;
        for (const Row& r : src.rows) {
            bool pass = true;
            for (size_t i = 0; i < q.filters.size(); ++i)
                pass = pass && q.filters[i].pred.matches(r[filterIdx[i]]);
            if (pass) matching.push_back(&r);
        }

        QueryResult out;
        for (const auto& s : q.selects) {
            if (!s.isAgg) out.columns.push_back(s.column);
            else if (s.fn == AggFn::CountStar) out.columns.push_back("count");
            else out.columns.push_back(std::string(aggFnName(s.fn)) + "(" + s.column + ")");
        }

        if (!q.isAggregate()) {
            std::vector<int> sel;
            for (const auto& s : q.selects) sel.push_back(src.requireColumn(s.column));
            for (const Row* r : matching) {
                Row pr;
                for (int i : sel) pr.push_back((*r)[i]);
                out.rows.push_back(std::move(pr));
            }
            return out;
        }

        std::vector<int> groupIdx;
        for (const auto& g : q.groupBy) groupIdx.push_back(src.requireColumn(g));
        std::vector<int> keyOrder(groupIdx.size());
        for (size_t i = 0; i < keyOrder.size(); ++i) keyOrder[i] = static_cast<int>(i);

        struct Acc {
            int64_t count = 0;
            std::vector<__int128> sums;
            std::vector<__int128> counts;
            std::vector<Value> extrema;
            std::vector<ValueTag> tags;
            bool fresh = true;
        };
        std::map<Row, Acc, detail::RowLess> groups{detail::RowLess{&keyOrder}};

        std::vector<int> argIdx;
        for (const auto& s : q.selects)
            argIdx.push_back(s.isAgg && !s.column.empty() ? src.requireColumn(s.column) : -1);

        for (const Row* rp : matching) {
            const Row& r = *rp;
            Row key;
            for (int g : groupIdx) key.push_back(r[g]);
            Acc& a = groups[std::move(key)];
            if (a.fresh) {
                a.sums.assign(q.selects.size(), 0);
                a.counts.assign(q.selects.size(), 0);
                a.extrema.assign(q.selects.size(), Value{});
                a.tags.assign(q.selects.size(), ValueTag::Int);
                a.fresh = false;
            }
            a.count++;
            for (size_t i = 0; i < q.selects.size(); ++i) {
                const auto& s = q.selects[i];
                if (!s.isAgg || s.fn == AggFn::CountStar) continue;
                const Value& v = r[argIdx[i]];
                switch (s.fn) {
                    case AggFn::Sum:
                    case AggFn::Avg:
                        a.sums[i] += v.num;
                        a.counts[i] += 1;
                        a.tags[i] = v.tag == ValueTag::Money ? ValueTag::Money : ValueTag::Int;
                        break;
                    case AggFn::Max:
                        if (a.counts[i] == 0 || valueLt(a.extrema[i], v)) a.extrema[i] = v;
                        a.counts[i] += 1;
                        break;
                    case AggFn::Min:
                        if (a.counts[i] == 0 || valueLt(v, a.extrema[i])) a.extrema[i] = v;
                        a.counts[i] += 1;
                        break;
                    default: break;
                }
            }
        }

        const auto i64max = static_cast<__int128>(std::numeric_limits<int64_t>::max());
        const auto i64min = static_cast<__int128>(std::numeric_limits<int64_t>::min());
        for (const auto& [key, a] : groups) {
            Row row;
            for (size_t i = 0; i < q.selects.size(); ++i) {
                const auto& s = q.selects[i];
                if (!s.isAgg) {
                    int kpos = -1;
                    for (size_t g = 0; g < q.groupBy.size(); ++g)
                        if (q.groupBy[g] == s.column) kpos = static_cast<int>(g);
                    row.push_back(key[kpos]);
                    continue;
                }
                switch (s.fn) {
                    case AggFn::CountStar: row.push_back(Value::Int(a.count)); break;
                    case AggFn::Sum: {
                        if (a.sums[i] > i64max || a.sums[i] < i64min)
                            throw ExecError("oracle SUM overflow");
                        row.push_back(Value{a.tags[i], static_cast<int64_t>(a.sums[i]), nullptr});
                        break;
                    }
                    case AggFn::Max:
                    case AggFn::Min: row.push_back(a.extrema[i]); break;
                    case AggFn::Avg: {
                        __int128 qv = a.sums[i] / a.counts[i];  // truncates toward zero
                        if (qv > i64max || qv < i64min) throw ExecError("oracle AVG overflow");
                        row.push_back(Value{a.tags[i], static_cast<int64_t>(qv), nullptr});
                        break;
                    }
                }
            }
            out.rows.push_back(std::move(row));
        }
        return out;
    }

  private:
    const std::map<std::string, Table>& base_;
    const std::vector<ProjectionDef>& defs_;
    std::map<std::string, Table> joined_;  // per-source nested-loop join cache

    /// Nested-loop join for non-base sources; early exit on the unique key.
    const Table& sourceRows(const std::string& source) {
        auto bt = base_.find(source);
        if (bt != base_.end()) return bt->second;
        auto cached = joined_.find(source);
        if (cached != joined_.end()) return cached->second;

        const ProjectionDef* def = nullptr;
        for (const auto& d : defs_)
            if (d.sourceKey() == source) def = &d;
        if (!def) throw SchemaError("oracle: unknown source " + source);

        const Table& anchor = base_.at(def->anchor);
        Table t = anchor;
        t.name = source;
        for (const auto& step : def->joins) {
            const Table& right = base_.at(step.table);
            const int rk = right.requireColumn(step.rightKey);
            const int lk = t.requireColumn(step.leftKey);
            Table nt(t.name, [&] {
                auto cols = t.columns;
                cols.insert(cols.end(), right.columns.begin(), right.columns.end());
                return cols;
            }());
            nt.dicts = t.dicts;
            nt.dicts.insert(nt.dicts.end(), right.dicts.begin(), right.dicts.end());
            for (const Row& lr : t.rows) {
                for (const Row& rr : right.rows) {
                    if (compareValues(lr[lk], rr[rk]) == 0) {
                        Row joined = lr;
                        joined.insert(joined.end(), rr.begin(), rr.end());
                        nt.rows.push_back(std::move(joined));
                        break;  // FK -> unique PK
                    }
                }
            }
            t = std::move(nt);
        }
        return joined_.emplace(source, std::move(t)).first->second;
    }
};

/// One-shot convenience wrapper over the reference evaluator.
inline QueryResult oracleEvaluate(const Query& q, const std::map<std::string, Table>& baseTables,
                                  const std::vector<ProjectionDef>& sourceDefs) {
    Oracle o(baseTables, sourceDefs);
    return o.evaluate(q);
}

}  // namespace ctab
