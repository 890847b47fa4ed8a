#pragma once

#include <map>

#include "ctabsim/projection.hpp"
#include "ctabsim/query.hpp"

#include <nlohmann/json.hpp>

namespace ctab {

struct JoinStep {
    std::string table;     // key-side table joined in
    std::string leftKey;   // column in the accumulated left side (foreign key)
    std::string rightKey;  // unique key column in `table`
};

struct ProjectionDef {
    std::string name;
    std::string anchor;
    std::vector<JoinStep> joins;
    std::vector<std::string> columns;  // output columns
    std::vector<std::string> sort;     // declared sort prefix

    /// Canonical name of the logical (joined) source this projection embodies.
    std::string sourceKey() const {
        std::string key = anchor;
        for (const auto& j : joins) key += "_" + j.table;
        return key;
    }
};

struct AggSpec {
    AggFn fn = AggFn::CountStar;
    std::string column;  // empty for COUNT(*)

    /// Column name the aggregate materializes to in the view table.
    std::string outputName() const {
        switch (fn) {
            case AggFn::CountStar: return "cnt";
            case AggFn::Sum: return "sum_" + column;
            case AggFn::Max: return "max_" + column;
            case AggFn::Min: return "min_" + column;
            case AggFn::Avg: break;
        }
        throw SchemaError("AVG cannot be materialized directly; store SUM and COUNT");
    }
};

struct MVDef {
    std::string name;
    std::string source;  // a ProjectionDef name
    std::vector<std::string> group;
    std::vector<AggSpec> aggs;
};

struct MVTable {
    MVDef def;
    std::string sourceKey;
    Table data;  // one row per group, sorted by group columns
};

namespace detail {

struct RowLess {
    const std::vector<int>* order;
    bool operator()(const Row& a, const Row& b) const {
        if (order->empty()) return false;  // global group: all keys equal
        return compareRows(a, b, *order) == Ordering::Less;
    }
};

struct ValueLess {
    bool operator()(const Value& a, const Value& b) const { return valueLt(a, b); }
};

}  // namespace detail

/// Execute the FK->PK join chain of a definition, producing the flat joined
/// table (anchor columns first, then each joined table's columns).
inline Table joinChain(const std::string& anchor, const std::vector<JoinStep>& joins,
                       const std::map<std::string, Table>& baseTables,
                       const std::string& resultName) {
    auto baseIt = baseTables.find(anchor);
    if (baseIt == baseTables.end()) throw SchemaError("unknown anchor table: " + anchor);
    const Table& anchorT = baseIt->second;

    std::vector<ColumnDef> cols = anchorT.columns;
    std::vector<std::shared_ptr<Dict>> dicts = anchorT.dicts;
    std::vector<Row> rows = anchorT.rows;

    for (const auto& step : joins) {
        auto it = baseTables.find(step.table);
        if (it == baseTables.end()) throw SchemaError("unknown join table: " + step.table);
        const Table& right = it->second;
        const int rightKey = right.requireColumn(step.rightKey);

        int leftKey = -1;
        for (size_t i = 0; i < cols.size(); ++i)
            if (cols[i].name == step.leftKey) leftKey = static_cast<int>(i);
        if (leftKey < 0) throw SchemaError("unknown join key: " + step.leftKey);

        std::map<Value, size_t, detail::ValueLess> keyed;
        for (size_t r = 0; r < right.rows.size(); ++r) {
            if (!keyed.emplace(right.rows[r][rightKey], r).second)
                throw ReferentialError("duplicate key " + right.rows[r][rightKey].toString() +
                                       " in " + step.table + "." + step.rightKey);
        }

        for (const auto& cd : right.columns)
            for (const auto& existing : cols)
                if (existing.name == cd.name)
                    throw SchemaError("ambiguous column name across join: " + cd.name);
        cols.insert(cols.end(), right.columns.begin(), right.columns.end());
        dicts.insert(dicts.end(), right.dicts.begin(), right.dicts.end());

        for (Row& row : rows) {
            auto m = keyed.find(row[leftKey]);
            if (m == keyed.end())
                throw ReferentialError("dangling key " + row[leftKey].toString() + " into " +
                                       step.table + "." + step.rightKey);
            const Row& rr = right.rows[m->second];
            row.insert(row.end(), rr.begin(), rr.end());
        }
    }

    Table out;
    out.name = resultName;
    out.columns = std::move(cols);
    out.dicts = std::move(dicts);
    out.rows = std::move(rows);
    return out;
}

/// Join, project, complete the declared sort to a full order, sort, encode.
inline EncodedProjection buildProjection(const ProjectionDef& def,
                                         const std::map<std::string, Table>& baseTables,
                                         int overheadBytes = 0) {
    Table joined = joinChain(def.anchor, def.joins, baseTables, def.name);

    Table t(def.name, [&] {
        std::vector<ColumnDef> cols;
        for (const auto& c : def.columns) cols.push_back(joined.columns[joined.requireColumn(c)]);
        return cols;
    }());
    for (size_t i = 0; i < def.columns.size(); ++i)
        t.dicts[i] = joined.dicts[joined.requireColumn(def.columns[i])];
    std::vector<int> proj;
    for (const auto& c : def.columns) proj.push_back(joined.requireColumn(c));
    t.rows.reserve(joined.rows.size());
    for (const Row& r : joined.rows) {
        Row pr;
        pr.reserve(proj.size());
        for (int p : proj) pr.push_back(r[p]);
        t.rows.push_back(std::move(pr));
    }

    // declared prefix, then the remaining output columns in declaration order
    std::vector<std::string> fullSort = def.sort;
    for (const auto& c : def.columns) {
        bool present = false;
        for (const auto& s : fullSort) present |= (s == c);
        if (!present) fullSort.push_back(c);
    }
    for (const auto& s : def.sort) t.requireColumn(s);

    std::vector<int> orderIdx;
    for (const auto& c : fullSort) orderIdx.push_back(t.requireColumn(c));
    sortRows(t.rows, orderIdx);

    EncodedProjection ep = encodeProjection(t, fullSort, overheadBytes);
    ep.sourceKey = def.sourceKey();
    return ep;
}

/// Exact group-by aggregation of the view's source join.
inline MVTable buildMaterializedView(const MVDef& def, const std::vector<ProjectionDef>& projDefs,
                                     const std::map<std::string, Table>& baseTables) {
    const ProjectionDef* src = nullptr;
    for (const auto& pd : projDefs)
        if (pd.name == def.source) src = &pd;
    if (!src) throw SchemaError("view " + def.name + ": unknown source " + def.source);

    Table joined = joinChain(src->anchor, src->joins, baseTables, def.name);

    std::vector<int> groupIdx;
    for (const auto& g : def.group) groupIdx.push_back(joined.requireColumn(g));
    std::vector<int> aggIdx;
    for (const auto& a : def.aggs)
        aggIdx.push_back(a.fn == AggFn::CountStar ? -1 : joined.requireColumn(a.column));

    struct Accum {
        std::vector<__int128> sums;
        std::vector<Value> extrema;
        int64_t count = 0;
        bool fresh = true;
    };
    std::vector<int> keyOrder(groupIdx.size());
    for (size_t i = 0; i < groupIdx.size(); ++i) keyOrder[i] = static_cast<int>(i);
    std::map<Row, Accum, detail::RowLess> groups{detail::RowLess{&keyOrder}};

    for (const Row& r : joined.rows) {
        Row key;
        key.reserve(groupIdx.size());
        for (int g : groupIdx) key.push_back(r[g]);
        Accum& a = groups[std::move(key)];
        if (a.fresh) {
            a.sums.assign(def.aggs.size(), 0);
            a.extrema.assign(def.aggs.size(), Value{});
            a.fresh = false;
            a.count = 0;
            for (size_t i = 0; i < def.aggs.size(); ++i)
                if (def.aggs[i].fn == AggFn::Max || def.aggs[i].fn == AggFn::Min)
                    a.extrema[i] = r[aggIdx[i]];
        }
        a.count++;
        for (size_t i = 0; i < def.aggs.size(); ++i) {
            switch (def.aggs[i].fn) {
                case AggFn::CountStar: break;
                case AggFn::Sum: a.sums[i] += r[aggIdx[i]].num; break;
                case AggFn::Max:
                    if (valueLt(a.extrema[i], r[aggIdx[i]])) a.extrema[i] = r[aggIdx[i]];
                    break;
                case AggFn::Min:
                    if (valueLt(r[aggIdx[i]], a.extrema[i])) a.extrema[i] = r[aggIdx[i]];
                    break;
                case AggFn::Avg: throw SchemaError("AVG not materializable");
            }
        }
    }

    std::vector<ColumnDef> cols;
    for (size_t i = 0; i < def.group.size(); ++i)
        cols.push_back(joined.columns[groupIdx[i]]);
    for (size_t i = 0; i < def.aggs.size(); ++i) {
        const auto& a = def.aggs[i];
        ValueTag tag = a.fn == AggFn::CountStar ? ValueTag::Int : joined.columns[aggIdx[i]].type;
        cols.push_back(ColumnDef{a.outputName(), tag});
    }

    MVTable mv;
    mv.def = def;
    mv.sourceKey = src->sourceKey();
    mv.data = Table(def.name, cols);
    for (size_t i = 0; i < def.group.size(); ++i) mv.data.dicts[i] = joined.dicts[groupIdx[i]];

    const int64_t i64max = std::numeric_limits<int64_t>::max();
    for (const auto& [key, a] : groups) {
        Row row = key;
        for (size_t i = 0; i < def.aggs.size(); ++i) {
            switch (def.aggs[i].fn) {
                case AggFn::CountStar: row.push_back(Value::Int(a.count)); break;
                case AggFn::Sum: {
                    if (a.sums[i] > i64max || a.sums[i] < -__int128(i64max) - 1)
                        throw ExecError("SUM overflow in view " + def.name);
                    Value v = Value{cols[def.group.size() + i].type,
                                    static_cast<int64_t>(a.sums[i]), nullptr};
                    row.push_back(v);
                    break;
                }
                case AggFn::Max:
                case AggFn::Min: row.push_back(a.extrema[i]); break;
                case AggFn::Avg: break;
            }
        }
        mv.data.rows.push_back(std::move(row));
    }
    return mv;
}

// ---- declarative config --------------------------------------------------

struct BuildConfig {
    std::vector<ProjectionDef> projections;
    std::vector<MVDef> views;  // match order = declaration order
};

inline BuildConfig parseBuildConfig(const nlohmann::json& j) {
    BuildConfig cfg;
    for (const auto& p : j.value("projections", nlohmann::json::array())) {
        ProjectionDef d;
        d.name = p.at("name").get<std::string>();
        d.anchor = p.at("anchor").get<std::string>();
        for (const auto& jn : p.value("joins", nlohmann::json::array()))
            d.joins.push_back(JoinStep{jn.at("table").get<std::string>(),
                                       jn.at("leftKey").get<std::string>(),
                                       jn.at("rightKey").get<std::string>()});
        d.columns = p.at("columns").get<std::vector<std::string>>();
        d.sort = p.at("sort").get<std::vector<std::string>>();
        cfg.projections.push_back(std::move(d));
    }
    for (const auto& v : j.value("views", nlohmann::json::array())) {
        MVDef d;
        d.name = v.at("name").get<std::string>();
        d.source = v.at("source").get<std::string>();
        d.group = v.at("group").get<std::vector<std::string>>();
        for (const auto& a : v.at("aggs")) {
            std::string fn = a.at("fn").get<std::string>();
            AggSpec spec;
            if (fn == "COUNT") spec.fn = AggFn::CountStar;
            else if (fn == "SUM") spec.fn = AggFn::Sum;
            else if (fn == "MAX") spec.fn = AggFn::Max;
            else if (fn == "MIN") spec.fn = AggFn::Min;
            else throw SchemaError("unknown view aggregate: " + fn);
            spec.column = a.value("col", std::string());
            if (spec.fn != AggFn::CountStar && spec.column.empty())
                throw SchemaError("view aggregate " + fn + " needs a column");
            d.aggs.push_back(std::move(spec));
        }
        cfg.views.push_back(std::move(d));
    }
    return cfg;
}

/// The shipped physical design: projections D1/D2/D4 and the generalized
/// views answering each benchmark template family.
inline const char* defaultConfigJson() {
    return R"JSON({
  "projections": [
    { "name": "D1", "anchor": "lineitem", "joins": [],
      "columns": ["l_shipdate", "l_suppkey", "l_orderkey", "l_returnflag", "l_extendedprice"],
      "sort": ["l_shipdate", "l_suppkey"] },
    { "name": "D2", "anchor": "lineitem",
      "joins": [ { "table": "orders", "leftKey": "l_orderkey", "rightKey": "o_orderkey" } ],
      "columns": ["o_orderdate", "l_suppkey", "l_shipdate"],
      "sort": ["o_orderdate", "l_suppkey"] },
    { "name": "D4", "anchor": "lineitem",
      "joins": [ { "table": "orders", "leftKey": "l_orderkey", "rightKey": "o_orderkey" },
                 { "table": "customer", "leftKey": "o_custkey", "rightKey": "c_custkey" } ],
      "columns": ["l_returnflag", "c_nationkey", "l_extendedprice"],
      "sort": ["l_returnflag"] }
  ],
  "views": [
    { "name": "MV1", "source": "D1", "group": ["l_shipdate"],
      "aggs": [ { "fn": "COUNT" } ] },
    { "name": "MV2_3", "source": "D1", "group": ["l_shipdate", "l_suppkey"],
      "aggs": [ { "fn": "COUNT" } ] },
    { "name": "MV4", "source": "D2", "group": ["o_orderdate"],
      "aggs": [ { "fn": "MAX", "col": "l_shipdate" } ] },
    { "name": "MV5_6", "source": "D2", "group": ["o_orderdate", "l_suppkey"],
      "aggs": [ { "fn": "MAX", "col": "l_shipdate" } ] },
    { "name": "MV7", "source": "D4", "group": ["l_returnflag", "c_nationkey"],
      "aggs": [ { "fn": "SUM", "col": "l_extendedprice" } ] }
  ]
})JSON";
}

}  // namespace ctab
