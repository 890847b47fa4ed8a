#pragma once

#include <memory>
#include <sstream>

#include "ctabsim/pred.hpp"
#include "ctabsim/table.hpp"

namespace ctab {

enum class AggFn { CountStar, Sum, Max, Min, Avg };

inline const char* aggFnName(AggFn f) {
    switch (f) {
        case AggFn::CountStar: return "COUNT";
        case AggFn::Sum: return "SUM";
        case AggFn::Max: return "MAX";
        case AggFn::Min: return "MIN";
        case AggFn::Avg: return "AVG";
    }
    return "?";
}

struct Predicate {
    std::string column;
    ValuePred pred;
};

/// One SELECT-list entry: a plain group column or an aggregate.
struct SelectItem {
    bool isAgg = false;
    std::string column;        // plain column, or aggregate argument (empty for COUNT(*))
    AggFn fn = AggFn::CountStar;

    static SelectItem col(std::string c) { return {false, std::move(c), AggFn::CountStar}; }
    static SelectItem agg(AggFn f, std::string c = "") { return {true, std::move(c), f}; }
};

/// Conjunctive-filter group-by-aggregate query over a single logical source.
struct Query {
    std::string source;
    std::vector<Predicate> filters;
    std::vector<std::string> groupBy;
    std::vector<SelectItem> selects;
    std::shared_ptr<Dict> literalDict;  // owns Text literal strings

    bool isAggregate() const {
        for (const auto& s : selects)
            if (s.isAgg) return true;
        return !groupBy.empty();
    }

    /// Every column the query touches (filters, group keys, aggregate args).
    std::vector<std::string> referencedColumns() const {
        std::vector<std::string> out;
        auto add = [&](const std::string& c) {
            if (c.empty()) return;
            for (const auto& x : out)
                if (x == c) return;
            out.push_back(c);
        };
        for (const auto& f : filters) add(f.column);
        for (const auto& g : groupBy) add(g);
        for (const auto& s : selects) add(s.column);
        return out;
    }

    Value encodeTextLiteral(const std::string& s) {
        if (!literalDict) literalDict = std::make_shared<Dict>();
        for (uint32_t i = 0; i < literalDict->size(); ++i)
            if ((*literalDict)[i] == s) return Value::Text(i, literalDict.get());
        literalDict->push_back(s);
        return Value::Text(static_cast<uint32_t>(literalDict->size() - 1), literalDict.get());
    }

    /// Checks the AST invariants against a source schema.
    void validate(const std::vector<ColumnDef>& schema) const {
        auto find = [&](const std::string& c) -> const ColumnDef* {
            for (const auto& cd : schema)
                if (cd.name == c) return &cd;
            return nullptr;
        };
        for (const auto& g : groupBy)
            if (!find(g)) throw SchemaError("unknown group column: " + g);
        for (const auto& s : selects) {
            if (s.isAgg) {
                if (s.fn == AggFn::CountStar) continue;
                if (!find(s.column)) throw SchemaError("unknown aggregate column: " + s.column);
            } else {
                bool grouped = false;
                for (const auto& g : groupBy) grouped |= (g == s.column);
                if (isAggregate() && !grouped)
                    throw SchemaError("select column " + s.column + " not in GROUP BY");
                if (!find(s.column)) throw SchemaError("unknown select column: " + s.column);
            }
        }
        if (!isAggregate() && !groupBy.empty())
            throw SchemaError("GROUP BY without aggregates");
        for (const auto& f : filters) {
            const ColumnDef* cd = find(f.column);
            if (!cd) throw SchemaError("unknown filter column: " + f.column);
            if (f.pred.lo.tag != cd->type)
                throw SchemaError("filter literal tag mismatch on " + f.column);
            if (f.pred.op == CompareOp::Between) {
                if (!f.pred.hi) throw SchemaError("BETWEEN requires two literals");
                if (compareValues(f.pred.lo, *f.pred.hi) > 0)
                    throw SchemaError("BETWEEN bounds out of order on " + f.column);
            }
        }
    }
};

inline std::string printLiteral(const Value& v) {
    switch (v.tag) {
        case ValueTag::Int:
        case ValueTag::Money: return std::to_string(v.num);
        case ValueTag::Date: return "'" + formatDateDays(static_cast<int32_t>(v.num)) + "'";
        case ValueTag::Text: return "'" + v.text() + "'";
    }
    return "?";
}

inline std::string printPredicate(const Predicate& p) {
    if (p.pred.op == CompareOp::Between)
        return p.column + " BETWEEN " + printLiteral(p.pred.lo) + " AND " +
               printLiteral(*p.pred.hi);
    return p.column + " " + opText(p.pred.op) + " " + printLiteral(p.pred.lo);
}

/// Canonical text form; parseQuery(printQuery(q)) reproduces q.
inline std::string printQuery(const Query& q) {
    std::ostringstream out;
    out << "SELECT ";
    for (size_t i = 0; i < q.selects.size(); ++i) {
        const auto& s = q.selects[i];
        if (i) out << ", ";
        if (!s.isAgg) out << s.column;
        else if (s.fn == AggFn::CountStar) out << "COUNT(*)";
        else out << aggFnName(s.fn) << "(" << s.column << ")";
    }
    out << " FROM " << q.source;
    for (size_t i = 0; i < q.filters.size(); ++i)
        out << (i ? " AND " : " WHERE ") << printPredicate(q.filters[i]);
    for (size_t i = 0; i < q.groupBy.size(); ++i)
        out << (i ? ", " : " GROUP BY ") << q.groupBy[i];
    return out.str();
}

}  // namespace ctab
