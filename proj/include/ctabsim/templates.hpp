#pragma once

#include <map>

#include "ctabsim/query.hpp"

namespace ctab {

/// The seven benchmark templates over the logical sources
/// lineitem, lineitem_orders, and lineitem_orders_customer.
/// Q1-Q6 take parameter D (a date); Q7 takes none.
inline Query instantiateTemplate(const std::string& qid,
                                 const std::map<std::string, Value>& params) {
    auto requireD = [&]() -> Value {
        auto it = params.find("D");
        if (it == params.end()) throw PlanError(qid + " requires parameter D");
        if (it->second.tag != ValueTag::Date)
            throw PlanError(qid + ": parameter D must be a date");
        return it->second;
    };

    Query q;
    q.literalDict = std::make_shared<Dict>();
    if (qid == "Q1") {
        q.source = "lineitem";
        q.filters = {{"l_shipdate", {CompareOp::Gt, requireD(), {}}}};
        q.groupBy = {"l_shipdate"};
        q.selects = {SelectItem::col("l_shipdate"), SelectItem::agg(AggFn::CountStar)};
    } else if (qid == "Q2") {
        q.source = "lineitem";
        q.filters = {{"l_shipdate", {CompareOp::Eq, requireD(), {}}}};
        q.groupBy = {"l_suppkey"};
        q.selects = {SelectItem::col("l_suppkey"), SelectItem::agg(AggFn::CountStar)};
    } else if (qid == "Q3") {
        q.source = "lineitem";
        q.filters = {{"l_shipdate", {CompareOp::Gt, requireD(), {}}}};
        q.groupBy = {"l_suppkey"};
        q.selects = {SelectItem::col("l_suppkey"), SelectItem::agg(AggFn::CountStar)};
    } else if (qid == "Q4") {
        q.source = "lineitem_orders";
        q.filters = {{"o_orderdate", {CompareOp::Gt, requireD(), {}}}};
        q.groupBy = {"o_orderdate"};
        q.selects = {SelectItem::col("o_orderdate"), SelectItem::agg(AggFn::Max, "l_shipdate")};
    } else if (qid == "Q5") {
        q.source = "lineitem_orders";
        q.filters = {{"o_orderdate", {CompareOp::Eq, requireD(), {}}}};
        q.groupBy = {"l_suppkey"};
        q.selects = {SelectItem::col("l_suppkey"), SelectItem::agg(AggFn::Max, "l_shipdate")};
    } else if (qid == "Q6") {
        q.source = "lineitem_orders";
        q.filters = {{"o_orderdate", {CompareOp::Gt, requireD(), {}}}};
        q.groupBy = {"l_suppkey"};
        q.selects = {SelectItem::col("l_suppkey"), SelectItem::agg(AggFn::Max, "l_shipdate")};
    } else if (qid == "Q7") {
        q.source = "lineitem_orders_customer";
        q.filters = {{"l_returnflag", {CompareOp::Eq, q.encodeTextLiteral("R"), {}}}};
        q.groupBy = {"c_nationkey"};
        q.selects = {SelectItem::col("c_nationkey"),
                     SelectItem::agg(AggFn::Sum, "l_extendedprice")};
    } else {
        throw PlanError("unknown query template: " + qid);
    }
    return q;
}

inline const std::vector<std::string>& benchTemplateIds() {
    static const std::vector<std::string> ids = {"Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7"};
    return ids;
}

/// Templates with equality predicates run on a single parameter instance.
inline bool singleParamTemplate(const std::string& qid) {
    return qid == "Q2" || qid == "Q5" || qid == "Q7";
}

inline bool templateNeedsParam(const std::string& qid) { return qid != "Q7"; }

}  // namespace ctab
