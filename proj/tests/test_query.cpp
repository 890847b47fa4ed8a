#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace ctab;

namespace {

Catalog& smallCatalog() {
    static Catalog cat = [] {
        auto tables = generateTables({0.001, 42});
        BuildConfig cfg = parseBuildConfig(nlohmann::json::parse(defaultConfigJson()));
        return Catalog::build(std::move(tables), cfg, 0);
    }();
    return cat;
}

}  // namespace

TEST_CASE("parser accepts the aggregate grammar") {
    Catalog& cat = smallCatalog();
    Query q = parseQuery(
        "SELECT l_suppkey, COUNT(*) FROM lineitem WHERE l_shipdate = '1995-06-17' "
        "GROUP BY l_suppkey",
        cat);
    CHECK(q.source == "lineitem");
    REQUIRE(q.filters.size() == 1);
    CHECK(q.filters[0].column == "l_shipdate");
    CHECK(q.filters[0].pred.op == CompareOp::Eq);
    CHECK(q.filters[0].pred.lo.tag == ValueTag::Date);
    CHECK(q.filters[0].pred.lo.num == 1263);
    CHECK(q.groupBy == std::vector<std::string>{"l_suppkey"});
    REQUIRE(q.selects.size() == 2);
    CHECK_FALSE(q.selects[0].isAgg);
    CHECK(q.selects[1].isAgg);
    CHECK(q.selects[1].fn == AggFn::CountStar);
}

TEST_CASE("parser handles every predicate operator and literal type") {
    Catalog& cat = smallCatalog();
    Query q = parseQuery(
        "SELECT COUNT(*) FROM lineitem WHERE l_suppkey >= 2 AND l_suppkey <= 9 "
        "AND l_shipdate BETWEEN '1994-01-01' AND '1995-01-01' AND l_returnflag = 'R' "
        "AND l_extendedprice > 100000",
        cat);
    REQUIRE(q.filters.size() == 5);
    CHECK(q.filters[0].pred.op == CompareOp::Ge);
    CHECK(q.filters[1].pred.op == CompareOp::Le);
    CHECK(q.filters[2].pred.op == CompareOp::Between);
    REQUIRE(q.filters[2].pred.hi.has_value());
    CHECK(q.filters[3].pred.lo.tag == ValueTag::Text);
    CHECK(q.filters[3].pred.lo.text() == "R");
    CHECK(q.filters[4].pred.lo.tag == ValueTag::Money);
}

TEST_CASE("parser accepts plain projections and rejects bad input") {
    Catalog& cat = smallCatalog();

    Query q = parseQuery("SELECT l_suppkey, l_shipdate FROM lineitem", cat);
    CHECK_FALSE(q.isAggregate());
    CHECK(q.selects.size() == 2);

    SECTION("disjunction is not supported") {
        CHECK_THROWS_WITH(
            parseQuery("SELECT l_suppkey FROM lineitem WHERE l_suppkey = 1 OR l_suppkey = 2",
                       cat),
            Catch::Matchers::ContainsSubstring("disjunctive"));
    }
    SECTION("syntax errors carry a position") {
        try {
            parseQuery("SELECT FROM lineitem", cat);
            FAIL("expected a parse error");
        } catch (const ParseError& e) {
            CHECK(std::string(e.what()).find("position") != std::string::npos);
        }
    }
    SECTION("unknown table") {
        CHECK_THROWS_AS(parseQuery("SELECT x FROM nothere", cat), SchemaError);
    }
    SECTION("unknown column") {
        CHECK_THROWS_AS(parseQuery("SELECT bogus FROM lineitem", cat), SchemaError);
    }
    SECTION("ungrouped select column") {
        CHECK_THROWS_AS(
            parseQuery("SELECT l_suppkey, COUNT(*) FROM lineitem GROUP BY l_shipdate", cat),
            SchemaError);
    }
    SECTION("trailing junk") {
        CHECK_THROWS_AS(parseQuery("SELECT l_suppkey FROM lineitem extra", cat), ParseError);
    }
    SECTION("projection names resolve to their logical source") {
        Query p = parseQuery("SELECT o_orderdate FROM D2", cat);
        CHECK(p.source == "lineitem_orders");
    }
}

TEST_CASE("canonical printing round-trips through the parser") {
    Catalog& cat = smallCatalog();
    const std::vector<std::string> texts = {
        "SELECT l_shipdate, COUNT(*) FROM lineitem WHERE l_shipdate > '1995-06-17' "
        "GROUP BY l_shipdate",
        "SELECT l_suppkey, MAX(l_shipdate) FROM lineitem_orders WHERE o_orderdate = "
        "'1995-06-17' GROUP BY l_suppkey",
        "SELECT c_nationkey, SUM(l_extendedprice) FROM lineitem_orders_customer WHERE "
        "l_returnflag = 'R' GROUP BY c_nationkey",
        "SELECT l_suppkey, l_shipdate FROM lineitem WHERE l_suppkey BETWEEN 3 AND 17",
        "SELECT AVG(l_extendedprice) FROM lineitem",
        "SELECT MIN(l_shipdate) FROM lineitem WHERE l_returnflag = 'A'",
    };
    for (const auto& text : texts) {
        Query q = parseQuery(text, cat);
        std::string printed = printQuery(q);
        Query q2 = parseQuery(printed, cat);
        CHECK(printed == printQuery(q2));
        CHECK(q.source == q2.source);
        CHECK(q.filters.size() == q2.filters.size());
        CHECK(q.groupBy == q2.groupBy);
    }
}

TEST_CASE("the seven benchmark templates instantiate and validate") {
    Catalog& cat = smallCatalog();
    const Value d = Value::Date(parseDateDays("1995-06-17"));
    for (const auto& qid : benchTemplateIds()) {
        Query q = templateNeedsParam(qid) ? instantiateTemplate(qid, {{"D", d}})
                                          : instantiateTemplate(qid, {});
        CHECK_NOTHROW(q.validate(cat.sourceSchema(cat.resolveSource(q.source))));
        // each template's print form re-parses identically
        CHECK(printQuery(parseQuery(printQuery(q), cat)) == printQuery(q));
    }
    CHECK(benchTemplateIds().size() == 7);
    CHECK(singleParamTemplate("Q2"));
    CHECK(singleParamTemplate("Q5"));
    CHECK(singleParamTemplate("Q7"));
    CHECK_FALSE(singleParamTemplate("Q1"));
}

TEST_CASE("template instantiation checks its parameters") {
    const Value d = Value::Date(parseDateDays("1995-06-17"));
    Query q7 = instantiateTemplate("Q7", {});
    CHECK(q7.source == "lineitem_orders_customer");
    CHECK(q7.groupBy == std::vector<std::string>{"c_nationkey"});
    REQUIRE(q7.filters.size() == 1);
    CHECK(q7.filters[0].pred.lo.text() == "R");
    CHECK(q7.selects[1].fn == AggFn::Sum);
    CHECK(q7.selects[1].column == "l_extendedprice");

    CHECK_THROWS_AS(instantiateTemplate("Q5", {}), PlanError);
    CHECK_THROWS_AS(instantiateTemplate("Q5", {{"D", Value::Int(5)}}), PlanError);
    CHECK_THROWS_AS(instantiateTemplate("Q99", {{"D", d}}), PlanError);

    Query q2 = instantiateTemplate("Q2", {{"D", d}});
    CHECK(q2.source == "lineitem");
    CHECK(q2.filters[0].pred.op == CompareOp::Eq);
    CHECK(q2.filters[0].pred.lo.num == 1263);
}

TEST_CASE("query validation enforces the AST invariants") {
    auto schema = ts::goldenTable().columns;
    Query q;
    q.source = "T";
    q.selects = {SelectItem::col("a"), SelectItem::agg(AggFn::CountStar)};
    q.groupBy = {"a"};
    CHECK_NOTHROW(q.validate(schema));

    SECTION("unknown group column") {
        q.groupBy = {"zz"};
        CHECK_THROWS_AS(q.validate(schema), SchemaError);
    }
    SECTION("select column outside the grouping") {
        q.selects = {SelectItem::col("b"), SelectItem::agg(AggFn::CountStar)};
        CHECK_THROWS_AS(q.validate(schema), SchemaError);
    }
    SECTION("filter literal tag mismatch") {
        q.filters = {{"a", {CompareOp::Eq, Value::Date(1), {}}}};
        CHECK_THROWS_AS(q.validate(schema), SchemaError);
    }
    SECTION("between bounds must be ordered") {
        q.filters = {{"a", {CompareOp::Between, Value::Int(5), Value::Int(1)}}};
        CHECK_THROWS_AS(q.validate(schema), SchemaError);
    }
    SECTION("referencedColumns de-duplicates") {
        q.filters = {{"a", {CompareOp::Eq, Value::Int(1), {}}}};
        q.selects.push_back(SelectItem::agg(AggFn::Sum, "c"));
        auto refs = q.referencedColumns();
        CHECK(refs == std::vector<std::string>{"a", "c"});
    }
}
