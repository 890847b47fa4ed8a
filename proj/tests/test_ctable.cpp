#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace ctab;

namespace {

void checkRun(const Run& r, uint32_t f, int64_t v, uint32_t c) {
    CHECK(r.f == f);
    CHECK(r.v.num == v);
    CHECK(r.c == c);
}

}  // namespace

TEST_CASE("golden twelve-row table encodes to the expected c-tables") {
    EncodedProjection ep = ts::goldenProjection();
    REQUIRE(ep.ctables.size() == 3);
    REQUIRE(ep.N == 12);

    const CTable& ta = ep.ctableFor("a");
    REQUIRE(ta.repr == Repr::RLE);
    REQUIRE(ta.runs.size() == 2);
    checkRun(ta.runs[0], 1, 1, 5);
    checkRun(ta.runs[1], 6, 2, 7);

    const CTable& tb = ep.ctableFor("b");
    REQUIRE(tb.repr == Repr::RLE);
    REQUIRE(tb.runs.size() == 4);
    checkRun(tb.runs[0], 1, 1, 2);
    checkRun(tb.runs[1], 3, 2, 3);
    checkRun(tb.runs[2], 6, 1, 2);
    checkRun(tb.runs[3], 8, 3, 5);

    const CTable& tc = ep.ctableFor("c");
    REQUIRE(tc.repr == Repr::Dense);
    REQUIRE(tc.dense.size() == 12);
    CHECK(tc.dense[0].num == 1);
    CHECK(tc.dense[1].num == 4);
    CHECK(tc.dense[2].num == 4);
    CHECK(tc.dense[3].num == 5);

    CHECK(ep.depthOf("a") == 1);
    CHECK(ep.depthOf("b") == 2);
    CHECK(ep.depthOf("c") == 3);
    CHECK(ep.findCTable("zz") == nullptr);
    CHECK_THROWS_AS(ep.ctableFor("zz"), SchemaError);
}

TEST_CASE("representation choice: dense iff N*(4+w) <= R*(8+w), ties dense") {
    // the golden c column: 9 runs over 12 rows of 8-byte values -> 144 vs 144
    CHECK(chooseRepresentation(9, 12, 8) == Repr::Dense);
    // the golden a column: 2 runs -> 144 vs 32
    CHECK(chooseRepresentation(2, 12, 8) == Repr::RLE);
    // every run singleton: dense always wins
    CHECK(chooseRepresentation(12, 12, 8) == Repr::Dense);
    CHECK(chooseRepresentation(1000, 1000, 4) == Repr::Dense);
    // narrow values shift the break-even point
    CHECK(chooseRepresentation(5, 12, 4) == Repr::RLE);   // 96 > 60
    CHECK(chooseRepresentation(8, 12, 4) == Repr::Dense); // 96 <= 96
}

TEST_CASE("encodeProjection validates order and inputs") {
    Table t = ts::goldenTable();
    SECTION("unsorted input is rejected") {
        std::swap(t.rows[0], t.rows[11]);
        CHECK_THROWS_AS(encodeProjection(t, {"a", "b", "c"}), PreconditionError);
    }
    SECTION("sort order must cover all columns exactly once") {
        CHECK_THROWS_AS(encodeProjection(t, {"a", "b"}), PreconditionError);
        CHECK_THROWS_AS(encodeProjection(t, {"a", "b", "b"}), PreconditionError);
        CHECK_THROWS_AS(encodeProjection(t, {"a", "b", "x"}), SchemaError);
    }
    SECTION("single-row table encodes to unit runs") {
        t.rows.resize(1);
        EncodedProjection ep = encodeProjection(t, {"a", "b", "c"});
        for (const auto& ct : ep.ctables) {
            REQUIRE(ct.tupleCount() == 1);
            Run r = ct.runAt(0);
            CHECK(r.f == 1);
            CHECK(r.c == 1);
        }
    }
    SECTION("empty table encodes and decodes to empty") {
        t.rows.clear();
        EncodedProjection ep = encodeProjection(t, {"a", "b", "c"});
        CHECK(ep.N == 0);
        CHECK(decodeProjection(ep).rows.empty());
    }
}

TEST_CASE("decodeProjection inverts encodeProjection on the golden table") {
    EncodedProjection ep = ts::goldenProjection();
    Table back = decodeProjection(ep);
    CHECK(ts::sameRows(back.rows, ts::goldenTable().rows));
}

TEST_CASE("decodeProjection flags corrupted tilings") {
    EncodedProjection ep = ts::goldenProjection();
    SECTION("gap") {
        ep.ctables[0].runs[1].f = 7;
        CHECK_THROWS_AS(decodeProjection(ep), CorruptionError);
    }
    SECTION("short coverage") {
        ep.ctables[0].runs[1].c = 6;
        CHECK_THROWS_AS(decodeProjection(ep), CorruptionError);
    }
    SECTION("zero-length run") {
        ep.ctables[1].runs[0].c = 0;
        CHECK_THROWS_AS(decodeProjection(ep), CorruptionError);
    }
}

TEST_CASE("seekFRange returns runs intersecting the position window") {
    EncodedProjection ep = ts::goldenProjection();
    const CTable& ta = ep.ctableFor("a");
    const CTable& tb = ep.ctableFor("b");

    auto mid = tb.seekFRange(3, 7);
    REQUIRE(mid.size() == 2);
    checkRun(mid[0], 3, 2, 3);
    checkRun(mid[1], 6, 1, 2);

    auto one = ta.seekFRange(6, 6);
    REQUIRE(one.size() == 1);
    checkRun(one[0], 6, 2, 7);

    SECTION("full window returns all runs and tiles exactly [1, N]") {
        for (const CTable& ct : ep.ctables) {
            auto all = ct.seekFRange(1, ep.N);
            REQUIRE(all.size() == ct.tupleCount());
            uint32_t next = 1;
            for (const Run& r : all) {
                CHECK(r.f == next);
                next = r.last() + 1;
            }
            CHECK(next == ep.N + 1);
        }
    }
    SECTION("bounds are enforced") {
        CHECK_THROWS_AS(ta.seekFRange(0, 3), BoundsError);
        CHECK_THROWS_AS(ta.seekFRange(1, 13), BoundsError);
        CHECK_THROWS_AS(ta.seekFRange(5, 4), BoundsError);
    }
    SECTION("dense c-tables emit unit runs") {
        auto d = ep.ctableFor("c").seekFRange(2, 4);
        REQUIRE(d.size() == 3);
        checkRun(d[0], 2, 4, 1);
        checkRun(d[1], 3, 4, 1);
        checkRun(d[2], 4, 5, 1);
    }
}

TEST_CASE("seekV answers value predicates through the v-index") {
    EncodedProjection ep = ts::goldenProjection();
    const CTable& ta = ep.ctableFor("a");
    const CTable& tb = ep.ctableFor("b");
    const CTable& tc = ep.ctableFor("c");

    auto eq3 = tb.seekV({CompareOp::Eq, Value::Int(3), {}});
    REQUIRE(eq3.size() == 1);
    checkRun(eq3[0], 8, 3, 5);

    CHECK(ta.seekV({CompareOp::Gt, Value::Int(2), {}}).empty());

    auto ones = tc.seekV({CompareOp::Eq, Value::Int(1), {}});
    std::vector<uint32_t> ids;
    for (const Run& r : ones) ids.push_back(r.f);
    CHECK(ids == std::vector<uint32_t>{1, 6, 7, 8});

    SECTION("all operators") {
        CHECK(tb.seekV({CompareOp::Lt, Value::Int(2), {}}).size() == 2);   // the two v=1 runs
        CHECK(tb.seekV({CompareOp::Le, Value::Int(2), {}}).size() == 3);
        CHECK(tb.seekV({CompareOp::Ge, Value::Int(2), {}}).size() == 2);
        CHECK(tb.seekV({CompareOp::Between, Value::Int(1), Value::Int(2)}).size() == 3);
    }
    SECTION("results arrive in (v, f) order") {
        auto all = tb.seekV({CompareOp::Ge, Value::Int(0), {}});
        REQUIRE(all.size() == 4);
        for (size_t i = 1; i < all.size(); ++i) {
            int c = compareValues(all[i - 1].v, all[i].v);
            CHECK((c < 0 || (c == 0 && all[i - 1].f < all[i].f)));
        }
    }
    SECTION("literal tag must match") {
        CHECK_THROWS_AS(ta.seekV({CompareOp::Eq, Value::Date(1), {}}), SchemaError);
    }
}

TEST_CASE("lookupValueAt finds the covering run") {
    EncodedProjection ep = ts::goldenProjection();
    CHECK(ep.ctableFor("a").lookupValueAt(7).num == 2);
    CHECK(ep.ctableFor("b").lookupValueAt(5).num == 2);
    CHECK(ep.ctableFor("c").lookupValueAt(12).num == 4);
    CHECK_THROWS_AS(ep.ctableFor("a").lookupValueAt(0), BoundsError);
    CHECK_THROWS_AS(ep.ctableFor("a").lookupValueAt(13), BoundsError);
}

TEST_CASE("sizeBytes charges per stored tuple with optional overhead") {
    EncodedProjection ep = ts::goldenProjection();
    const CTable& ta = ep.ctableFor("a");
    CHECK(ta.sizeBytes(0) == 32);   // 2 runs * (4+8+4)
    CHECK(ta.sizeBytes(9) == 50);   // +9 per stored tuple
    CHECK(ep.ctableFor("b").sizeBytes(0) == 64);
    CHECK(ep.ctableFor("c").sizeBytes(0) == 144);  // dense: 12 * (4+8)

    CTable empty;
    empty.tag = ValueTag::Int;
    CHECK(empty.sizeBytes(0) == 0);
    CHECK(empty.sizeBytes(9) == 0);

    CHECK(pagesOf(0) == 0);
    CHECK(pagesOf(1) == 1);
    CHECK(pagesOf(8192) == 1);
    CHECK(pagesOf(8193) == 2);
}

TEST_CASE("colOptLowerBound sums uncompressed-scan bytes of referenced columns") {
    EncodedProjection ep = ts::goldenProjection();
    CHECK(colOptLowerBound(ep, {"a"}) == 32);
    CHECK(colOptLowerBound(ep, {}) == 0);
    CHECK(colOptLowerBound(ep, {"a", "b"}) == 96);
    CHECK(colOptLowerBound(ep, {"a", "b", "c"}) == 240);
    CHECK_THROWS_AS(colOptLowerBound(ep, {"zz"}), SchemaError);
}

TEST_CASE("random projections round-trip and keep the structural invariants") {
    size_t pairChecks = 0;
    ctab::detail::Rng pick(7);
    for (uint64_t seed = 0; seed < 120; ++seed) {
        ts::RandomInstance inst = ts::randomInstance(seed, 400);
        EncodedProjection ep = encodeProjection(inst.table, inst.order);

        // decode(encode(t)) == t, in order
        Table back = decodeProjection(ep);
        REQUIRE(ts::sameRows(back.rows, inst.table.rows));

        size_t prevRuns = 0;
        for (size_t d = 0; d < ep.ctables.size(); ++d) {
            const CTable& ct = ep.ctables[d];
            ct.verifyTiling();
            // partition refinement: deeper columns never have fewer runs
            CHECK(ct.tupleCount() >= prevRuns);
            prevRuns = ct.tupleCount();

            // lookupValueAt agrees with the sorted raw cell everywhere
            const int col = inst.table.requireColumn(ct.column);
            for (uint32_t id = 1; id <= ep.N; ++id)
                REQUIRE(compareValues(ct.lookupValueAt(id), inst.table.rows[id - 1][col]) == 0);
        }

        // non-partial-overlap: random run pairs across c-tables are disjoint
        // or nested
        if (ep.N == 0) continue;
        for (int k = 0; k < 40; ++k) {
            const CTable& c1 = ep.ctables[pick.bounded(ep.ctables.size())];
            const CTable& c2 = ep.ctables[pick.bounded(ep.ctables.size())];
            Run r1 = c1.runAt(pick.bounded(c1.tupleCount()));
            Run r2 = c2.runAt(pick.bounded(c2.tupleCount()));
            bool disjoint = r1.last() < r2.f || r2.last() < r1.f;
            bool nested = (r1.f >= r2.f && r1.last() <= r2.last()) ||
                          (r2.f >= r1.f && r2.last() <= r1.last());
            REQUIRE((disjoint || nested));
            ++pairChecks;
        }
    }
    CHECK(pairChecks >= 4000);
}
