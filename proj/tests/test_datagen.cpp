#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "test_support.hpp"

using namespace ctab;

TEST_CASE("generation cardinalities scale with the factor") {
    auto tables = generateTables({0.01, 42});
    CHECK(tables.at("customer").rowCount() == 1500);
    CHECK(tables.at("orders").rowCount() == 15000);
    const size_t items = tables.at("lineitem").rowCount();
    CHECK(items >= 15000);
    CHECK(items <= 105000);

    auto tiny = generateTables({0.001, 42});
    CHECK(tiny.at("customer").rowCount() == 150);
    CHECK(tiny.at("orders").rowCount() == 1500);
    CHECK(tiny.at("lineitem").rowCount() >= 1500);
    CHECK(tiny.at("lineitem").rowCount() <= 10500);
}

TEST_CASE("generated values stay inside their documented domains") {
    auto tables = generateTables({0.002, 7});
    const Table& customer = tables.at("customer");
    const Table& orders = tables.at("orders");
    const Table& lineitem = tables.at("lineitem");

    for (const Row& r : customer.rows) {
        CHECK(r[1].num >= 0);
        CHECK(r[1].num < 25);
    }

    const int32_t maxDate = parseDateDays("1998-12-01");
    std::map<int64_t, int32_t> orderDate;
    for (const Row& r : orders.rows) {
        CHECK(r[1].num >= 1);
        CHECK(r[1].num <= static_cast<int64_t>(customer.rowCount()));
        CHECK(r[2].num >= 0);
        CHECK(r[2].num <= maxDate);
        orderDate[r[0].num] = static_cast<int32_t>(r[2].num);
    }

    const int64_t maxSupp = std::max<int64_t>(1, 20);  // 10000 * 0.002
    for (const Row& r : lineitem.rows) {
        REQUIRE(orderDate.count(r[0].num) == 1);
        CHECK(r[1].num >= 1);
        CHECK(r[1].num <= maxSupp);
        const int32_t gap = static_cast<int32_t>(r[2].num) - orderDate[r[0].num];
        CHECK(gap >= 1);
        CHECK(gap <= 121);
        const std::string& flag = r[3].text();
        CHECK((flag == "A" || flag == "N" || flag == "R"));
        CHECK(r[4].num >= 90100);
        CHECK(r[4].num <= 10500000);
    }
}

TEST_CASE("identical specs generate identical data, different seeds do not") {
    auto a = generateTables({0.001, 42});
    auto b = generateTables({0.001, 42});
    for (const auto& [name, t] : a) CHECK(ts::sameRows(t.rows, b.at(name).rows));

    auto c = generateTables({0.001, 43});
    CHECK_FALSE(ts::sameRows(a.at("orders").rows, c.at("orders").rows));
}

TEST_CASE("generated files round-trip through disk byte-identically") {
    namespace fs = std::filesystem;
    const fs::path dir1 = fs::temp_directory_path() / "ctabsim_gen1";
    const fs::path dir2 = fs::temp_directory_path() / "ctabsim_gen2";
    generateData({0.001, 42}, dir1.string());
    generateData({0.001, 42}, dir2.string());

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    for (const char* name : {"customer.csv", "orders.csv", "lineitem.csv"}) {
        std::string f1 = slurp(dir1 / name);
        CHECK_FALSE(f1.empty());
        CHECK(f1 == slurp(dir2 / name));
    }

    // loading the files reproduces the in-memory tables exactly
    auto mem = generateTables({0.001, 42});
    auto loaded = loadBaseTables(dir1.string());
    for (const auto& [name, t] : mem) CHECK(ts::sameRows(t.rows, loaded.at(name).rows));

    fs::remove_all(dir1);
    fs::remove_all(dir2);
}

TEST_CASE("scale factor must stay in the supported range") {
    CHECK_THROWS_AS(generateTables({0.0, 42}), PreconditionError);
    CHECK_THROWS_AS(generateTables({-1.0, 42}), PreconditionError);
    CHECK_THROWS_AS(generateTables({1.5, 42}), PreconditionError);
}
