#pragma once

#include <cmath>
#include <filesystem>

#include "ctabsim/csv.hpp"

namespace ctab {

struct GenSpec {
    double scaleFactor = 0.01;
    uint64_t seed = 42;
};

namespace detail {

/// splitmix64 stream with Lemire bounded draws; self-contained so generated
/// data is byte-identical across platforms and library versions.
struct Rng {
    uint64_t state;

    explicit Rng(uint64_t seed) : state(seed) {}

    uint64_t next() {
        uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, n).
    uint64_t bounded(uint64_t n) {
        return static_cast<uint64_t>(
            (static_cast<unsigned __int128>(next()) * static_cast<unsigned __int128>(n)) >> 64);
    }
};

}  // namespace detail

inline std::vector<ColumnDef> customerSchema() {
    return {{"c_custkey", ValueTag::Int}, {"c_nationkey", ValueTag::Int}};
}

inline std::vector<ColumnDef> ordersSchema() {
    return {{"o_orderkey", ValueTag::Int},
            {"o_custkey", ValueTag::Int},
            {"o_orderdate", ValueTag::Date}};
}

inline std::vector<ColumnDef> lineitemSchema() {
    return {{"l_orderkey", ValueTag::Int},
            {"l_suppkey", ValueTag::Int},
            {"l_shipdate", ValueTag::Date},
            {"l_returnflag", ValueTag::Text},
            {"l_extendedprice", ValueTag::Money}};
}

inline std::map<std::string, std::vector<ColumnDef>> baseSchemas() {
    return {{"customer", customerSchema()},
            {"orders", ordersSchema()},
            {"lineitem", lineitemSchema()}};
}

/// Deterministic TPC-H-shaped subset covering exactly the workload columns.
inline std::map<std::string, Table> generateTables(const GenSpec& spec) {
    if (!(spec.scaleFactor > 0.0) || spec.scaleFactor > 1.0)
        throw PreconditionError("scale factor must be in (0, 1]");
    detail::Rng rng(spec.seed);

    const int64_t nCustomers = std::llround(150000.0 * spec.scaleFactor);
    const int64_t nOrders = std::llround(1500000.0 * spec.scaleFactor);
    const int64_t maxSuppkey = std::max<int64_t>(1, std::llround(10000.0 * spec.scaleFactor));
    const int32_t maxOrderdate = parseDateDays("1998-12-01");  // "1992-01-01" is day 0

    std::map<std::string, Table> out;

    Table customer("customer", customerSchema());
    for (int64_t i = 1; i <= nCustomers; ++i) {
        customer.rows.push_back(
            {Value::Int(i), Value::Int(static_cast<int64_t>(rng.bounded(25)))});
    }

    Table orders("orders", ordersSchema());
    for (int64_t i = 1; i <= nOrders; ++i) {
        orders.rows.push_back(
            {Value::Int(i),
             Value::Int(1 + static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(nCustomers)))),
             Value::Date(static_cast<int32_t>(
                 rng.bounded(static_cast<uint64_t>(maxOrderdate) + 1)))});
    }

    Table lineitem("lineitem", lineitemSchema());
    static const char* flags[3] = {"A", "N", "R"};
    for (const Row& order : orders.rows) {
        const uint64_t items = 1 + rng.bounded(7);
        for (uint64_t k = 0; k < items; ++k) {
            Row r;
            r.push_back(order[0]);  // l_orderkey
            r.push_back(Value::Int(
                1 + static_cast<int64_t>(rng.bounded(static_cast<uint64_t>(maxSuppkey)))));
            r.push_back(Value::Date(static_cast<int32_t>(order[2].num) + 1 +
                                    static_cast<int32_t>(rng.bounded(121))));
            r.push_back(lineitem.encodeText(3, flags[rng.bounded(3)]));
            r.push_back(Value::Money(90100 + static_cast<int64_t>(
                                                 rng.bounded(10500000 - 90100 + 1))));
            lineitem.rows.push_back(std::move(r));
        }
    }

    out.emplace("customer", std::move(customer));
    out.emplace("orders", std::move(orders));
    out.emplace("lineitem", std::move(lineitem));
    return out;
}

/// Generate and write customer/orders/lineitem CSVs into outDir.
inline std::map<std::string, Table> generateData(const GenSpec& spec, const std::string& outDir) {
    std::error_code ec;
    std::filesystem::create_directories(outDir, ec);
    auto tables = generateTables(spec);
    for (const auto& [name, t] : tables)
        writeCsv(t, (std::filesystem::path(outDir) / (name + ".csv")).string());
    return tables;
}

inline std::map<std::string, Table> loadBaseTables(const std::string& dataDir) {
    std::map<std::string, Table> out;
    for (const auto& [name, schema] : baseSchemas()) {
        auto path = std::filesystem::path(dataDir) / (name + ".csv");
        out.emplace(name, loadCsv(path.string(), schema, name));
    }
    return out;
}

}  // namespace ctab
