#pragma once

#include <chrono>
#include <fstream>
#include <iomanip>

#include "ctabsim/oracle.hpp"
#include "ctabsim/templates.hpp"

namespace ctab {

/// Order-insensitive 64-bit digest of a result multiset.
inline uint64_t resultChecksum(const QueryResult& r) {
    std::vector<std::string> keys;
    keys.reserve(r.rows.size());
    for (const Row& row : r.rows) {
        std::string k;
        for (const Value& v : row) {
            k += v.toString();
            k += '\x1f';
        }
        keys.push_back(std::move(k));
    }
    std::sort(keys.begin(), keys.end());
    uint64_t h = 1469598103934665603ULL;
    for (const auto& k : keys) {
        for (char c : k) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ULL;
        }
        h ^= 0xff;
        h *= 1099511628211ULL;
    }
    return h;
}

struct BenchCell {
    std::string qid;
    std::string param;  // printable D value, "" when none
    std::string mode;
    bool executed = false;
    std::string skipReason;
    uint64_t checksum = 0;
    size_t resultRows = 0;
    uint64_t tuplesRead = 0;
    uint64_t bytesRead = 0;
    uint64_t pages = 0;
    double elapsedMs = 0.0;
};

struct BenchReport {
    std::vector<BenchCell> cells;
    struct Agreement {
        std::string qid;
        std::string param;
        bool agree = true;
        std::vector<std::string> modes;  // modes that executed
    };
    std::vector<Agreement> agreements;
    std::map<std::string, uint64_t> colOptBytes;  // per query template
    bool allAgree = true;
};

/// Per-query D values from data quantiles so `> D` hits a wide range of
/// selectivities. Equality templates get a single mid-frequency instance.
inline std::map<std::string, std::vector<Value>> defaultParamGrid(const Catalog& cat) {
    auto quantiles = [](std::vector<int64_t> vals, const std::vector<double>& sels) {
        std::sort(vals.begin(), vals.end());
        std::vector<int64_t> out;
        for (double s : sels) {
            // D at quantile (1 - s): roughly s of the rows exceed D
            size_t idx = static_cast<size_t>((1.0 - s) * static_cast<double>(vals.size()));
            idx = std::min(idx, vals.size() - 1);
            out.push_back(vals[idx]);
        }
        return out;
    };
    const std::vector<double> sels = {0.01, 0.10, 0.25, 0.50, 0.90};

    const Table& lineitem = cat.baseTables.at("lineitem");
    const Table& orders = cat.baseTables.at("orders");
    std::vector<int64_t> shipdates, orderdates;
    int sd = lineitem.requireColumn("l_shipdate");
    for (const Row& r : lineitem.rows) shipdates.push_back(r[sd].num);
    int od = orders.requireColumn("o_orderdate");
    for (const Row& r : orders.rows) orderdates.push_back(r[od].num);

    std::map<std::string, std::vector<Value>> grid;
    auto toDates = [](const std::vector<int64_t>& days) {
        std::vector<Value> out;
        for (int64_t d : days) out.push_back(Value::Date(static_cast<int32_t>(d)));
        return out;
    };
    auto shipGrid = quantiles(shipdates, sels);
    auto orderGrid = quantiles(orderdates, sels);
    grid["Q1"] = toDates(shipGrid);
    grid["Q3"] = toDates(shipGrid);
    grid["Q4"] = toDates(orderGrid);
    grid["Q6"] = toDates(orderGrid);
    // single mid-frequency instance for the equality templates
    std::sort(shipdates.begin(), shipdates.end());
    std::sort(orderdates.begin(), orderdates.end());
    grid["Q2"] = {Value::Date(static_cast<int32_t>(shipdates[shipdates.size() / 2]))};
    grid["Q5"] = {Value::Date(static_cast<int32_t>(orderdates[orderdates.size() / 2]))};
    grid["Q7"] = {};
    return grid;
}

/// Run every (query, param, mode) cell, check cross-mode and oracle
/// agreement, and record the ColOpt lower bound per query.
inline BenchReport runBenchSuite(const Catalog& cat,
                                 const std::map<std::string, std::vector<Value>>& grid,
                                 const std::vector<std::string>& modes,
                                 const PlannerOptions& opts = {}) {
    BenchReport report;
    Oracle oracle(cat.baseTables, cat.projectionDefs);

    for (const auto& qid : benchTemplateIds()) {
        auto git = grid.find(qid);
        if (git == grid.end()) continue;
        std::vector<Value> params = git->second;
        if (!templateNeedsParam(qid)) params = {Value::Int(0)};  // placeholder, unused

        {
            // ColOpt bound over the referenced columns of the covering projection
            Query q = templateNeedsParam(qid)
                          ? instantiateTemplate(qid, {{"D", params.front()}})
                          : instantiateTemplate(qid, {});
            if (const EncodedProjection* ep =
                    cat.coveringProjection(q.source, q.referencedColumns()))
                report.colOptBytes[qid] = colOptLowerBound(*ep, q.referencedColumns());
        }

        for (const Value& d : params) {
            Query q = templateNeedsParam(qid) ? instantiateTemplate(qid, {{"D", d}})
                                              : instantiateTemplate(qid, {});
            std::string paramText = templateNeedsParam(qid) ? d.toString() : "";

            BenchReport::Agreement agr;
            agr.qid = qid;
            agr.param = paramText;
            QueryResult oracleResult = oracle.evaluate(q);
            uint64_t oracleSum = resultChecksum(oracleResult);

            for (const auto& mode : modes) {
                BenchCell cell;
                cell.qid = qid;
                cell.param = paramText;
                cell.mode = mode;
                try {
                    Plan plan = selectPlan(q, cat, planModeFromName(mode), opts);
                    auto t0 = std::chrono::steady_clock::now();
                    auto [result, cost] = execute(plan, cat);
                    auto t1 = std::chrono::steady_clock::now();
                    cell.executed = true;
                    cell.checksum = resultChecksum(result);
                    cell.resultRows = result.rows.size();
                    cell.tuplesRead = cost.tuplesRead;
                    cell.bytesRead = cost.bytesRead;
                    cell.pages = cost.pages;
                    cell.elapsedMs =
                        std::chrono::duration<double, std::milli>(t1 - t0).count();
                    agr.modes.push_back(mode);
                    if (cell.checksum != oracleSum || !resultsEqual(result, oracleResult))
                        agr.agree = false;
                } catch (const PlanError& e) {
                    cell.skipReason = e.what();  // mode unavailable for this query
                }
                report.cells.push_back(std::move(cell));
            }
            report.allAgree &= agr.agree;
            report.agreements.push_back(std::move(agr));
        }
    }
    return report;
}

inline nlohmann::json benchReportJson(const BenchReport& r) {
    nlohmann::json j;
    j["all_agree"] = r.allAgree;
    j["cells"] = nlohmann::json::array();
    for (const auto& c : r.cells) {
        nlohmann::json cj = {{"query", c.qid},     {"param", c.param},
                             {"mode", c.mode},     {"executed", c.executed},
                             {"rows", c.resultRows}};
        if (c.executed) {
            cj["checksum"] = c.checksum;
            cj["tuples_read"] = c.tuplesRead;
            cj["bytes_read"] = c.bytesRead;
            cj["pages"] = c.pages;
            cj["elapsed_ms"] = c.elapsedMs;
            auto it = r.colOptBytes.find(c.qid);
            if (it != r.colOptBytes.end() && it->second > 0)
                cj["vs_colopt"] =
                    static_cast<double>(c.bytesRead) / static_cast<double>(it->second);
        } else {
            cj["skipped"] = c.skipReason;
        }
        j["cells"].push_back(std::move(cj));
    }
    j["agreements"] = nlohmann::json::array();
    for (const auto& a : r.agreements)
        j["agreements"].push_back({{"query", a.qid},
                                   {"param", a.param},
                                   {"agree", a.agree},
                                   {"modes", a.modes}});
    j["colopt_bytes"] = r.colOptBytes;
    return j;
}

/// Write the report as JSON plus an aligned text table (path + ".txt").
inline void emitReport(const BenchReport& r, const std::string& path) {
    {
        std::ofstream out(path);
        if (!out) throw IoError("cannot write " + path);
        out << benchReportJson(r).dump(2) << "\n";
    }
    std::ofstream out(path + ".txt");
    if (!out) throw IoError("cannot write " + path + ".txt");
    out << std::left << std::setw(6) << "query" << std::setw(13) << "param" << std::setw(9)
        << "mode" << std::right << std::setw(12) << "tuples" << std::setw(14) << "bytes"
        << std::setw(8) << "pages" << std::setw(12) << "vs_colopt" << std::setw(12)
        << "elapsed_ms" << "\n";
    for (const auto& c : r.cells) {
        out << std::left << std::setw(6) << c.qid << std::setw(13) << c.param << std::setw(9)
            << c.mode;
        if (!c.executed) {
            out << "  (skipped: " << c.skipReason << ")\n";
            continue;
        }
        out << std::right << std::setw(12) << c.tuplesRead << std::setw(14) << c.bytesRead
            << std::setw(8) << c.pages;
        auto it = r.colOptBytes.find(c.qid);
        if (it != r.colOptBytes.end() && it->second > 0)
            out << std::setw(12) << std::fixed << std::setprecision(3)
                << static_cast<double>(c.bytesRead) / static_cast<double>(it->second);
        else
            out << std::setw(12) << "-";
        out << std::setw(12) << std::fixed << std::setprecision(3) << c.elapsedMs << "\n";
    }
    if (!r.allAgree) {
        out << "\nFAILURES (result disagreement with the oracle):\n";
        for (const auto& a : r.agreements)
            if (!a.agree) out << "  " << a.qid << " param=" << a.param << "\n";
    }
}

}  // namespace ctab
