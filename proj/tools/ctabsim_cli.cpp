// Benchmark CLI: generate data, build a store, run queries, run the
// cross-mode suite.

#include <iostream>

#include <CLI11.hpp>

#include "ctabsim/ctabsim.hpp"

namespace {

ctab::Value parseParamValue(const std::string& s) {
    if (s.size() == 10 && s[4] == '-' && s[7] == '-')
        return ctab::Value::Date(ctab::parseDateDays(s));
    return ctab::Value::Int(std::stoll(s));
}

std::map<std::string, std::vector<ctab::Value>> loadGrid(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ctab::IoError("cannot open grid file " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    std::map<std::string, std::vector<ctab::Value>> grid;
    for (auto& [qid, arr] : j.items()) {
        std::vector<ctab::Value> vals;
        for (const auto& v : arr) vals.push_back(parseParamValue(v.get<std::string>()));
        grid[qid] = std::move(vals);
    }
    return grid;
}

void printResult(const ctab::QueryResult& r) {
    for (size_t i = 0; i < r.columns.size(); ++i)
        std::cout << (i ? "," : "") << r.columns[i];
    std::cout << "\n";
    for (const auto& row : r.rows) {
        for (size_t i = 0; i < row.size(); ++i)
            std::cout << (i ? "," : "") << row[i].toString();
        std::cout << "\n";
    }
}

nlohmann::json costJson(const ctab::CostReport& c) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& n : c.perNode)
        nodes.push_back({{"id", n.id},
                         {"op", n.op},
                         {"tuples_read", n.tuplesRead},
                         {"tuples_out", n.tuplesOut},
                         {"bytes_read", n.bytesRead}});
    return {{"nodes", nodes},
            {"total_tuples", c.tuplesRead},
            {"total_bytes", c.bytesRead},
            {"pages", c.pages}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"c-table column-store simulation benchmark"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "generate deterministic base tables");
    double sf = 0.01;
    uint64_t seed = 42;
    std::string outDir;
    gen->add_option("--sf", sf, "scale factor in (0, 1]");
    gen->add_option("--seed", seed, "generator seed");
    gen->add_option("--out", outDir, "output directory")->required();

    // build
    auto* build = app.add_subcommand("build", "build projections, views, and c-tables");
    std::string configPath, dataDir, storeDir;
    int overhead = 0;
    build->add_option("--config", configPath, "physical design config (default: shipped design)");
    build->add_option("--data", dataDir, "directory with base-table CSVs")->required();
    build->add_option("--out", storeDir, "store output directory")->required();
    build->add_option("--overhead", overhead, "per-c-table-tuple overhead bytes");

    // run
    auto* run = app.add_subcommand("run", "run one query against a store");
    std::string runStore, queryId, sqlText, modeName = "auto";
    std::vector<std::string> paramArgs;
    bool explain = false, costs = false;
    run->add_option("--store", runStore, "store directory")->required();
    run->add_option("--query", queryId, "template id Q1..Q7");
    run->add_option("--param", paramArgs, "template parameter, e.g. D=1995-06-17");
    run->add_option("--sql", sqlText, "SQL text instead of a template");
    run->add_option("--mode", modeName, "row|mv|ctable|auto");
    run->add_flag("--explain", explain, "print the plan tree");
    run->add_flag("--costs", costs, "print the cost report as JSON");

    // bench
    auto* bench = app.add_subcommand("bench", "run the cross-mode benchmark suite");
    std::string benchStore, gridPath, reportPath;
    std::vector<std::string> modeList = {"row", "mv", "ctable"};
    bench->add_option("--store", benchStore, "store directory")->required();
    bench->add_option("--grid", gridPath, "JSON param grid (default: data quantiles)");
    bench->add_option("--modes", modeList, "modes to compare")->delimiter(',');
    bench->add_option("--report", reportPath, "report output path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            ctab::generateData(ctab::GenSpec{sf, seed}, outDir);
            std::cout << "wrote base tables to " << outDir << "\n";
            return 0;
        }
        if (build->parsed()) {
            nlohmann::json cfgJson;
            if (configPath.empty()) {
                cfgJson = nlohmann::json::parse(ctab::defaultConfigJson());
            } else {
                std::ifstream in(configPath);
                if (!in) throw ctab::IoError("cannot open config " + configPath);
                cfgJson = nlohmann::json::parse(in);
            }
            auto cfg = ctab::parseBuildConfig(cfgJson);
            auto base = ctab::loadBaseTables(dataDir);
            ctab::Catalog cat = ctab::Catalog::build(std::move(base), cfg, overhead);
            ctab::saveStore(cat, storeDir);
            std::cout << "built " << cat.projections.size() << " projections and "
                      << cat.views.size() << " views into " << storeDir << "\n";
            return 0;
        }
        if (run->parsed()) {
            ctab::Catalog cat = ctab::loadStore(runStore);
            ctab::Query q;
            if (!sqlText.empty()) {
                q = ctab::parseQuery(sqlText, cat);
            } else if (!queryId.empty()) {
                std::map<std::string, ctab::Value> params;
                for (const auto& p : paramArgs) {
                    auto eq = p.find('=');
                    if (eq == std::string::npos)
                        throw ctab::PlanError("bad --param, expected K=V: " + p);
                    params[p.substr(0, eq)] = parseParamValue(p.substr(eq + 1));
                }
                q = ctab::instantiateTemplate(queryId, params);
            } else {
                throw ctab::PlanError("one of --query or --sql is required");
            }
            ctab::Plan plan = ctab::selectPlan(q, cat, ctab::planModeFromName(modeName));
            if (explain) std::cout << ctab::explainPlan(plan);
            auto [result, cost] = ctab::execute(plan, cat);
            printResult(result);
            if (costs) std::cout << costJson(cost).dump(2) << "\n";
            return 0;
        }
        if (bench->parsed()) {
            ctab::Catalog cat = ctab::loadStore(benchStore);
            auto grid = gridPath.empty() ? ctab::defaultParamGrid(cat) : loadGrid(gridPath);
            ctab::BenchReport report = ctab::runBenchSuite(cat, grid, modeList);
            ctab::emitReport(report, reportPath);
            std::cout << "report written to " << reportPath << " (+.txt)\n";
            if (!report.allAgree) {
                std::cerr << "DISAGREEMENT: some modes do not match the oracle\n";
                for (const auto& a : report.agreements)
                    if (!a.agree)
                        std::cerr << "  " << a.qid << " param=" << a.param << "\n";
                return 1;
            }
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
