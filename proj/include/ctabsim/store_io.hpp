#pragma once

#include <filesystem>
#include <fstream>

#include "ctabsim/catalog.hpp"
#include "ctabsim/csv.hpp"

namespace ctab {

// On-disk store layout:
//   manifest.json               store-wide metadata (schemas, defs, dictionaries)
//   <projection>__<column>.ct   one binary file per c-table: the stored tuples
//                               little-endian in primary (f) order, then the
//                               v-index permutation as 4-byte positions
//   base__<table>.csv           base tables, for the Row baseline and oracle
//   view__<name>.csv            materialized view contents

namespace detail {

inline void putU32(std::ostream& out, uint32_t v) {
    char b[4] = {static_cast<char>(v), static_cast<char>(v >> 8), static_cast<char>(v >> 16),
                 static_cast<char>(v >> 24)};
    out.write(b, 4);
}

inline void putI64(std::ostream& out, int64_t v) {
    auto u = static_cast<uint64_t>(v);
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(u >> (8 * i));
    out.write(b, 8);
}

inline uint32_t getU32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw CorruptionError("truncated c-table file");
    return static_cast<uint32_t>(b[0]) | (static_cast<uint32_t>(b[1]) << 8) |
           (static_cast<uint32_t>(b[2]) << 16) | (static_cast<uint32_t>(b[3]) << 24);
}

inline int64_t getI64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw CorruptionError("truncated c-table file");
    uint64_t u = 0;
    for (int i = 0; i < 8; ++i) u |= static_cast<uint64_t>(b[i]) << (8 * i);
    return static_cast<int64_t>(u);
}

inline void putValue(std::ostream& out, const Value& v) {
    switch (v.tag) {
        case ValueTag::Int:
        case ValueTag::Money: putI64(out, v.num); break;
        case ValueTag::Date:
        case ValueTag::Text: putU32(out, static_cast<uint32_t>(v.num)); break;
    }
}

inline Value getValue(std::istream& in, ValueTag tag, const Dict* dict) {
    switch (tag) {
        case ValueTag::Int: return Value::Int(getI64(in));
        case ValueTag::Money: return Value::Money(getI64(in));
        case ValueTag::Date: return Value::Date(static_cast<int32_t>(getU32(in)));
        case ValueTag::Text: return Value::Text(getU32(in), dict);
    }
    throw CorruptionError("bad value tag");
}

}  // namespace detail

inline void writeCTableFile(const CTable& ct, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (size_t i = 0; i < ct.tupleCount(); ++i) {
        Run r = ct.runAt(i);
        detail::putU32(out, r.f);
        detail::putValue(out, r.v);
        if (ct.repr == Repr::RLE) detail::putU32(out, r.c);
    }
    for (uint32_t idx : ct.vIndex) detail::putU32(out, idx);
}

inline void readCTableFile(CTable& ct, size_t tupleCount, const std::string& path,
                           const Dict* dict) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path);
    if (ct.repr == Repr::RLE) {
        ct.runs.reserve(tupleCount);
        for (size_t i = 0; i < tupleCount; ++i) {
            Run r;
            r.f = detail::getU32(in);
            r.v = detail::getValue(in, ct.tag, dict);
            r.c = detail::getU32(in);
            ct.runs.push_back(std::move(r));
        }
    } else {
        ct.dense.reserve(tupleCount);
        for (size_t i = 0; i < tupleCount; ++i) {
            uint32_t id = detail::getU32(in);
            if (id != i + 1) throw CorruptionError(path + ": dense ids out of order");
            ct.dense.push_back(detail::getValue(in, ct.tag, dict));
        }
    }
    ct.vIndex.reserve(tupleCount);
    for (size_t i = 0; i < tupleCount; ++i) ct.vIndex.push_back(detail::getU32(in));
    ct.verifyTiling();
}

inline void saveStore(const Catalog& cat, const std::string& dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);
    nlohmann::json m;

    auto columnsJson = [](const std::vector<ColumnDef>& cols) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& c : cols) arr.push_back({{"name", c.name}, {"type", tagName(c.type)}});
        return arr;
    };

    m["base"] = nlohmann::json::array();
    for (const auto& [name, t] : cat.baseTables) {
        writeCsv(t, (fs::path(dir) / ("base__" + name + ".csv")).string());
        m["base"].push_back({{"name", name}, {"columns", columnsJson(t.columns)}});
    }

    m["projectionDefs"] = nlohmann::json::array();
    for (const auto& d : cat.projectionDefs) {
        nlohmann::json joins = nlohmann::json::array();
        for (const auto& j : d.joins)
            joins.push_back(
                {{"table", j.table}, {"leftKey", j.leftKey}, {"rightKey", j.rightKey}});
        m["projectionDefs"].push_back({{"name", d.name},
                                       {"anchor", d.anchor},
                                       {"joins", joins},
                                       {"columns", d.columns},
                                       {"sort", d.sort}});
    }

    m["projections"] = nlohmann::json::array();
    for (const auto& ep : cat.projections) {
        nlohmann::json pj;
        pj["name"] = ep.name;
        pj["N"] = ep.N;
        pj["sortOrder"] = ep.sortOrder;
        pj["source"] = ep.sourceKey;
        pj["overhead"] = ep.overheadBytes;
        pj["columns"] = columnsJson(ep.raw.columns);
        nlohmann::json dicts = nlohmann::json::object();
        for (size_t i = 0; i < ep.raw.columns.size(); ++i)
            if (ep.raw.columns[i].type == ValueTag::Text)
                dicts[ep.raw.columns[i].name] = *ep.raw.dicts[i];
        pj["dictionaries"] = dicts;
        nlohmann::json cts = nlohmann::json::array();
        for (const auto& ct : ep.ctables) {
            std::string file = ep.name + "__" + ct.column + ".ct";
            writeCTableFile(ct, (fs::path(dir) / file).string());
            cts.push_back({{"column", ct.column},
                           {"depth", ct.depth},
                           {"repr", reprName(ct.repr)},
                           {"count", ct.tupleCount()},
                           {"file", file}});
        }
        pj["ctables"] = cts;
        m["projections"].push_back(std::move(pj));
    }

    m["views"] = nlohmann::json::array();
    for (const auto& v : cat.views) {
        writeCsv(v.data, (fs::path(dir) / ("view__" + v.def.name + ".csv")).string());
        nlohmann::json aggs = nlohmann::json::array();
        for (const auto& a : v.def.aggs)
            aggs.push_back({{"fn", aggFnName(a.fn)}, {"col", a.column}});
        m["views"].push_back({{"name", v.def.name},
                              {"source", v.def.source},
                              {"sourceKey", v.sourceKey},
                              {"group", v.def.group},
                              {"aggs", aggs},
                              {"columns", columnsJson(v.data.columns)}});
    }

    std::ofstream out(fs::path(dir) / "manifest.json");
    if (!out) throw IoError("cannot write manifest in " + dir);
    out << m.dump(2) << "\n";
}

inline Catalog loadStore(const std::string& dir) {
    namespace fs = std::filesystem;
    std::ifstream in(fs::path(dir) / "manifest.json");
    if (!in) throw IoError("no manifest.json in " + dir);
    nlohmann::json m = nlohmann::json::parse(in);

    auto parseColumns = [](const nlohmann::json& arr) {
        std::vector<ColumnDef> cols;
        for (const auto& c : arr)
            cols.push_back(
                {c.at("name").get<std::string>(), tagFromName(c.at("type").get<std::string>())});
        return cols;
    };

    Catalog cat;
    for (const auto& b : m.at("base")) {
        std::string name = b.at("name").get<std::string>();
        cat.baseTables.emplace(
            name, loadCsv((fs::path(dir) / ("base__" + name + ".csv")).string(),
                          parseColumns(b.at("columns")), name));
    }

    for (const auto& d : m.at("projectionDefs")) {
        ProjectionDef pd;
        pd.name = d.at("name").get<std::string>();
        pd.anchor = d.at("anchor").get<std::string>();
        for (const auto& j : d.at("joins"))
            pd.joins.push_back(JoinStep{j.at("table").get<std::string>(),
                                        j.at("leftKey").get<std::string>(),
                                        j.at("rightKey").get<std::string>()});
        pd.columns = d.at("columns").get<std::vector<std::string>>();
        pd.sort = d.at("sort").get<std::vector<std::string>>();
        cat.projectionDefs.push_back(std::move(pd));
    }

    for (const auto& pj : m.at("projections")) {
        EncodedProjection ep;
        ep.name = pj.at("name").get<std::string>();
        ep.N = pj.at("N").get<uint32_t>();
        ep.sortOrder = pj.at("sortOrder").get<std::vector<std::string>>();
        ep.sourceKey = pj.at("source").get<std::string>();
        ep.overheadBytes = pj.at("overhead").get<int>();

        Table shell(ep.name, parseColumns(pj.at("columns")));
        for (size_t i = 0; i < shell.columns.size(); ++i) {
            if (shell.columns[i].type != ValueTag::Text) continue;
            *shell.dicts[i] =
                pj.at("dictionaries").at(shell.columns[i].name).get<std::vector<std::string>>();
        }

        for (const auto& cj : pj.at("ctables")) {
            CTable ct;
            ct.column = cj.at("column").get<std::string>();
            ct.depth = cj.at("depth").get<int>();
            ct.N = ep.N;
            ct.repr = cj.at("repr").get<std::string>() == "RLE" ? Repr::RLE : Repr::Dense;
            int col = shell.requireColumn(ct.column);
            ct.tag = shell.columns[col].type;
            readCTableFile(ct, cj.at("count").get<size_t>(),
                           (fs::path(dir) / cj.at("file").get<std::string>()).string(),
                           shell.dicts[col].get());
            ep.ctables.push_back(std::move(ct));
        }
        std::sort(ep.ctables.begin(), ep.ctables.end(),
                  [](const CTable& a, const CTable& b) { return a.depth < b.depth; });

        ep.raw = std::move(shell);
        Table decoded = decodeProjection(ep);
        ep.raw.rows = std::move(decoded.rows);
        cat.sourceAliases[ep.name] = ep.sourceKey;
        cat.projections.push_back(std::move(ep));
    }

    for (const auto& vj : m.at("views")) {
        MVTable mv;
        mv.def.name = vj.at("name").get<std::string>();
        mv.def.source = vj.at("source").get<std::string>();
        mv.sourceKey = vj.at("sourceKey").get<std::string>();
        mv.def.group = vj.at("group").get<std::vector<std::string>>();
        for (const auto& a : vj.at("aggs")) {
            AggSpec spec;
            std::string fn = a.at("fn").get<std::string>();
            spec.fn = fn == "COUNT" ? AggFn::CountStar
                      : fn == "SUM" ? AggFn::Sum
                      : fn == "MAX" ? AggFn::Max
                                    : AggFn::Min;
            spec.column = a.at("col").get<std::string>();
            mv.def.aggs.push_back(std::move(spec));
        }
        mv.data = loadCsv((fs::path(dir) / ("view__" + mv.def.name + ".csv")).string(),
                          parseColumns(vj.at("columns")), mv.def.name);
        cat.views.push_back(std::move(mv));
    }
    return cat;
}

}  // namespace ctab
