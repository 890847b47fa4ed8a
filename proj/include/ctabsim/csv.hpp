#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "ctabsim/table.hpp"

namespace ctab {

namespace detail {

inline std::vector<std::string> splitCsvLine(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

inline int64_t parseInt(const std::string& s, int lineNo) {
    int64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size())
        throw IngestError("line " + std::to_string(lineNo) + ": bad integer '" + s + "'");
    return v;
}

}  // namespace detail

/// Load a headered CSV against a fixed schema. Text columns are
/// dictionary-encoded in first-seen order; dates are ISO YYYY-MM-DD.
inline Table loadCsv(const std::string& path, const std::vector<ColumnDef>& schema,
                     const std::string& tableName = "") {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open " + path);

    Table t(tableName.empty() ? path : tableName, schema);

    std::string line;
    if (!std::getline(in, line)) throw IngestError(path + ": missing header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    auto header = detail::splitCsvLine(line);
    if (header.size() != schema.size())
        throw IngestError(path + ": header arity " + std::to_string(header.size()) +
                          " != schema arity " + std::to_string(schema.size()));
    for (size_t i = 0; i < header.size(); ++i)
        if (header[i] != schema[i].name)
            throw IngestError(path + ": header column '" + header[i] + "' != schema '" +
                              schema[i].name + "'");

    // encode maps speed up dictionary lookups during the load only
    std::vector<std::unordered_map<std::string, uint32_t>> enc(schema.size());

    int lineNo = 1;
    while (std::getline(in, line)) {
        ++lineNo;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = detail::splitCsvLine(line);
        if (fields.size() != schema.size())
            throw IngestError("line " + std::to_string(lineNo) + ": expected " +
                              std::to_string(schema.size()) + " fields, got " +
                              std::to_string(fields.size()));
        Row row;
        row.reserve(schema.size());
        for (size_t c = 0; c < schema.size(); ++c) {
            const std::string& s = fields[c];
            switch (schema[c].type) {
                case ValueTag::Int:
                    row.push_back(Value::Int(detail::parseInt(s, lineNo)));
                    break;
                case ValueTag::Money:
                    row.push_back(Value::Money(detail::parseInt(s, lineNo)));
                    break;
                case ValueTag::Date:
                    try {
                        row.push_back(Value::Date(parseDateDays(s)));
                    } catch (const IngestError&) {
                        throw IngestError("line " + std::to_string(lineNo) + ": bad date '" + s +
                                          "'");
                    }
                    break;
                case ValueTag::Text: {
                    Dict& d = *t.dicts[c];
                    auto it = enc[c].find(s);
                    uint32_t code;
                    if (it == enc[c].end()) {
                        code = static_cast<uint32_t>(d.size());
                        d.push_back(s);
                        enc[c].emplace(s, code);
                    } else {
                        code = it->second;
                    }
                    row.push_back(Value::Text(code, &d));
                    break;
                }
            }
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

inline void writeCsv(const Table& t, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    for (size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << t.columns[i].name;
    out << "\n";
    for (const Row& r : t.rows) {
        for (size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i].toString();
        out << "\n";
    }
}

}  // namespace ctab
