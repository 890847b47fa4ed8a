#pragma once

#include <algorithm>
#include <memory>
#include <unordered_map>
#include <vector>

#include "ctabsim/value.hpp"

namespace ctab {

using Row = std::vector<Value>;

enum class Ordering { Less, Equal, Greater };

/// In-memory table. Immutable once loaded; Text columns own their
/// dictionaries via shared_ptr so Values handed out stay valid.
struct Table {
    std::string name;
    std::vector<ColumnDef> columns;
    std::vector<Row> rows;
    std::vector<std::shared_ptr<Dict>> dicts;  // per column, null unless Text

    Table() = default;
    Table(std::string n, std::vector<ColumnDef> cols) : name(std::move(n)), columns(std::move(cols)) {
        for (const auto& c : columns) {
            dicts.push_back(c.type == ValueTag::Text ? std::make_shared<Dict>() : nullptr);
        }
        for (size_t i = 0; i < columns.size(); ++i)
            for (size_t j = i + 1; j < columns.size(); ++j)
                if (columns[i].name == columns[j].name)
                    throw SchemaError("duplicate column name: " + columns[i].name);
    }

    int columnIndex(const std::string& col) const {
        for (size_t i = 0; i < columns.size(); ++i)
            if (columns[i].name == col) return static_cast<int>(i);
        return -1;
    }

    int requireColumn(const std::string& col) const {
        int i = columnIndex(col);
        if (i < 0) throw SchemaError("unknown column: " + col + " in " + name);
        return i;
    }

    size_t rowCount() const { return rows.size(); }

    /// Total bytes of one row under the cost model (no per-tuple overhead).
    int rowWidth() const {
        int w = 0;
        for (const auto& c : columns) w += c.width();
        return w;
    }

    /// Dictionary-encode a string into the column, assigning a fresh code in
    /// first-seen order. Uses a linear probe; encode-time maps live in the
    /// loader, not here.
    Value encodeText(size_t col, const std::string& s) {
        Dict& d = *dicts[col];
        for (uint32_t i = 0; i < d.size(); ++i)
            if (d[i] == s) return Value::Text(i, &d);
        d.push_back(s);
        return Value::Text(static_cast<uint32_t>(d.size() - 1), &d);
    }
};

/// Lexicographic comparison of two rows by the listed column positions.
inline Ordering compareRows(const Row& r1, const Row& r2, const std::vector<int>& order) {
    if (order.empty()) throw PreconditionError("empty sort order");
    for (int pos : order) {
        int c = compareValues(r1[static_cast<size_t>(pos)], r2[static_cast<size_t>(pos)]);
        if (c < 0) return Ordering::Less;
        if (c > 0) return Ordering::Greater;
    }
    return Ordering::Equal;
}

inline void sortRows(std::vector<Row>& rows, const std::vector<int>& order) {
    std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) {
        return compareRows(a, b, order) == Ordering::Less;
    });
}

}  // namespace ctab
