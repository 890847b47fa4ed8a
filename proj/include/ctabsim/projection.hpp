#pragma once

#include <numeric>
#include <set>

#include "ctabsim/ctable.hpp"

namespace ctab {

constexpr int kRowStoreOverheadBytes = 9;  // per-tuple overhead of the emulated row store

/// A pre-joined table materialized column-wise under a full sort order.
struct EncodedProjection {
    std::string name;
    uint32_t N = 0;
    std::vector<std::string> sortOrder;   // permutation of raw's columns
    std::vector<CTable> ctables;          // ordered by depth (1-based)
    Table raw;                            // the sorted row form
    int overheadBytes = 0;                // theta charged to c-table tuples
    std::string sourceKey;                // logical source this projection embodies

    const CTable* findCTable(const std::string& col) const {
        for (const auto& ct : ctables)
            if (ct.column == col) return &ct;
        return nullptr;
    }

    const CTable& ctableFor(const std::string& col) const {
        const CTable* ct = findCTable(col);
        if (!ct) throw SchemaError("column " + col + " not in projection " + name);
        return *ct;
    }

    int depthOf(const std::string& col) const { return ctableFor(col).depth; }
};

/// Encode a sorted table into per-column c-tables. Runs at depth k are the
/// maximal blocks of consecutive rows agreeing on all sort columns 1..k.
inline EncodedProjection encodeProjection(const Table& raw,
                                          const std::vector<std::string>& sortOrder,
                                          int overheadBytes = 0) {
    if (sortOrder.size() != raw.columns.size())
        throw PreconditionError("sort order must cover every column exactly once");
    std::vector<int> orderIdx;
    std::set<std::string> seen;
    for (const auto& col : sortOrder) {
        if (!seen.insert(col).second)
            throw PreconditionError("duplicate column in sort order: " + col);
        orderIdx.push_back(raw.requireColumn(col));
    }
    const uint32_t n = static_cast<uint32_t>(raw.rows.size());
    for (uint32_t i = 1; i < n; ++i)
        if (compareRows(raw.rows[i - 1], raw.rows[i], orderIdx) == Ordering::Greater)
            throw PreconditionError("input not sorted by declared order at row " +
                                    std::to_string(i + 1));

    EncodedProjection ep;
    ep.name = raw.name;
    ep.N = n;
    ep.sortOrder = sortOrder;
    ep.raw = raw;
    ep.overheadBytes = overheadBytes;
    ep.sourceKey = raw.name;

    // boundary[i]: row i starts a new group of the columns at depths <= k;
    // refined one depth at a time.
    std::vector<char> boundary(n, 0);
    if (n > 0) boundary[0] = 1;

    for (size_t k = 0; k < sortOrder.size(); ++k) {
        const int col = orderIdx[k];
        for (uint32_t i = 1; i < n; ++i)
            if (!boundary[i] && !valueEq(raw.rows[i - 1][col], raw.rows[i][col])) boundary[i] = 1;

        std::vector<Run> runs;
        uint32_t start = 0;
        for (uint32_t i = 1; i <= n; ++i) {
            if (i == n || boundary[i]) {
                runs.push_back(Run{start + 1, raw.rows[start][col], i - start});
                start = i;
            }
        }

        CTable ct;
        ct.column = sortOrder[k];
        ct.depth = static_cast<int>(k) + 1;
        ct.tag = raw.columns[col].type;
        ct.N = n;
        ct.repr = chooseRepresentation(runs.size(), n, ct.vWidth());
        if (ct.repr == Repr::RLE) {
            ct.runs = std::move(runs);
        } else {
            ct.dense.reserve(n);
            for (uint32_t i = 0; i < n; ++i) ct.dense.push_back(raw.rows[i][col]);
        }
        ct.buildVIndex();
        ct.verifyTiling();
        ep.ctables.push_back(std::move(ct));
    }
    return ep;
}

/// Inverse of encodeProjection: reproduces the sorted row form.
inline Table decodeProjection(const EncodedProjection& ep) {
    Table t(ep.raw.name, ep.raw.columns);
    t.dicts = ep.raw.dicts;
    t.rows.assign(ep.N, Row(ep.raw.columns.size()));
    for (const CTable& ct : ep.ctables) {
        ct.verifyTiling();
        const int col = t.requireColumn(ct.column);
        for (size_t i = 0; i < ct.tupleCount(); ++i) {
            Run r = ct.runAt(i);
            if (r.f < 1 || r.last() > ep.N)
                throw CorruptionError(ct.column + ": run exceeds table bounds");
            for (uint32_t id = r.f; id <= r.last(); ++id) t.rows[id - 1][col] = r.v;
        }
    }
    return t;
}

/// Bytes any column store must read to scan the referenced columns fully
/// compressed, with no filtering or aggregation cost.
inline uint64_t colOptLowerBound(const EncodedProjection& ep,
                                 const std::vector<std::string>& referencedColumns) {
    uint64_t total = 0;
    for (const auto& col : referencedColumns) total += ep.ctableFor(col).sizeBytes(0);
    return total;
}

}  // namespace ctab
