#pragma once

#include <algorithm>
#include <cstdint>

#include "ctabsim/pred.hpp"
#include "ctabsim/table.hpp"

namespace ctab {

constexpr int kPositionWidth = 4;   // f, id, c are 4-byte unsigned
constexpr int kPageBytes = 8192;

inline uint64_t pagesOf(uint64_t bytes) { return (bytes + kPageBytes - 1) / kPageBytes; }

/// One RLE group: rows at positions f .. f+c-1 all carry value v.
struct Run {
    uint32_t f = 0;  // 1-based start position
    Value v;
    uint32_t c = 0;  // count >= 1

    uint32_t last() const { return f + c - 1; }
};

enum class Repr { RLE, Dense };

inline const char* reprName(Repr r) { return r == Repr::RLE ? "RLE" : "DENSE"; }

/// Dense iff N*(4+w) <= R*(8+w); ties go dense.
inline Repr chooseRepresentation(uint64_t runCount, uint64_t n, int vWidth) {
    const uint64_t dense = n * static_cast<uint64_t>(kPositionWidth + vWidth);
    const uint64_t rle = runCount * static_cast<uint64_t>(2 * kPositionWidth + vWidth);
    return dense <= rle ? Repr::Dense : Repr::RLE;
}

/// Per-column store for one projection column: RLE runs or dense (id, v)
/// entries, f-clustered, plus a secondary ordering by (v, f).
struct CTable {
    std::string column;
    int depth = 1;  // 1-based position in the projection sort order
    ValueTag tag = ValueTag::Int;
    Repr repr = Repr::RLE;
    uint32_t N = 0;
    std::vector<Run> runs;           // RLE only
    std::vector<Value> dense;        // Dense only; entry i covers id i+1
    std::vector<uint32_t> vIndex;    // tuple indices ordered by (v, f)

    int vWidth() const { return tagWidth(tag); }

    size_t tupleCount() const { return repr == Repr::RLE ? runs.size() : dense.size(); }

    /// i-th stored tuple in f order, dense entries viewed as c=1 runs.
    Run runAt(size_t i) const {
        if (repr == Repr::RLE) return runs[i];
        return Run{static_cast<uint32_t>(i + 1), dense[i], 1};
    }

    /// Bytes one stored tuple occupies under the cost model.
    int tupleWidth(int overheadBytes) const {
        return repr == Repr::RLE ? 2 * kPositionWidth + vWidth() + overheadBytes
                                 : kPositionWidth + vWidth() + overheadBytes;
    }

    uint64_t sizeBytes(int overheadBytes) const {
        return static_cast<uint64_t>(tupleCount()) *
               static_cast<uint64_t>(tupleWidth(overheadBytes));
    }

    uint64_t sizePages(int overheadBytes) const { return pagesOf(sizeBytes(overheadBytes)); }

    void buildVIndex() {
        vIndex.resize(tupleCount());
        for (uint32_t i = 0; i < vIndex.size(); ++i) vIndex[i] = i;
        std::stable_sort(vIndex.begin(), vIndex.end(), [&](uint32_t a, uint32_t b) {
            int c = compareValues(runAt(a).v, runAt(b).v);
            if (c != 0) return c < 0;
            return runAt(a).f < runAt(b).f;
        });
    }

    /// All runs intersecting positions [lo, hi], in f order. Binary search on
    /// the f-clustered order plus a forward scan.
    std::vector<Run> seekFRange(uint32_t lo, uint32_t hi) const {
        if (lo < 1 || hi < lo || hi > N)
            throw BoundsError("f-range [" + std::to_string(lo) + "," + std::to_string(hi) +
                              "] out of [1," + std::to_string(N) + "]");
        std::vector<Run> out;
        if (repr == Repr::Dense) {
            for (uint32_t id = lo; id <= hi; ++id)
                out.push_back(Run{id, dense[id - 1], 1});
            return out;
        }
        // first run whose end reaches lo
        auto it = std::lower_bound(runs.begin(), runs.end(), lo,
                                   [](const Run& r, uint32_t pos) { return r.last() < pos; });
        for (; it != runs.end() && it->f <= hi; ++it) out.push_back(*it);
        return out;
    }

    /// All runs whose v satisfies pred, in (v, f) order via the v-index.
    std::vector<Run> seekV(const ValuePred& pred) const {
        if (pred.lo.tag != tag)
            throw SchemaError("predicate literal tag " + std::string(tagName(pred.lo.tag)) +
                              " does not match column tag " + tagName(tag));
        auto vAt = [&](uint32_t idx) { return runAt(idx).v; };
        auto lowerBound = [&](const Value& lit) {
            size_t lo = 0, hi = vIndex.size();
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                if (compareValues(vAt(vIndex[mid]), lit) < 0) lo = mid + 1;
                else hi = mid;
            }
            return lo;
        };
        auto upperBound = [&](const Value& lit) {
            size_t lo = 0, hi = vIndex.size();
            while (lo < hi) {
                size_t mid = (lo + hi) / 2;
                if (compareValues(vAt(vIndex[mid]), lit) <= 0) lo = mid + 1;
                else hi = mid;
            }
            return lo;
        };
        size_t b = 0, e = vIndex.size();
        switch (pred.op) {
            case CompareOp::Eq: b = lowerBound(pred.lo); e = upperBound(pred.lo); break;
            case CompareOp::Lt: e = lowerBound(pred.lo); break;
            case CompareOp::Le: e = upperBound(pred.lo); break;
            case CompareOp::Gt: b = upperBound(pred.lo); break;
            case CompareOp::Ge: b = lowerBound(pred.lo); break;
            case CompareOp::Between:
                b = lowerBound(pred.lo);
                e = upperBound(*pred.hi);
                break;
        }
        std::vector<Run> out;
        if (b > e) return out;
        out.reserve(e - b);
        for (size_t i = b; i < e; ++i) out.push_back(runAt(vIndex[i]));
        return out;
    }

    /// v of the unique run/entry covering position id.
    Value lookupValueAt(uint32_t id) const {
        if (id < 1 || id > N)
            throw BoundsError("id " + std::to_string(id) + " out of [1," + std::to_string(N) + "]");
        if (repr == Repr::Dense) return dense[id - 1];
        auto it = std::lower_bound(runs.begin(), runs.end(), id,
                                   [](const Run& r, uint32_t pos) { return r.last() < pos; });
        return it->v;
    }

    /// Tiling invariant: runs start at 1, abut exactly, and sum to N.
    void verifyTiling() const {
        if (repr == Repr::Dense) {
            if (dense.size() != N) throw CorruptionError(column + ": dense entry count != N");
            return;
        }
        uint64_t next = 1, total = 0;
        for (const Run& r : runs) {
            if (r.c < 1) throw CorruptionError(column + ": zero-length run");
            if (r.f != next)
                throw CorruptionError(column + ": run gap/overlap at f=" + std::to_string(r.f));
            next = r.f + static_cast<uint64_t>(r.c);
            total += r.c;
        }
        if (total != N) throw CorruptionError(column + ": run lengths sum to " +
                                              std::to_string(total) + ", N=" + std::to_string(N));
    }
};

}  // namespace ctab
