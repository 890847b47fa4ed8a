#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ctabsim/errors.hpp"

namespace ctab {

enum class ValueTag : uint8_t { Int, Date, Text, Money };

/// Per-column dictionary: code -> string, codes dense 0..cardinality-1.
using Dict = std::vector<std::string>;

inline const char* tagName(ValueTag t) {
    switch (t) {
        case ValueTag::Int: return "Int";
        case ValueTag::Date: return "Date";
        case ValueTag::Text: return "Text";
        case ValueTag::Money: return "Money";
    }
    return "?";
}

inline ValueTag tagFromName(const std::string& s) {
    if (s == "Int") return ValueTag::Int;
    if (s == "Date") return ValueTag::Date;
    if (s == "Text") return ValueTag::Text;
    if (s == "Money") return ValueTag::Money;
    throw SchemaError("unknown value tag: " + s);
}

/// Bytes charged per value by the cost model.
inline int tagWidth(ValueTag t) {
    switch (t) {
        case ValueTag::Int: return 8;
        case ValueTag::Date: return 4;
        case ValueTag::Text: return 4;
        case ValueTag::Money: return 8;
    }
    return 0;
}

// Day arithmetic (proleptic Gregorian), anchored at 1992-01-01.
namespace detail {

inline int64_t daysFromCivil(int y, unsigned m, unsigned d) {
    y -= m <= 2;
    const int era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return static_cast<int64_t>(era) * 146097 + static_cast<int64_t>(doe) - 719468;
}

inline void civilFromDays(int64_t z, int& y, unsigned& m, unsigned& d) {
    z += 719468;
    const int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const int64_t yr = static_cast<int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp + (mp < 10 ? 3 : -9);
    y = static_cast<int>(yr + (m <= 2));
}

inline const int64_t kEpochDays = daysFromCivil(1992, 1, 1);

}  // namespace detail

/// Days since 1992-01-01 for an ISO `YYYY-MM-DD` string.
inline int32_t parseDateDays(const std::string& s) {
    if (s.size() != 10 || s[4] != '-' || s[7] != '-')
        throw IngestError("bad date literal: '" + s + "'");
    for (size_t i = 0; i < s.size(); ++i)
        if (i != 4 && i != 7 && (s[i] < '0' || s[i] > '9'))
            throw IngestError("bad date literal: '" + s + "'");
    int y = std::stoi(s.substr(0, 4));
    unsigned m = static_cast<unsigned>(std::stoi(s.substr(5, 2)));
    unsigned d = static_cast<unsigned>(std::stoi(s.substr(8, 2)));
    if (m < 1 || m > 12 || d < 1 || d > 31)
        throw IngestError("bad date literal: '" + s + "'");
    return static_cast<int32_t>(detail::daysFromCivil(y, m, d) - detail::kEpochDays);
}

inline std::string formatDateDays(int32_t days) {
    int y;
    unsigned m, d;
    detail::civilFromDays(days + detail::kEpochDays, y, m, d);
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", y, m, d);
    return buf;
}

/// A scalar value. Text carries its dictionary so ordering is by decoded
/// string; the owning Table keeps the dictionary alive.
struct Value {
    ValueTag tag = ValueTag::Int;
    int64_t num = 0;              // Int/Money: value; Date: day offset; Text: code
    const Dict* dict = nullptr;   // Text only

    static Value Int(int64_t v) { return {ValueTag::Int, v, nullptr}; }
    static Value Date(int32_t days) { return {ValueTag::Date, days, nullptr}; }
    static Value Money(int64_t cents) { return {ValueTag::Money, cents, nullptr}; }
    static Value Text(uint32_t code, const Dict* d) {
        return {ValueTag::Text, static_cast<int64_t>(code), d};
    }

    const std::string& text() const {
        if (tag != ValueTag::Text || !dict) throw SchemaError("not a text value");
        return (*dict)[static_cast<size_t>(num)];
    }

    std::string toString() const {
        switch (tag) {
            case ValueTag::Int: return std::to_string(num);
            case ValueTag::Money: return std::to_string(num);
            case ValueTag::Date: return formatDateDays(static_cast<int32_t>(num));
            case ValueTag::Text: return text();
        }
        return "?";
    }
};

/// Three-way comparison; tags must match.
inline int compareValues(const Value& a, const Value& b) {
    if (a.tag != b.tag)
        throw SchemaError(std::string("cannot compare ") + tagName(a.tag) + " with " +
                          tagName(b.tag));
    if (a.tag == ValueTag::Text) {
        if (a.dict == b.dict && a.num == b.num) return 0;
        const std::string& sa = a.text();
        const std::string& sb = b.text();
        return sa < sb ? -1 : (sa == sb ? 0 : 1);
    }
    return a.num < b.num ? -1 : (a.num == b.num ? 0 : 1);
}

inline bool valueEq(const Value& a, const Value& b) { return compareValues(a, b) == 0; }
inline bool valueLt(const Value& a, const Value& b) { return compareValues(a, b) < 0; }

struct ColumnDef {
    std::string name;
    ValueTag type = ValueTag::Int;

    int width() const { return tagWidth(type); }
};

}  // namespace ctab
