#pragma once

#include <optional>

#include "ctabsim/value.hpp"

namespace ctab {

enum class CompareOp { Eq, Lt, Gt, Le, Ge, Between };

inline const char* opText(CompareOp op) {
    switch (op) {
        case CompareOp::Eq: return "=";
        case CompareOp::Lt: return "<";
        case CompareOp::Gt: return ">";
        case CompareOp::Le: return "<=";
        case CompareOp::Ge: return ">=";
        case CompareOp::Between: return "BETWEEN";
    }
    return "?";
}

/// A comparison against literal(s), detached from any column binding.
struct ValuePred {
    CompareOp op = CompareOp::Eq;
    Value lo;                  // sole literal for everything but BETWEEN
    std::optional<Value> hi;   // BETWEEN upper bound

    bool matches(const Value& v) const {
        int c = compareValues(v, lo);
        switch (op) {
            case CompareOp::Eq: return c == 0;
            case CompareOp::Lt: return c < 0;
            case CompareOp::Gt: return c > 0;
            case CompareOp::Le: return c <= 0;
            case CompareOp::Ge: return c >= 0;
            case CompareOp::Between: return c >= 0 && compareValues(v, *hi) <= 0;
        }
        return false;
    }
};

}  // namespace ctab
