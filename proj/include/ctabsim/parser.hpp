#pragma once

#include <cctype>

#include "ctabsim/catalog.hpp"
#include "ctabsim/query.hpp"

namespace ctab {

namespace detail {

enum class TokKind { Ident, Number, String, Punct, End };

struct Token {
    TokKind kind;
    std::string text;  // idents uppercased separately on demand
    size_t pos;        // byte offset in the input
};

struct Lexer {
    const std::string& src;
    size_t i = 0;
    std::vector<Token> toks;

    explicit Lexer(const std::string& s) : src(s) { run(); }

    [[noreturn]] void fail(size_t pos, const std::string& msg) const {
        throw ParseError("at position " + std::to_string(pos) + ": " + msg);
    }

    void run() {
        while (i < src.size()) {
            char c = src[i];
            if (std::isspace(static_cast<unsigned char>(c))) { ++i; continue; }
            size_t start = i;
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
                while (i < src.size() &&
                       (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_'))
                    ++i;
                toks.push_back({TokKind::Ident, src.substr(start, i - start), start});
            } else if (std::isdigit(static_cast<unsigned char>(c)) ||
                       (c == '-' && i + 1 < src.size() &&
                        std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
                ++i;
                while (i < src.size() && std::isdigit(static_cast<unsigned char>(src[i]))) ++i;
                toks.push_back({TokKind::Number, src.substr(start, i - start), start});
            } else if (c == '\'') {
                ++i;
                while (i < src.size() && src[i] != '\'') ++i;
                if (i >= src.size()) fail(start, "unterminated string literal");
                toks.push_back({TokKind::String, src.substr(start + 1, i - start - 1), start});
                ++i;
            } else if (c == '<' || c == '>') {
                ++i;
                if (i < src.size() && src[i] == '=') ++i;
                toks.push_back({TokKind::Punct, src.substr(start, i - start), start});
            } else if (c == '=' || c == ',' || c == '(' || c == ')' || c == '*') {
                ++i;
                toks.push_back({TokKind::Punct, std::string(1, c), start});
            } else {
                fail(start, std::string("unexpected character '") + c + "'");
            }
        }
        toks.push_back({TokKind::End, "", src.size()});
    }
};

inline std::string upper(std::string s) {
    for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace detail

/// Recursive-descent parser for the supported subset:
///   SELECT items FROM name [WHERE conj] [GROUP BY cols]
/// items are plain columns or COUNT(*) / SUM / MAX / MIN / AVG over a column.
class QueryParser {
  public:
    QueryParser(const std::string& text, const Catalog& catalog)
        : lex_(text), catalog_(catalog) {}

    Query parse() {
        Query q;
        q.literalDict = std::make_shared<Dict>();
        expectKeyword("SELECT");
        parseSelectList(q);
        expectKeyword("FROM");
        detail::Token src = expect(detail::TokKind::Ident, "table name");
        try {
            q.source = catalog_.resolveSource(src.text);
        } catch (const SchemaError& e) {
            fail(src.pos, e.what());
        }
        schema_ = catalog_.sourceSchema(q.source);
        if (atKeyword("WHERE")) {
            next();
            parseConjunction(q);
        }
        if (atKeyword("GROUP")) {
            next();
            expectKeyword("BY");
            while (true) {
                q.groupBy.push_back(expect(detail::TokKind::Ident, "group column").text);
                if (!atPunct(",")) break;
                next();
            }
        }
        expect(detail::TokKind::End, "end of query");
        try {
            q.validate(schema_);
        } catch (const SchemaError& e) {
            fail(lex_.src.size(), e.what());
        }
        return q;
    }

  private:
    detail::Lexer lex_;
    const Catalog& catalog_;
    std::vector<ColumnDef> schema_;
    size_t p_ = 0;

    const detail::Token& cur() const { return lex_.toks[p_]; }
    void next() { ++p_; }

    [[noreturn]] void fail(size_t pos, const std::string& msg) const {
        throw ParseError("at position " + std::to_string(pos) + ": " + msg);
    }

    bool atKeyword(const char* kw) const {
        return cur().kind == detail::TokKind::Ident && detail::upper(cur().text) == kw;
    }
    bool atPunct(const char* s) const {
        return cur().kind == detail::TokKind::Punct && cur().text == s;
    }
    void expectKeyword(const char* kw) {
        if (!atKeyword(kw)) fail(cur().pos, std::string("expected ") + kw);
        next();
    }
    detail::Token expect(detail::TokKind k, const char* what) {
        if (cur().kind != k) fail(cur().pos, std::string("expected ") + what);
        detail::Token t = cur();
        next();
        return t;
    }

    static bool isAggName(const std::string& u) {
        return u == "COUNT" || u == "SUM" || u == "MAX" || u == "MIN" || u == "AVG";
    }

    void parseSelectList(Query& q) {
        while (true) {
            detail::Token t = expect(detail::TokKind::Ident, "select item");
            std::string u = detail::upper(t.text);
            if (isAggName(u) && atPunct("(")) {
                next();
                if (u == "COUNT") {
                    if (!atPunct("*")) fail(cur().pos, "COUNT supports only COUNT(*)");
                    next();
                    q.selects.push_back(SelectItem::agg(AggFn::CountStar));
                } else {
                    detail::Token col = expect(detail::TokKind::Ident, "aggregate column");
                    AggFn fn = u == "SUM"   ? AggFn::Sum
                               : u == "MAX" ? AggFn::Max
                               : u == "MIN" ? AggFn::Min
                                            : AggFn::Avg;
                    q.selects.push_back(SelectItem::agg(fn, col.text));
                }
                if (!atPunct(")")) fail(cur().pos, "expected )");
                next();
            } else {
                q.selects.push_back(SelectItem::col(t.text));
            }
            if (!atPunct(",")) break;
            next();
        }
    }

    ValueTag columnTag(const std::string& col, size_t pos) const {
        for (const auto& cd : schema_)
            if (cd.name == col) return cd.type;
        fail(pos, "unknown column: " + col);
    }

    Value parseLiteral(Query& q, ValueTag tag) {
        const detail::Token t = cur();
        if (t.kind == detail::TokKind::Number) {
            next();
            int64_t n = std::stoll(t.text);
            switch (tag) {
                case ValueTag::Int: return Value::Int(n);
                case ValueTag::Money: return Value::Money(n);
                default: fail(t.pos, "numeric literal for non-numeric column");
            }
        }
        if (t.kind == detail::TokKind::String) {
            next();
            if (tag == ValueTag::Date) {
                try {
                    return Value::Date(parseDateDays(t.text));
                } catch (const IngestError& e) {
                    fail(t.pos, e.what());
                }
            }
            if (tag == ValueTag::Text) return q.encodeTextLiteral(t.text);
            fail(t.pos, "string literal for non-text column");
        }
        fail(t.pos, "expected literal");
    }

    void parseConjunction(Query& q) {
        while (true) {
            detail::Token col = expect(detail::TokKind::Ident, "filter column");
            ValueTag tag = columnTag(col.text, col.pos);
            Predicate p;
            p.column = col.text;
            if (atKeyword("BETWEEN")) {
                next();
                p.pred.op = CompareOp::Between;
                p.pred.lo = parseLiteral(q, tag);
                expectKeyword("AND");
                p.pred.hi = parseLiteral(q, tag);
            } else {
                detail::Token op = expect(detail::TokKind::Punct, "comparison operator");
                if (op.text == "=") p.pred.op = CompareOp::Eq;
                else if (op.text == "<") p.pred.op = CompareOp::Lt;
                else if (op.text == ">") p.pred.op = CompareOp::Gt;
                else if (op.text == "<=") p.pred.op = CompareOp::Le;
                else if (op.text == ">=") p.pred.op = CompareOp::Ge;
                else fail(op.pos, "unknown comparison operator " + op.text);
                p.pred.lo = parseLiteral(q, tag);
            }
            q.filters.push_back(std::move(p));
            if (atKeyword("OR"))
                fail(cur().pos, "disjunctive WHERE is not supported");
            if (!atKeyword("AND")) break;
            next();
        }
    }
};

inline Query parseQuery(const std::string& text, const Catalog& catalog) {
    return QueryParser(text, catalog).parse();
}

}  // namespace ctab
