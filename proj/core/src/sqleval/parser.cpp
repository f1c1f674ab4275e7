#include "starsql/sqleval/parser.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>

#include "starsql/sqleval/tokenizer.hpp"
#include "starsql/util/text.hpp"

namespace starsql::sqleval {

SchemaIndex::SchemaIndex(const corpus::DbSchema& schema) {
    id_map_["*"] = "__all__";
    for (const auto& t : schema.tables) {
        std::string tname = util::to_lower(t.name);
        auto& cols = columns_[tname];
        for (const auto& c : t.columns) {
            std::string cname = util::to_lower(c.name);
            cols.push_back(cname);
            id_map_[tname + "." + cname] = "__" + tname + "." + cname + "__";
        }
        table_names_.push_back(tname);
    }
    for (const auto& t : table_names_) id_map_[t] = "__" + t + "__";
}

const std::vector<std::string>* SchemaIndex::columns(const std::string& table) const {
    auto it = columns_.find(table);
    return it == columns_.end() ? nullptr : &it->second;
}

const std::string* SchemaIndex::id(const std::string& key) const {
    auto it = id_map_.find(key);
    return it == id_map_.end() ? nullptr : &it->second;
}

std::optional<double> parse_number_token(std::string_view tok) {
    std::size_t i = 0;
    const std::size_t n = tok.size();
    if (i < n && (tok[i] == '+' || tok[i] == '-')) ++i;
    std::string_view body = tok.substr(i);
    if (body == "inf" || body == "infinity") return tok[0] == '-' ? -HUGE_VAL : HUGE_VAL;
    if (body == "nan") return std::nan("");

    // digitpart := digit ("_"? digit)*
    auto digitpart = [&](std::size_t& p) {
        if (p >= n || !std::isdigit(static_cast<unsigned char>(tok[p]))) return false;
        ++p;
        while (p < n) {
            if (std::isdigit(static_cast<unsigned char>(tok[p]))) {
                ++p;
            } else if (tok[p] == '_' && p + 1 < n && std::isdigit(static_cast<unsigned char>(tok[p + 1]))) {
                p += 2;
            } else {
                break;
            }
        }
        return true;
    };
    std::size_t p = i;
    bool int_part = digitpart(p);
    if (p < n && tok[p] == '.') {
        ++p;
        std::size_t q = p;
        bool frac = digitpart(q);
        if (!int_part && !frac) return std::nullopt;
        p = q;
    } else if (!int_part) {
        return std::nullopt;
    }
    if (p < n && tok[p] == 'e') {
        ++p;
        if (p < n && (tok[p] == '+' || tok[p] == '-')) ++p;
        if (!digitpart(p)) return std::nullopt;
    }
    if (p != n) return std::nullopt;
    std::string clean;
    for (char c : tok) {
        if (c != '_') clean.push_back(c);
    }
    return std::strtod(clean.c_str(), nullptr);
}

namespace {

using Toks = std::vector<std::string>;

constexpr std::string_view kClauseKeywords[] = {"select", "from",      "where", "group", "order",
                                               "limit",  "intersect", "union", "except"};
constexpr std::string_view kJoinKeywords[] = {"join", "on", "as"};
constexpr std::string_view kSqlOps[] = {"intersect", "union", "except"};

template <std::size_t N>
bool in(const std::string& tok, const std::string_view (&set)[N]) {
    return std::find(std::begin(set), std::end(set), tok) != std::end(set);
}

template <std::size_t N>
int index_of(const std::string& tok, const char* const (&set)[N]) {
    for (std::size_t i = 0; i < N; ++i) {
        if (tok == set[i]) return static_cast<int>(i);
    }
    return -1;
}

bool is_clause(const std::string& t) { return in(t, kClauseKeywords); }
bool is_join(const std::string& t) { return in(t, kJoinKeywords); }

using AliasMap = std::map<std::string, std::string>;

class Parser {
public:
    Parser(const SchemaIndex& schema, AliasMap aliases) : schema_(schema), aliases_(std::move(aliases)) {}

    std::size_t parse_sql(const Toks& toks, std::size_t start, Query& out) const {
        bool block = false;
        std::size_t idx = start;
        if (at(toks, idx) == "(") {
            block = true;
            ++idx;
        }
        std::vector<std::string> default_tables;
        std::size_t from_end = parse_from(toks, start, out, default_tables);
        parse_select(toks, idx, out, default_tables);
        idx = from_end;
        idx = parse_where(toks, idx, out.where, default_tables);
        idx = parse_group_by(toks, idx, out.group_by, default_tables);
        idx = parse_having(toks, idx, out.having, default_tables);
        idx = parse_order_by(toks, idx, out.order_by, default_tables);
        if (idx < toks.size() && toks[idx] == "limit") {
            idx += 2;
            out.limit = true;
        }
        idx = skip_semicolon(toks, idx);
        if (block) {
            expect(toks, idx, ")");
            ++idx;
        }
        idx = skip_semicolon(toks, idx);
        if (idx < toks.size() && in(toks[idx], kSqlOps)) {
            std::string op = toks[idx];
            ++idx;
            Query sub;
            idx = parse_sql(toks, idx, sub);
            if (op == "intersect") out.intersect = std::move(sub);
            else if (op == "union") out.union_ = std::move(sub);
            else out.except_ = std::move(sub);
        }
        return idx;
    }

private:
    const SchemaIndex& schema_;
    AliasMap aliases_;

    static const std::string& at(const Toks& toks, std::size_t idx) {
        if (idx >= toks.size()) throw ParseError(idx, "unexpected end of query");
        return toks[idx];
    }

    static void expect(const Toks& toks, std::size_t idx, std::string_view want) {
        if (at(toks, idx) != want) {
            throw ParseError(idx, "expected '" + std::string(want) + "', found '" + toks[idx] + "'");
        }
    }

    static std::size_t skip_semicolon(const Toks& toks, std::size_t idx) {
        while (idx < toks.size() && toks[idx] == ";") ++idx;
        return idx;
    }

    const std::string& alias_target(const std::string& alias, std::size_t pos) const {
        auto it = aliases_.find(alias);
        if (it == aliases_.end()) {
            if (alias == "," || alias == "left" || alias == "right" || alias == "inner" || alias == "outer" ||
                alias == "cross" || alias == "natural") {
                throw UnsupportedConstruct(pos, alias);
            }
            throw ParseError(pos, "unknown table or alias '" + alias + "'");
        }
        return it->second;
    }

    const std::string& lookup_id(const std::string& key, std::size_t pos) const {
        const std::string* id = schema_.id(key);
        if (!id) throw ParseError(pos, "unknown identifier '" + key + "'");
        return *id;
    }

    std::size_t parse_col(const Toks& toks, std::size_t idx, std::string& col_id,
                          const std::vector<std::string>& default_tables) const {
        const std::string& tok = at(toks, idx);
        if (tok == "*") {
            col_id = lookup_id(tok, idx);
            return idx + 1;
        }
        if (auto dot = tok.find('.'); dot != std::string::npos) {
            if (tok.find('.', dot + 1) != std::string::npos) throw ParseError(idx, "malformed column '" + tok + "'");
            std::string alias = tok.substr(0, dot);
            std::string col = tok.substr(dot + 1);
            col_id = lookup_id(alias_target(alias, idx) + "." + col, idx);
            return idx + 1;
        }
        if (default_tables.empty()) throw ParseError(idx, "column '" + tok + "' outside any FROM scope");
        for (const auto& alias : default_tables) {
            const std::string& table = alias_target(alias, idx);
            const auto* cols = schema_.columns(table);
            if (!cols) throw ParseError(idx, "unknown table '" + table + "'");
            if (std::find(cols->begin(), cols->end(), tok) != cols->end()) {
                col_id = lookup_id(table + "." + tok, idx);
                return idx + 1;
            }
        }
        throw ParseError(idx, "unknown column '" + tok + "'");
    }

    std::size_t parse_col_unit(const Toks& toks, std::size_t idx, ColUnit& out,
                               const std::vector<std::string>& default_tables) const {
        bool block = false;
        if (at(toks, idx) == "(") {
            block = true;
            ++idx;
        }
        if (int agg = index_of(at(toks, idx), kAggOps); agg >= 0) {
            ++idx;
            if (idx >= toks.size() || toks[idx] != "(") throw ParseError(idx, "expected '(' after aggregate");
            ++idx;
            if (at(toks, idx) == "distinct") {
                ++idx;
                out.distinct = true;
            }
            out.agg = agg;
            idx = parse_col(toks, idx, out.col_id, default_tables);
            if (idx >= toks.size() || toks[idx] != ")") throw ParseError(idx, "expected ')' after aggregate");
            return idx + 1;
        }
        if (toks[idx] == "distinct") {
            ++idx;
            out.distinct = true;
        }
        out.agg = kAggNone;
        idx = parse_col(toks, idx, out.col_id, default_tables);
        if (block) {
            expect(toks, idx, ")");
            ++idx;
        }
        return idx;
    }

    std::size_t parse_val_unit(const Toks& toks, std::size_t idx, ValUnit& out,
                               const std::vector<std::string>& default_tables) const {
        bool block = false;
        if (at(toks, idx) == "(") {
            block = true;
            ++idx;
        }
        idx = parse_col_unit(toks, idx, out.col1, default_tables);
        if (idx < toks.size()) {
            if (int op = index_of(toks[idx], kUnitOps); op >= 0) {
                out.unit_op = op;
                ++idx;
                out.col2.emplace();
                idx = parse_col_unit(toks, idx, *out.col2, default_tables);
            }
        }
        if (block) {
            expect(toks, idx, ")");
            ++idx;
        }
        return idx;
    }

    std::size_t parse_table_unit(const Toks& toks, std::size_t idx, TableUnit& out, std::string& name) const {
        name = alias_target(at(toks, idx), idx);
        std::size_t start = idx;
        if (idx + 1 < toks.size() && toks[idx + 1] == "as") idx += 3;
        else idx += 1;
        out.is_sql = false;
        out.table_id = lookup_id(name, start);
        return idx;
    }

    std::size_t parse_value(const Toks& toks, std::size_t start, Value& out,
                            const std::vector<std::string>& default_tables) const {
        std::size_t idx = start;
        bool block = false;
        if (at(toks, idx) == "(") {
            block = true;
            ++idx;
        }
        const std::string& tok = at(toks, idx);
        if (tok == "select") {
            Query sub;
            idx = parse_sql(toks, idx, sub);
            out = Boxed<Query>(std::move(sub));
        } else if (tok.find('"') != std::string::npos) {
            out = Literal{Literal::Kind::string, tok, 0, false};
            ++idx;
        } else if (auto num = parse_number_token(tok)) {
            out = Literal{Literal::Kind::number, tok, *num, false};
            ++idx;
        } else {
            std::size_t end = idx;
            while (end < toks.size() && toks[end] != "," && toks[end] != ")" && toks[end] != "and" &&
                   !is_clause(toks[end]) && !is_join(toks[end])) {
                ++end;
            }
            Toks slice(toks.begin() + static_cast<std::ptrdiff_t>(start), toks.begin() + static_cast<std::ptrdiff_t>(end));
            ColUnit c;
            parse_col_unit(slice, 0, c, default_tables);
            out = std::move(c);
            idx = end;
        }
        if (block) {
            expect(toks, idx, ")");
            ++idx;
        }
        return idx;
    }

    std::size_t parse_condition(const Toks& toks, std::size_t idx, Condition& out,
                                const std::vector<std::string>& default_tables) const {
        while (idx < toks.size()) {
            CondUnit unit;
            idx = parse_val_unit(toks, idx, unit.val_unit, default_tables);
            if (at(toks, idx) == "not") {
                unit.not_op = true;
                ++idx;
            }
            int op = idx < toks.size() ? index_of(toks[idx], kWhereOps) : -1;
            if (op < 0) {
                throw ParseError(idx, idx < toks.size() ? "expected comparison operator, found '" + toks[idx] + "'"
                                                        : "expected comparison operator");
            }
            unit.op_id = op;
            ++idx;
            idx = parse_value(toks, idx, unit.val1, default_tables);
            if (op == kOpBetween) {
                expect(toks, idx, "and");
                ++idx;
                idx = parse_value(toks, idx, unit.val2, default_tables);
            }
            out.units.push_back(std::move(unit));
            if (idx < toks.size() &&
                (is_clause(toks[idx]) || toks[idx] == ")" || toks[idx] == ";" || is_join(toks[idx]))) {
                break;
            }
            if (idx < toks.size() && (toks[idx] == "and" || toks[idx] == "or")) {
                out.connectors.push_back(toks[idx]);
                ++idx;
            }
        }
        return idx;
    }

    void parse_select(const Toks& toks, std::size_t idx, Query& out,
                      const std::vector<std::string>& default_tables) const {
        expect(toks, idx, "select");
        ++idx;
        if (idx < toks.size() && toks[idx] == "distinct") {
            ++idx;
            out.distinct = true;
        }
        while (idx < toks.size() && !is_clause(toks[idx])) {
            SelectItem item;
            if (int agg = index_of(toks[idx], kAggOps); agg >= 0) {
                item.agg = agg;
                ++idx;
            }
            idx = parse_val_unit(toks, idx, item.val_unit, default_tables);
            out.select.push_back(std::move(item));
            if (idx < toks.size() && toks[idx] == ",") ++idx;
        }
    }

    std::size_t parse_from(const Toks& toks, std::size_t start, Query& out,
                           std::vector<std::string>& default_tables) const {
        auto it = std::find(toks.begin() + static_cast<std::ptrdiff_t>(std::min(start, toks.size())), toks.end(),
                            "from");
        if (it == toks.end()) throw ParseError(start, "'from' not found");
        std::size_t idx = static_cast<std::size_t>(it - toks.begin()) + 1;
        while (idx < toks.size()) {
            bool block = false;
            if (toks[idx] == "(") {
                block = true;
                ++idx;
            }
            if (at(toks, idx) == "select") {
                Query sub;
                idx = parse_sql(toks, idx, sub);
                TableUnit tu;
                tu.is_sql = true;
                tu.sql = std::move(sub);
                out.table_units.push_back(std::move(tu));
            } else {
                if (idx < toks.size() && toks[idx] == "join") ++idx;
                TableUnit tu;
                std::string name;
                idx = parse_table_unit(toks, idx, tu, name);
                out.table_units.push_back(std::move(tu));
                default_tables.push_back(name);
            }
            if (idx < toks.size() && toks[idx] == "on") {
                ++idx;
                Condition conds;
                idx = parse_condition(toks, idx, conds, default_tables);
                if (!out.from_conds.units.empty() || !out.from_conds.connectors.empty()) {
                    out.from_conds.connectors.push_back("and");
                }
                append_flat(out.from_conds, conds);
            }
            if (block) {
                expect(toks, idx, ")");
                ++idx;
            }
            if (idx < toks.size() && (is_clause(toks[idx]) || toks[idx] == ")" || toks[idx] == ";")) break;
        }
        return idx;
    }

    static void append_flat(Condition& dst, Condition& src) {
        for (std::size_t i = 0; i < src.units.size(); ++i) {
            dst.units.push_back(std::move(src.units[i]));
            if (i < src.connectors.size()) dst.connectors.push_back(std::move(src.connectors[i]));
        }
    }

    std::size_t parse_where(const Toks& toks, std::size_t idx, Condition& out,
                            const std::vector<std::string>& default_tables) const {
        if (idx >= toks.size() || toks[idx] != "where") return idx;
        return parse_condition(toks, idx + 1, out, default_tables);
    }

    std::size_t parse_having(const Toks& toks, std::size_t idx, Condition& out,
                             const std::vector<std::string>& default_tables) const {
        if (idx >= toks.size() || toks[idx] != "having") return idx;
        return parse_condition(toks, idx + 1, out, default_tables);
    }

    std::size_t parse_group_by(const Toks& toks, std::size_t idx, std::vector<ColUnit>& out,
                               const std::vector<std::string>& default_tables) const {
        if (idx >= toks.size() || toks[idx] != "group") return idx;
        ++idx;
        expect(toks, idx, "by");
        ++idx;
        while (idx < toks.size() && !(is_clause(toks[idx]) || toks[idx] == ")" || toks[idx] == ";")) {
            ColUnit c;
            idx = parse_col_unit(toks, idx, c, default_tables);
            out.push_back(std::move(c));
            if (idx < toks.size() && toks[idx] == ",") ++idx;
            else break;
        }
        return idx;
    }

    std::size_t parse_order_by(const Toks& toks, std::size_t idx, std::optional<OrderBy>& out,
                               const std::vector<std::string>& default_tables) const {
        if (idx >= toks.size() || toks[idx] != "order") return idx;
        ++idx;
        expect(toks, idx, "by");
        ++idx;
        OrderBy ob;
        while (idx < toks.size() && !(is_clause(toks[idx]) || toks[idx] == ")" || toks[idx] == ";")) {
            ValUnit v;
            idx = parse_val_unit(toks, idx, v, default_tables);
            ob.units.push_back(std::move(v));
            if (idx < toks.size() && (toks[idx] == "asc" || toks[idx] == "desc")) {
                ob.direction = toks[idx];
                ++idx;
            }
            if (idx < toks.size() && toks[idx] == ",") ++idx;
            else break;
        }
        out = std::move(ob);
        return idx;
    }
};

AliasMap tables_with_alias(const SchemaIndex& schema, const Toks& toks) {
    AliasMap aliases;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i] != "as") continue;
        if (i + 1 >= toks.size()) throw ParseError(i, "'as' without alias");
        // toks[-1] wraps around, as in the reference implementation.
        aliases[toks[i + 1]] = i == 0 ? toks.back() : toks[i - 1];
    }
    for (const auto& t : schema.table_names()) {
        if (aliases.count(t)) throw ParseError(0, "alias '" + t + "' shadows a table name");
        aliases[t] = t;
    }
    return aliases;
}

}  // namespace

Query parse_sql_raw(std::string_view sql, const SchemaIndex& schema) {
    Toks toks = tokenize(sql);
    Parser parser(schema, tables_with_alias(schema, toks));
    Query q;
    parser.parse_sql(toks, 0, q);
    return q;
}

Query parse_sql_raw(std::string_view sql, const corpus::DbSchema& schema) {
    return parse_sql_raw(sql, SchemaIndex(schema));
}

ParsedQuery parse_sql(std::string_view sql, const SchemaIndex& schema) {
    Query q = parse_sql_raw(sql, schema);
    mask_literals(q);
    return q;
}

ParsedQuery parse_sql(std::string_view sql, const corpus::DbSchema& schema) {
    return parse_sql(sql, SchemaIndex(schema));
}

}  // namespace starsql::sqleval
