#include "starsql/sqleval/serialize.hpp"

#include <cctype>

namespace starsql::sqleval {

namespace {

std::string upper(const char* s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string strip_id(const std::string& id) {
    if (id == "__all__") return "*";
    if (id.size() >= 4 && id.rfind("__", 0) == 0 && id.compare(id.size() - 2, 2, "__") == 0) {
        return id.substr(2, id.size() - 4);
    }
    return id;
}

std::string col_unit(const ColUnit& c) {
    std::string col = (c.distinct ? "DISTINCT " : "") + strip_id(c.col_id);
    if (c.agg == kAggNone) return col;
    return upper(kAggOps[c.agg]) + "(" + col + ")";
}

std::string val_unit(const ValUnit& v) {
    std::string out = col_unit(v.col1);
    if (v.col2) out += std::string(" ") + kUnitOps[v.unit_op] + " " + col_unit(*v.col2);
    return out;
}

std::string literal(const Literal& lit) {
    if (lit.kind == Literal::Kind::number) return lit.placeholder ? "1" : lit.text;
    if (lit.placeholder) return "'value'";
    std::string body = lit.text;
    if (body.size() >= 2 && body.front() == '"' && body.back() == '"') body = body.substr(1, body.size() - 2);
    return "'" + body + "'";
}

std::string value(const Value& v) {
    if (const auto* lit = std::get_if<Literal>(&v)) return literal(*lit);
    if (const auto* c = std::get_if<ColUnit>(&v)) return col_unit(*c);
    if (const auto* sub = std::get_if<Boxed<Query>>(&v); sub && *sub) return "(" + serialize(**sub) + ")";
    return "NULL";
}

std::string condition(const Condition& c) {
    std::string out;
    for (std::size_t i = 0; i < c.units.size(); ++i) {
        const auto& u = c.units[i];
        if (i > 0) out += " " + upper(c.connectors[i - 1].c_str()) + " ";
        out += val_unit(u.val_unit);
        if (u.not_op) out += " NOT";
        out += " " + upper(kWhereOps[u.op_id]) + " " + value(u.val1);
        if (u.op_id == kOpBetween) out += " AND " + value(u.val2);
    }
    return out;
}

}  // namespace

std::string serialize(const Query& q) {
    std::string out = "SELECT ";
    if (q.distinct) out += "DISTINCT ";
    for (std::size_t i = 0; i < q.select.size(); ++i) {
        const auto& s = q.select[i];
        if (i > 0) out += ", ";
        const auto& v = s.val_unit;
        if (s.agg != kAggNone) {
            out += upper(kAggOps[s.agg]) + "(" + val_unit(v) + ")";
        } else if (v.col2 || v.col1.agg != kAggNone || v.col1.distinct) {
            // Parenthesized so the leading token is not read as the outer
            // aggregate or the SELECT DISTINCT flag.
            out += "(" + val_unit(v) + ")";
        } else {
            out += val_unit(v);
        }
    }
    out += " FROM ";
    for (std::size_t i = 0; i < q.table_units.size(); ++i) {
        const auto& tu = q.table_units[i];
        if (i > 0) out += " JOIN ";
        out += tu.is_sql ? "(" + (tu.sql ? serialize(*tu.sql) : std::string()) + ")" : strip_id(tu.table_id);
    }
    if (!q.from_conds.units.empty()) out += " ON " + condition(q.from_conds);
    if (!q.where.units.empty()) out += " WHERE " + condition(q.where);
    if (!q.group_by.empty()) {
        out += " GROUP BY ";
        for (std::size_t i = 0; i < q.group_by.size(); ++i) out += (i ? ", " : "") + col_unit(q.group_by[i]);
    }
    if (!q.having.units.empty()) out += " HAVING " + condition(q.having);
    if (q.order_by) {
        out += " ORDER BY";
        for (std::size_t i = 0; i < q.order_by->units.size(); ++i) {
            out += (i ? ", " : " ") + val_unit(q.order_by->units[i]);
        }
        if (!q.order_by->units.empty()) out += " " + upper(q.order_by->direction.c_str());
    }
    if (q.limit) out += " LIMIT 1";
    if (q.intersect) out += " INTERSECT " + serialize(*q.intersect);
    if (q.union_) out += " UNION " + serialize(*q.union_);
    if (q.except_) out += " EXCEPT " + serialize(*q.except_);
    return out;
}

}  // namespace starsql::sqleval
