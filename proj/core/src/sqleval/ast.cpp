#include "starsql/sqleval/ast.hpp"

namespace starsql::sqleval {

using nlohmann::json;

namespace {

void mask_condition(Condition& c);

void mask_value(Value& v) {
    if (auto* lit = std::get_if<Literal>(&v)) {
        lit->placeholder = true;
        lit->text.clear();
        lit->number = 0;
    } else if (auto* sub = std::get_if<Boxed<Query>>(&v)) {
        if (*sub) mask_literals(**sub);
    }
}

void mask_condition(Condition& c) {
    for (auto& u : c.units) {
        mask_value(u.val1);
        mask_value(u.val2);
    }
}

json col_json(const ColUnit& c) { return json::array({c.agg, c.col_id, c.distinct}); }

json val_unit_json(const ValUnit& v) {
    return json::array({v.unit_op, col_json(v.col1), v.col2 ? col_json(*v.col2) : json(nullptr)});
}

json value_json(const Value& v) {
    if (std::holds_alternative<std::monostate>(v)) return nullptr;
    if (const auto* lit = std::get_if<Literal>(&v)) {
        return lit->kind == Literal::Kind::number ? "<number>" : "<string>";
    }
    if (const auto* c = std::get_if<ColUnit>(&v)) return col_json(*c);
    const auto& sub = std::get<Boxed<Query>>(v);
    return sub ? to_json(*sub) : json(nullptr);
}

json condition_json(const Condition& c) {
    json out = json::array();
    for (std::size_t i = 0; i < c.units.size(); ++i) {
        const auto& u = c.units[i];
        out.push_back(json::array({u.not_op, u.op_id, val_unit_json(u.val_unit), value_json(u.val1),
                                   value_json(u.val2)}));
        if (i < c.connectors.size()) out.push_back(c.connectors[i]);
    }
    return out;
}

}  // namespace

void mask_literals(Query& q) {
    mask_condition(q.from_conds);
    mask_condition(q.where);
    mask_condition(q.having);
    for (auto& tu : q.table_units) {
        if (tu.is_sql && tu.sql) mask_literals(*tu.sql);
    }
    if (q.intersect) mask_literals(*q.intersect);
    if (q.except_) mask_literals(*q.except_);
    if (q.union_) mask_literals(*q.union_);
}

json to_json(const Query& q) {
    json select_items = json::array();
    for (const auto& s : q.select) select_items.push_back(json::array({s.agg, val_unit_json(s.val_unit)}));
    json table_units = json::array();
    for (const auto& tu : q.table_units) {
        if (tu.is_sql) table_units.push_back(json::array({"sql", tu.sql ? to_json(*tu.sql) : json(nullptr)}));
        else table_units.push_back(json::array({"table_unit", tu.table_id}));
    }
    json group = json::array();
    for (const auto& g : q.group_by) group.push_back(col_json(g));
    json order = json::array();
    if (q.order_by) {
        json units = json::array();
        for (const auto& u : q.order_by->units) units.push_back(val_unit_json(u));
        order = json::array({q.order_by->direction, units});
    }
    auto sub = [](const Boxed<Query>& b) { return b ? to_json(*b) : json(nullptr); };
    return json{{"select", json::array({q.distinct, select_items})},
                {"from", json{{"table_units", table_units}, {"conds", condition_json(q.from_conds)}}},
                {"where", condition_json(q.where)},
                {"groupBy", group},
                {"having", condition_json(q.having)},
                {"orderBy", order},
                {"limit", q.limit},
                {"intersect", sub(q.intersect)},
                {"except", sub(q.except_)},
                {"union", sub(q.union_)}};
}

}  // namespace starsql::sqleval
