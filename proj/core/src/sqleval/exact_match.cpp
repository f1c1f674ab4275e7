#include "starsql/sqleval/exact_match.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>
#include <vector>

#include "starsql/util/text.hpp"

namespace starsql::sqleval {

using nlohmann::json;

namespace {

using ValidCols = std::unordered_set<std::string>;
using KeyMap = std::map<std::string, std::string>;

ValidCols valid_col_units(const std::vector<TableUnit>& table_units, const SchemaIndex& index) {
    std::set<std::string> prefixes;
    for (const auto& tu : table_units) {
        if (!tu.is_sql && tu.table_id.size() >= 2) prefixes.insert(tu.table_id.substr(0, tu.table_id.size() - 2));
    }
    ValidCols valid;
    for (const auto& [key, value] : index.ids()) {
        auto dot = value.find('.');
        if (dot != std::string::npos && prefixes.count(value.substr(0, dot))) valid.insert(value);
    }
    return valid;
}

void strip_values(Query& q);

void strip_condition_values(Condition& c) {
    for (auto& u : c.units) {
        for (Value* v : {&u.val1, &u.val2}) {
            if (auto* sub = std::get_if<Boxed<Query>>(v); sub && *sub) {
                strip_values(**sub);
            } else {
                *v = std::monostate{};
            }
        }
    }
}

void strip_values(Query& q) {
    strip_condition_values(q.from_conds);
    strip_condition_values(q.having);
    strip_condition_values(q.where);
    if (q.intersect) strip_values(*q.intersect);
    if (q.except_) strip_values(*q.except_);
    if (q.union_) strip_values(*q.union_);
}

struct ColRebuilder {
    const ValidCols& valid;
    const KeyMap& kmap;

    void col(ColUnit& c) const {
        if (auto it = kmap.find(c.col_id); it != kmap.end() && valid.count(c.col_id)) c.col_id = it->second;
        c.distinct = false;
    }
    void val(ValUnit& v) const {
        col(v.col1);
        if (v.col2) col(*v.col2);
    }
    void cond(Condition& c) const {
        for (auto& u : c.units) val(u.val_unit);
    }
    void sql(Query& q) const {
        for (auto& s : q.select) val(s.val_unit);
        q.distinct = false;
        cond(q.from_conds);
        cond(q.where);
        for (auto& g : q.group_by) col(g);
        if (q.order_by) {
            for (auto& v : q.order_by->units) val(v);
        }
        cond(q.having);
        if (q.intersect) sql(*q.intersect);
        if (q.except_) sql(*q.except_);
        if (q.union_) sql(*q.union_);
    }
};

// Size of the multiset intersection, counted the way the reference does:
// each predicted item consumes at most one equal gold item.
template <class T>
int multiset_hits(const std::vector<T>& pred, std::vector<T> gold) {
    int hits = 0;
    for (const auto& p : pred) {
        auto it = std::find(gold.begin(), gold.end(), p);
        if (it != gold.end()) {
            ++hits;
            gold.erase(it);
        }
    }
    return hits;
}

ComponentScore score(int count, int pred_total, int label_total) {
    ComponentScore s;
    s.label_total = label_total;
    s.pred_total = pred_total;
    int v = (pred_total == label_total && count == pred_total) ? 1 : 0;
    s.acc = s.rec = s.f1 = v;
    return s;
}

std::string group_col_name(const std::string& col_id) {
    auto dot = col_id.find('.');
    if (dot == std::string::npos) return col_id;
    auto next = col_id.find('.', dot + 1);
    return col_id.substr(dot + 1, next == std::string::npos ? std::string::npos : next - dot - 1);
}

std::set<std::string> keywords(const Query& q) {
    std::set<std::string> res;
    if (!q.where.empty()) res.insert("where");
    if (!q.group_by.empty()) res.insert("group");
    if (!q.having.empty()) res.insert("having");
    if (q.order_by) {
        res.insert(q.order_by->direction);
        res.insert("order");
    }
    if (q.limit) res.insert("limit");
    if (q.except_) res.insert("except");
    if (q.union_) res.insert("union");
    if (q.intersect) res.insert("intersect");
    for (const Condition* c : {&q.from_conds, &q.where, &q.having}) {
        for (const auto& conn : c->connectors) {
            if (conn == "or") res.insert("or");
        }
        for (const auto& u : c->units) {
            if (u.not_op) res.insert("not");
            if (u.op_id == kOpIn) res.insert("in");
            if (u.op_id == kOpLike) res.insert("like");
        }
    }
    return res;
}

ComponentScores components(const Query& pred, const Query& label) {
    ComponentScores res;

    {
        std::vector<ValUnit> pred_vals, label_vals;
        for (const auto& s : pred.select) pred_vals.push_back(s.val_unit);
        for (const auto& s : label.select) label_vals.push_back(s.val_unit);
        int pt = static_cast<int>(pred.select.size());
        int lt = static_cast<int>(label.select.size());
        res["select"] = score(multiset_hits(pred.select, label.select), pt, lt);
        res["select(no AGG)"] = score(multiset_hits(pred_vals, label_vals), pt, lt);
    }
    {
        std::vector<ValUnit> pred_vals, label_vals;
        for (const auto& u : pred.where.units) pred_vals.push_back(u.val_unit);
        for (const auto& u : label.where.units) label_vals.push_back(u.val_unit);
        int pt = static_cast<int>(pred.where.units.size());
        int lt = static_cast<int>(label.where.units.size());
        res["where"] = score(multiset_hits(pred.where.units, label.where.units), pt, lt);
        res["where(no OP)"] = score(multiset_hits(pred_vals, label_vals), pt, lt);
    }
    {
        std::vector<std::string> pred_cols, label_cols;
        for (const auto& g : pred.group_by) pred_cols.push_back(group_col_name(g.col_id));
        for (const auto& g : label.group_by) label_cols.push_back(group_col_name(g.col_id));
        res["group(no Having)"] = score(multiset_hits(pred_cols, label_cols), static_cast<int>(pred_cols.size()),
                                        static_cast<int>(label_cols.size()));
    }
    {
        int pt = pred.group_by.empty() ? 0 : 1;
        int lt = label.group_by.empty() ? 0 : 1;
        std::vector<std::string> pred_ids, label_ids;
        for (const auto& g : pred.group_by) pred_ids.push_back(g.col_id);
        for (const auto& g : label.group_by) label_ids.push_back(g.col_id);
        int cnt = (pt == 1 && lt == 1 && pred_ids == label_ids && pred.having == label.having) ? 1 : 0;
        res["group"] = score(cnt, pt, lt);
    }
    {
        int pt = pred.order_by ? 1 : 0;
        int lt = label.order_by ? 1 : 0;
        int cnt = (label.order_by && pred.order_by == label.order_by && pred.limit == label.limit) ? 1 : 0;
        res["order"] = score(cnt, pt, lt);
    }
    {
        std::set<std::string> pred_ao(pred.where.connectors.begin(), pred.where.connectors.end());
        std::set<std::string> label_ao(label.where.connectors.begin(), label.where.connectors.end());
        if (pred_ao == label_ao) {
            res["and/or"] = score(1, 1, 1);
        } else {
            // The reference returns the two set sizes in swapped positions.
            res["and/or"] = score(0, static_cast<int>(label_ao.size()), static_cast<int>(pred_ao.size()));
        }
    }
    {
        int lt = 0, pt = 0, cnt = 0;
        auto nested = [&](const Boxed<Query>& p, const Boxed<Query>& l) {
            if (p) ++pt;
            if (l) ++lt;
            if (p && l && ExactMatcher::match_normalized(*p, *l)) ++cnt;
        };
        nested(pred.intersect, label.intersect);
        nested(pred.except_, label.except_);
        nested(pred.union_, label.union_);
        res["IUEN"] = score(cnt, pt, lt);
    }
    {
        auto pk = keywords(pred);
        auto lk = keywords(label);
        int cnt = 0;
        for (const auto& k : pk) cnt += lk.count(k) ? 1 : 0;
        res["keywords"] = score(cnt, static_cast<int>(pk.size()), static_cast<int>(lk.size()));
    }
    return res;
}

bool same_table_units(const std::vector<TableUnit>& pred, const std::vector<TableUnit>& label) {
    if (pred.size() != label.size()) return false;
    std::vector<std::string> pred_tables, label_tables;
    std::vector<const Query*> pred_sql, label_sql;
    for (const auto& tu : pred) {
        if (tu.is_sql) pred_sql.push_back(tu.sql.get());
        else pred_tables.push_back(tu.table_id);
    }
    for (const auto& tu : label) {
        if (tu.is_sql) label_sql.push_back(tu.sql.get());
        else label_tables.push_back(tu.table_id);
    }
    std::sort(pred_tables.begin(), pred_tables.end());
    std::sort(label_tables.begin(), label_tables.end());
    if (pred_tables != label_tables || pred_sql.size() != label_sql.size()) return false;
    // Nested FROM queries form a multiset; the reference sorts them, which
    // only succeeds when they are all equal anyway.
    std::vector<bool> used(label_sql.size(), false);
    for (const Query* p : pred_sql) {
        bool found = false;
        for (std::size_t j = 0; j < label_sql.size(); ++j) {
            if (used[j]) continue;
            bool eq = (p && label_sql[j]) ? *p == *label_sql[j] : p == label_sql[j];
            if (eq) {
                used[j] = true;
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

KeyMap build_key_map(const corpus::DbSchema& schema) {
    std::vector<std::string> cols{"__all__"};
    for (const auto& ref : schema.column_order) {
        cols.push_back("__" + util::to_lower(ref.table) + "." + util::to_lower(ref.column) + "__");
    }
    std::vector<std::set<int>> groups;
    for (const auto& fk : schema.foreign_keys) {
        auto a = schema.column_index(fk.from);
        auto b = schema.column_index(fk.to);
        if (!a || !b) continue;
        std::set<int>* target = nullptr;
        for (auto& g : groups) {
            if (g.count(*a) || g.count(*b)) {
                target = &g;
                break;
            }
        }
        if (!target) target = &groups.emplace_back();
        target->insert(*a);
        target->insert(*b);
    }
    KeyMap kmap;
    for (const auto& g : groups) {
        const std::string& canonical = cols[static_cast<std::size_t>(*g.begin())];
        for (int i : g) kmap[cols[static_cast<std::size_t>(i)]] = canonical;
    }
    return kmap;
}

json score_json(const ComponentScore& s) {
    return json{{"acc", s.acc}, {"rec", s.rec}, {"f1", s.f1}, {"label_total", s.label_total},
                {"pred_total", s.pred_total}};
}

}  // namespace

ExactMatcher::ExactMatcher(const corpus::DbSchema& schema) : index_(schema), kmap_(build_key_map(schema)) {}

Query ExactMatcher::normalize(Query raw) const {
    ValidCols valid = valid_col_units(raw.table_units, index_);
    strip_values(raw);
    ColRebuilder{valid, kmap_}.sql(raw);
    return raw;
}

bool ExactMatcher::match_normalized(const Query& pred, const Query& gold, ComponentScores* out) {
    ComponentScores scores = components(pred, gold);
    bool ok = std::all_of(scores.begin(), scores.end(), [](const auto& kv) { return kv.second.f1 == 1; });
    if (out) *out = std::move(scores);
    if (!ok) return false;
    if (!gold.table_units.empty()) return same_table_units(pred.table_units, gold.table_units);
    return true;
}

EmResult ExactMatcher::compare(std::string_view pred_sql, std::string_view gold_sql) const {
    EmResult r;
    Query gold, pred;
    try {
        gold = parse_sql_raw(gold_sql, index_);
    } catch (const ParseError& e) {
        r.gold_parse_error = true;
        r.gold_error = e.what();
    }
    try {
        pred = parse_sql_raw(pred_sql, index_);
    } catch (const ParseError& e) {
        r.pred_parse_error = true;
        r.pred_error = e.what();
    }
    if (r.gold_parse_error) gold = Query{};
    if (r.pred_parse_error) pred = Query{};
    r.reference = match_normalized(normalize(std::move(pred)), normalize(std::move(gold)), &r.components);
    if (!r.gold_parse_error && !r.pred_parse_error) r.match = r.reference;
    return r;
}

EmResult exact_set_match(std::string_view pred_sql, std::string_view gold_sql, const corpus::DbSchema& schema) {
    return ExactMatcher(schema).compare(pred_sql, gold_sql);
}

bool exact_set_match(const ParsedQuery& pred, const ParsedQuery& gold, const corpus::DbSchema& schema) {
    ExactMatcher m(schema);
    Query p = pred;
    Query g = gold;
    mask_literals(p);
    mask_literals(g);
    return ExactMatcher::match_normalized(m.normalize(std::move(p)), m.normalize(std::move(g)));
}

json to_json(const EmResult& r) {
    json comps = json::object();
    for (const auto& [k, v] : r.components) comps[k] = score_json(v);
    json out{{"match", r.match ? json(*r.match) : json(nullptr)},
             {"reference", r.reference},
             {"pred_parse_error", r.pred_parse_error},
             {"gold_parse_error", r.gold_parse_error},
             {"components", comps}};
    if (r.pred_parse_error) out["pred_error"] = r.pred_error;
    if (r.gold_parse_error) out["gold_error"] = r.gold_error;
    return out;
}

}  // namespace starsql::sqleval
