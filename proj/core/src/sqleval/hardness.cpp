#include "starsql/sqleval/hardness.hpp"

namespace starsql::sqleval {

namespace {

int count_component1(const Query& q) {
    int count = 0;
    if (!q.where.empty()) ++count;
    if (!q.group_by.empty()) ++count;
    if (q.order_by) ++count;
    if (q.limit) ++count;
    if (!q.table_units.empty()) count += static_cast<int>(q.table_units.size()) - 1;
    for (const Condition* c : {&q.from_conds, &q.where, &q.having}) {
        for (const auto& conn : c->connectors) {
            if (conn == "or") ++count;
        }
        for (const auto& u : c->units) {
            if (u.op_id == kOpLike) ++count;
        }
    }
    return count;
}

int count_component2(const Query& q) {
    int count = 0;
    for (const Condition* c : {&q.from_conds, &q.where, &q.having}) {
        for (const auto& u : c->units) {
            if (std::holds_alternative<Boxed<Query>>(u.val1)) ++count;
            if (std::holds_alternative<Boxed<Query>>(u.val2)) ++count;
        }
    }
    if (q.intersect) ++count;
    if (q.except_) ++count;
    if (q.union_) ++count;
    return count;
}

int count_others(const Query& q) {
    int count = 0;
    int aggs = 0;
    for (const auto& s : q.select) {
        if (s.agg != kAggNone) ++aggs;
    }
    // The reference counts a WHERE unit by its negation flag rather than an
    // aggregate, and every HAVING connector as an aggregate.
    for (const auto& u : q.where.units) {
        if (u.not_op) ++aggs;
    }
    for (const auto& g : q.group_by) {
        if (g.agg != kAggNone) ++aggs;
    }
    if (q.order_by) {
        for (const auto& v : q.order_by->units) {
            if (v.col1.agg != kAggNone) ++aggs;
        }
        for (const auto& v : q.order_by->units) {
            if (v.col2 && v.col2->agg != kAggNone) ++aggs;
        }
    }
    for (const auto& u : q.having.units) {
        if (u.not_op) ++aggs;
    }
    aggs += static_cast<int>(q.having.connectors.size());
    if (aggs > 1) ++count;
    if (q.select.size() > 1) ++count;
    if (q.where.size() > 1) ++count;
    if (q.group_by.size() > 1) ++count;
    return count;
}

}  // namespace

HardnessCounts hardness_counts(const Query& q) {
    return {count_component1(q), count_component2(q), count_others(q)};
}

corpus::Difficulty hardness(const Query& q) {
    const auto [c1, c2, o] = hardness_counts(q);
    using corpus::Difficulty;
    if (c1 <= 1 && o == 0 && c2 == 0) return Difficulty::easy;
    if ((o <= 2 && c1 <= 1 && c2 == 0) || (c1 <= 2 && o < 2 && c2 == 0)) return Difficulty::medium;
    if ((o > 2 && c1 <= 2 && c2 == 0) || (c1 > 2 && c1 <= 3 && o <= 2 && c2 == 0) ||
        (c1 <= 1 && o == 0 && c2 <= 1)) {
        return Difficulty::hard;
    }
    return Difficulty::extra;
}

}  // namespace starsql::sqleval
