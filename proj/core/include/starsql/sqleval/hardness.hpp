#pragma once

#include "starsql/corpus/benchmark.hpp"
#include "starsql/sqleval/ast.hpp"

namespace starsql::sqleval {

struct HardnessCounts {
    int component1 = 0;  // where/group/order/limit, joins, OR and LIKE
    int component2 = 0;  // nested queries and set operations
    int others = 0;      // multiple aggregates, projections, predicates, group keys
};

HardnessCounts hardness_counts(const Query& q);

// The benchmark's four-level difficulty rule.
corpus::Difficulty hardness(const Query& q);

}  // namespace starsql::sqleval
