#pragma once

#include <string>

#include "starsql/sqleval/ast.hpp"
#include "starsql/sqleval/executor.hpp"

namespace starsql::sqleval {

inline constexpr double kRelativeTolerance = 1e-6;

// NULL equals only NULL; numbers compare with a relative tolerance; text and
// blobs compare exactly and never equal a number.
bool values_equal(const SqlValue& a, const SqlValue& b);
bool rows_equal(const Row& a, const Row& b);

// Same width, and the same rows either positionally (order_matters) or as a
// multiset under values_equal.
bool results_match(const ExecResult& pred, const ExecResult& gold, bool order_matters);

// Order is significant when the gold query has a top-level ORDER BY. Pass the
// parse when available; otherwise the text is searched.
bool gold_order_matters(const std::string& gold_sql, const Query* gold_parse);

// Canonical digest of a result for clustering. Rows are sorted unless
// order_matters; empty for a failed execution.
std::string result_fingerprint(const ExecResult& r, bool order_matters);

}  // namespace starsql::sqleval
