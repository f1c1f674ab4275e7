#pragma once

#include <string>

#include "starsql/sqleval/ast.hpp"

namespace starsql::sqleval {

// Canonical SQL text for a parsed query: table-qualified columns, explicit
// JOIN ... ON, one ORDER BY direction, LIMIT rendered as "LIMIT 1" since the
// tree keeps only its presence. Parsing the output yields an equal tree.
std::string serialize(const Query& q);

}  // namespace starsql::sqleval
