#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "starsql/corpus/schema.hpp"
#include "starsql/sqleval/ast.hpp"
#include "starsql/sqleval/parser.hpp"

namespace starsql::sqleval {

struct ComponentScore {
    int acc = 0;
    int rec = 0;
    int f1 = 0;
    int label_total = 0;
    int pred_total = 0;
};

// Keyed by component: select, select(no AGG), where, where(no OP),
// group(no Having), group, order, and/or, IUEN, keywords.
using ComponentScores = std::map<std::string, ComponentScore>;

struct EmResult {
    // Empty when either side does not parse.
    std::optional<bool> match;
    // Score the reference evaluator reports: an unparsable side is replaced by
    // an empty query, so two unparsable queries count as a match.
    bool reference = false;
    bool pred_parse_error = false;
    bool gold_parse_error = false;
    std::string pred_error;
    std::string gold_error;
    ComponentScores components;
};

nlohmann::json to_json(const EmResult& r);

class ExactMatcher {
public:
    explicit ExactMatcher(const corpus::DbSchema& schema);

    EmResult compare(std::string_view pred_sql, std::string_view gold_sql) const;

    // Value removal plus column canonicalization (foreign-key classes, DISTINCT
    // dropped) applied to a raw parse before comparison.
    Query normalize(Query raw) const;

    // Compares two normalized queries; fills `components` when non-null.
    static bool match_normalized(const Query& pred, const Query& gold, ComponentScores* components = nullptr);

    const SchemaIndex& index() const { return index_; }
    const std::map<std::string, std::string>& key_map() const { return kmap_; }

private:
    SchemaIndex index_;
    std::map<std::string, std::string> kmap_;
};

EmResult exact_set_match(std::string_view pred_sql, std::string_view gold_sql, const corpus::DbSchema& schema);

// Structural match of two already parsed queries. Literals are ignored, so
// FROM-clause subqueries that differ only in constants match here even though
// the text form above compares them by value.
bool exact_set_match(const ParsedQuery& pred, const ParsedQuery& gold, const corpus::DbSchema& schema);

}  // namespace starsql::sqleval
