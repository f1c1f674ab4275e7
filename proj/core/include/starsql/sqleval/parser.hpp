#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "starsql/corpus/schema.hpp"
#include "starsql/sqleval/ast.hpp"
#include "starsql/sqleval/errors.hpp"

namespace starsql::sqleval {

// Lowercased table -> columns view of a schema plus the identifier map used
// for column ids ("__t.c__", "__t__", "__all__").
class SchemaIndex {
public:
    explicit SchemaIndex(const corpus::DbSchema& schema);

    const std::vector<std::string>* columns(const std::string& table) const;
    const std::string* id(const std::string& key) const;
    const std::vector<std::string>& table_names() const { return table_names_; }
    const std::unordered_map<std::string, std::string>& ids() const { return id_map_; }

private:
    std::vector<std::string> table_names_;
    std::unordered_map<std::string, std::vector<std::string>> columns_;
    std::unordered_map<std::string, std::string> id_map_;
};

// Parses with literal values kept. Throws ParseError.
Query parse_sql_raw(std::string_view sql, const SchemaIndex& schema);
Query parse_sql_raw(std::string_view sql, const corpus::DbSchema& schema);

// Parses and reduces literals to placeholders, so queries differing only in
// constants compare equal.
ParsedQuery parse_sql(std::string_view sql, const corpus::DbSchema& schema);
ParsedQuery parse_sql(std::string_view sql, const SchemaIndex& schema);

// Python float() acceptance of a lowercased token.
std::optional<double> parse_number_token(std::string_view tok);

}  // namespace starsql::sqleval
