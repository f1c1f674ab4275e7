#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "starsql/util/errors.hpp"

namespace starsql::corpus {

enum class ColumnType { text, number, time, boolean, other };

std::string to_string(ColumnType t);
ColumnType column_type_from_string(const std::string& s);

struct ColumnDef {
    std::string name;
    ColumnType type = ColumnType::text;

    bool operator==(const ColumnDef&) const = default;
};

struct TableDef {
    std::string name;
    std::vector<ColumnDef> columns;
    std::vector<std::string> primary_key;

    bool operator==(const TableDef&) const = default;
};

struct ColumnRef {
    std::string table;
    std::string column;

    bool operator==(const ColumnRef&) const = default;
};

struct ForeignKey {
    ColumnRef from;
    ColumnRef to;

    bool operator==(const ForeignKey&) const = default;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

struct DbSchema {
    std::string db_id;
    std::vector<TableDef> tables;
    std::vector<ForeignKey> foreign_keys;
    // Column enumeration order of the source file ("*" excluded). Foreign-key
    // canonicalization for exact match depends on these positions.
    std::vector<ColumnRef> column_order;

    const TableDef* find_table(const std::string& name) const;  // case-insensitive
    // 1-based position in column_order (0 is "*"); nullopt when absent.
    std::optional<int> column_index(const ColumnRef& ref) const;

    // Throws SchemaError when an invariant does not hold.
    void validate() const;

    // Compact "table(col, col)" lines in original casing.
    std::string serialize_compact() const;

    bool operator==(const DbSchema&) const = default;
};

// Spider tables.json entry <-> DbSchema.
DbSchema schema_from_json(const nlohmann::json& entry);
nlohmann::json schema_to_json(const DbSchema& schema);

using SchemaCatalog = std::map<std::string, DbSchema>;

SchemaCatalog load_schemas(const std::string& tables_path);

}  // namespace starsql::corpus
