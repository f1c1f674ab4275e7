#include "starsql/corpus/schema.hpp"

#include <set>

#include "starsql/util/json_io.hpp"
#include "starsql/util/text.hpp"

namespace starsql::corpus {

using nlohmann::json;

std::string to_string(ColumnType t) {
    switch (t) {
        case ColumnType::text: return "text";
        case ColumnType::number: return "number";
        case ColumnType::time: return "time";
        case ColumnType::boolean: return "boolean";
        case ColumnType::other: return "others";
    }
    return "others";
}

ColumnType column_type_from_string(const std::string& s) {
    if (s == "text") return ColumnType::text;
    if (s == "number") return ColumnType::number;
    if (s == "time") return ColumnType::time;
    if (s == "boolean") return ColumnType::boolean;
    return ColumnType::other;
}

const TableDef* DbSchema::find_table(const std::string& name) const {
    for (const auto& t : tables) {
        if (util::iequals(t.name, name)) return &t;
    }
    return nullptr;
}

std::optional<int> DbSchema::column_index(const ColumnRef& ref) const {
    for (std::size_t i = 0; i < column_order.size(); ++i) {
        if (util::iequals(column_order[i].table, ref.table) && util::iequals(column_order[i].column, ref.column))
            return static_cast<int>(i) + 1;
    }
    return std::nullopt;
}

void DbSchema::validate() const {
    std::set<std::string> table_names;
    for (const auto& t : tables) {
        if (!table_names.insert(util::to_lower(t.name)).second)
            throw SchemaError(db_id + ": duplicate table " + t.name);
        std::set<std::string> cols;
        for (const auto& c : t.columns) {
            if (!cols.insert(util::to_lower(c.name)).second)
                throw SchemaError(db_id + ": duplicate column " + t.name + "." + c.name);
        }
        for (const auto& pk : t.primary_key) {
            if (!cols.count(util::to_lower(pk)))
                throw SchemaError(db_id + ": primary key " + pk + " not a column of " + t.name);
        }
    }
    auto resolves = [&](const ColumnRef& r) {
        const TableDef* t = find_table(r.table);
        if (!t) return false;
        for (const auto& c : t->columns) {
            if (util::iequals(c.name, r.column)) return true;
        }
        return false;
    };
    for (const auto& fk : foreign_keys) {
        if (!resolves(fk.from) || !resolves(fk.to))
            throw SchemaError(db_id + ": foreign key " + fk.from.table + "." + fk.from.column + " -> " + fk.to.table +
                              "." + fk.to.column + " references a missing column");
    }
}

std::string DbSchema::serialize_compact() const {
    std::string out;
    for (const auto& t : tables) {
        if (!out.empty()) out += '\n';
        out += t.name;
        out += '(';
        for (std::size_t i = 0; i < t.columns.size(); ++i) {
            if (i) out += ", ";
            out += t.columns[i].name;
        }
        out += ')';
    }
    return out;
}

DbSchema schema_from_json(const json& entry) {
    DbSchema s;
    try {
        s.db_id = entry.at("db_id").get<std::string>();
        const auto& tnames = entry.at("table_names_original");
        const auto& cols = entry.at("column_names_original");
        const auto& types = entry.at("column_types");
        for (const auto& t : tnames) s.tables.push_back(TableDef{t.get<std::string>(), {}, {}});
        std::vector<ColumnRef> by_index;  // index 0 is "*"
        for (std::size_t i = 0; i < cols.size(); ++i) {
            const int tidx = cols[i].at(0).get<int>();
            const std::string name = cols[i].at(1).get<std::string>();
            if (tidx < 0) {
                by_index.push_back(ColumnRef{"", name});
                continue;
            }
            if (static_cast<std::size_t>(tidx) >= s.tables.size())
                throw SchemaError(s.db_id + ": column " + name + " has bad table index");
            const std::string type = i < types.size() ? types[i].get<std::string>() : "text";
            s.tables[tidx].columns.push_back(ColumnDef{name, column_type_from_string(type)});
            ColumnRef ref{s.tables[tidx].name, name};
            by_index.push_back(ref);
            s.column_order.push_back(ref);
        }
        auto ref_at = [&](int idx) -> const ColumnRef& {
            if (idx <= 0 || static_cast<std::size_t>(idx) >= by_index.size())
                throw SchemaError(s.db_id + ": column index " + std::to_string(idx) + " out of range");
            return by_index[idx];
        };
        for (const auto& pk : entry.value("primary_keys", json::array())) {
            std::vector<int> idxs;
            if (pk.is_array()) {
                for (const auto& p : pk) idxs.push_back(p.get<int>());
            } else {
                idxs.push_back(pk.get<int>());
            }
            for (int idx : idxs) {
                const ColumnRef& r = ref_at(idx);
                for (auto& t : s.tables) {
                    if (t.name == r.table) t.primary_key.push_back(r.column);
                }
            }
        }
        for (const auto& fk : entry.value("foreign_keys", json::array())) {
            s.foreign_keys.push_back(ForeignKey{ref_at(fk.at(0).get<int>()), ref_at(fk.at(1).get<int>())});
        }
    } catch (const json::exception& e) {
        throw SchemaError("malformed schema entry: " + std::string(e.what()));
    }
    s.validate();
    return s;
}

json schema_to_json(const DbSchema& s) {
    json tnames = json::array();
    for (const auto& t : s.tables) tnames.push_back(t.name);
    json cols = json::array({json::array({-1, "*"})});
    json types = json::array({"text"});
    for (const auto& ref : s.column_order) {
        int tidx = 0;
        for (std::size_t i = 0; i < s.tables.size(); ++i) {
            if (s.tables[i].name == ref.table) tidx = static_cast<int>(i);
        }
        cols.push_back(json::array({tidx, ref.column}));
        ColumnType type = ColumnType::text;
        for (const auto& c : s.tables[tidx].columns) {
            if (c.name == ref.column) type = c.type;
        }
        types.push_back(to_string(type));
    }
    json pks = json::array();
    for (const auto& t : s.tables) {
        std::vector<int> idxs;
        for (const auto& pk : t.primary_key) idxs.push_back(*s.column_index(ColumnRef{t.name, pk}));
        if (idxs.size() == 1) pks.push_back(idxs[0]);
        else if (!idxs.empty()) pks.push_back(idxs);
    }
    json fks = json::array();
    for (const auto& fk : s.foreign_keys)
        fks.push_back(json::array({*s.column_index(fk.from), *s.column_index(fk.to)}));
    return json{{"db_id", s.db_id},
                {"table_names_original", tnames},
                {"column_names_original", cols},
                {"column_types", types},
                {"primary_keys", pks},
                {"foreign_keys", fks}};
}

SchemaCatalog load_schemas(const std::string& tables_path) {
    const json doc = util::read_json(tables_path);
    if (!doc.is_array()) throw SchemaError(tables_path + ": expected a JSON array of schemas");
    SchemaCatalog out;
    for (const auto& entry : doc) {
        DbSchema s = schema_from_json(entry);
        const std::string id = s.db_id;
        out.emplace(id, std::move(s));
    }
    return out;
}

}  // namespace starsql::corpus
