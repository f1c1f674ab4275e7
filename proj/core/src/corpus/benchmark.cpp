#include "starsql/corpus/benchmark.hpp"

#include <cstdio>

#include <spdlog/spdlog.h>

#include "starsql/sqleval/hardness.hpp"
#include "starsql/sqleval/parser.hpp"
#include "starsql/util/json_io.hpp"

namespace starsql::corpus {

using nlohmann::json;

std::string to_string(Difficulty d) {
    switch (d) {
        case Difficulty::easy: return "easy";
        case Difficulty::medium: return "medium";
        case Difficulty::hard: return "hard";
        case Difficulty::extra: return "extra";
    }
    return "extra";
}

std::optional<Difficulty> difficulty_from_string(const std::string& s) {
    if (s == "easy") return Difficulty::easy;
    if (s == "medium") return Difficulty::medium;
    if (s == "hard") return Difficulty::hard;
    if (s == "extra") return Difficulty::extra;
    return std::nullopt;
}

std::string to_string(Split s) { return s == Split::train ? "train" : "dev"; }

std::string TaskInstance::bucket() const { return difficulty ? to_string(*difficulty) : kUnparsedBucket; }

std::size_t Benchmark::count(Split s) const {
    std::size_t n = 0;
    for (const auto& i : instances) n += i.split == s;
    return n;
}

std::size_t Benchmark::unparsed_count(Split s) const {
    std::size_t n = 0;
    for (const auto& i : instances) n += i.split == s && i.unparsed();
    return n;
}

std::vector<TaskInstance> Benchmark::split(Split s) const {
    std::vector<TaskInstance> out;
    for (const auto& i : instances) {
        if (i.split == s) out.push_back(i);
    }
    return out;
}

const TaskInstance* Benchmark::find(const std::string& id) const {
    for (const auto& i : instances) {
        if (i.id == id) return &i;
    }
    return nullptr;
}

const DbSchema& Benchmark::schema(const std::string& db_id) const {
    auto it = schemas.find(db_id);
    if (it == schemas.end()) throw SchemaError("unknown db_id '" + db_id + "'");
    return it->second;
}

std::filesystem::path Benchmark::db_path(const std::string& db_id) const { return database_path(db_dir, db_id); }

std::filesystem::path database_path(const std::filesystem::path& db_dir, const std::string& db_id) {
    return db_dir / db_id / (db_id + ".sqlite");
}

std::string instance_id(Split split, std::size_t index) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%s-%05zu", split == Split::train ? "train" : "dev", index);
    return buf;
}

std::vector<TaskInstance> parse_split(const json& records, Split split, const SchemaCatalog& schemas) {
    if (!records.is_array()) throw MalformedRecord(0, "expected a JSON array of records");
    std::vector<TaskInstance> out;
    out.reserve(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto& r = records[i];
        if (!r.is_object()) throw MalformedRecord(i, "record is not an object");
        for (const char* field : {"db_id", "question", "query"}) {
            if (!r.contains(field) || !r[field].is_string())
                throw MalformedRecord(i, std::string("missing string field '") + field + "'");
        }
        TaskInstance inst;
        inst.id = instance_id(split, i);
        inst.db_id = r["db_id"].get<std::string>();
        inst.question = r["question"].get<std::string>();
        inst.gold_sql = r["query"].get<std::string>();
        inst.split = split;
        auto it = schemas.find(inst.db_id);
        if (it == schemas.end()) throw MalformedRecord(i, "unknown db_id '" + inst.db_id + "'");
        try {
            inst.difficulty = classify_difficulty(inst.gold_sql, it->second);
        } catch (const UnparsableSql&) {
            inst.difficulty.reset();
        }
        out.push_back(std::move(inst));
    }
    return out;
}

json split_to_json(const std::vector<TaskInstance>& instances) {
    json out = json::array();
    for (const auto& i : instances) {
        out.push_back(json{{"db_id", i.db_id}, {"question", i.question}, {"query", i.gold_sql}});
    }
    return out;
}

Benchmark load_benchmark(const std::string& train_path, const std::string& dev_path, const std::string& tables_path,
                         const std::filesystem::path& db_dir) {
    Benchmark b;
    b.schemas = load_schemas(tables_path);
    b.db_dir = db_dir;
    auto load = [&](const std::string& path, Split split) {
        if (path.empty()) return;
        auto part = parse_split(util::read_json(path), split, b.schemas);
        for (auto& inst : part) b.instances.push_back(std::move(inst));
    };
    load(train_path, Split::train);
    load(dev_path, Split::dev);
    std::map<std::string, bool> checked;
    for (const auto& inst : b.instances) {
        if (checked.emplace(inst.db_id, true).second && !std::filesystem::exists(b.db_path(inst.db_id)))
            throw MissingDatabaseFile(inst.db_id);
    }
    spdlog::info("loaded benchmark: {} train, {} dev ({} train / {} dev gold queries unparsed)",
                 b.count(Split::train), b.count(Split::dev), b.unparsed_count(Split::train),
                 b.unparsed_count(Split::dev));
    return b;
}

Difficulty classify_difficulty(const std::string& sql, const DbSchema& schema) {
    sqleval::Query q;
    try {
        q = sqleval::parse_sql(sql, schema);
    } catch (const sqleval::ParseError& e) {
        throw UnparsableSql(e.what());
    }
    return sqleval::hardness(q);
}

}  // namespace starsql::corpus
