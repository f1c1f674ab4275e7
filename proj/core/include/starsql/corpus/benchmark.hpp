#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "starsql/corpus/schema.hpp"

namespace starsql::corpus {

enum class Difficulty { easy, medium, hard, extra };
enum class Split { train, dev };

std::string to_string(Difficulty d);
std::optional<Difficulty> difficulty_from_string(const std::string& s);
std::string to_string(Split s);

// Report bucket name for an instance: the difficulty, or "unparsed".
inline constexpr const char* kUnparsedBucket = "unparsed";

struct TaskInstance {
    std::string id;
    std::string db_id;
    std::string question;
    std::string gold_sql;
    // Empty when the gold query does not parse under the sqleval grammar.
    std::optional<Difficulty> difficulty;
    Split split = Split::dev;

    bool unparsed() const { return !difficulty.has_value(); }
    std::string bucket() const;

    bool operator==(const TaskInstance&) const = default;
};

class MissingDatabaseFile : public Error {
public:
    explicit MissingDatabaseFile(std::string db_id)
        : Error("database file missing for db_id '" + db_id + "'"), db_id_(std::move(db_id)) {}
    const std::string& db_id() const { return db_id_; }

private:
    std::string db_id_;
};

class MalformedRecord : public Error {
public:
    MalformedRecord(std::size_t index, std::string reason)
        : Error("record " + std::to_string(index) + ": " + reason), index_(index), reason_(std::move(reason)) {}
    std::size_t index() const { return index_; }
    const std::string& reason() const { return reason_; }

private:
    std::size_t index_;
    std::string reason_;
};

class UnparsableSql : public Error {
public:
    using Error::Error;
};

class PoolTooSmall : public Error {
public:
    using Error::Error;
};

struct Benchmark {
    std::vector<TaskInstance> instances;
    SchemaCatalog schemas;
    std::filesystem::path db_dir;

    std::size_t count(Split s) const;
    std::size_t unparsed_count(Split s) const;
    std::vector<TaskInstance> split(Split s) const;
    const TaskInstance* find(const std::string& id) const;
    const DbSchema& schema(const std::string& db_id) const;
    std::filesystem::path db_path(const std::string& db_id) const;
};

std::filesystem::path database_path(const std::filesystem::path& db_dir, const std::string& db_id);

// Either split path may be empty to skip that split.
Benchmark load_benchmark(const std::string& train_path, const std::string& dev_path, const std::string& tables_path,
                         const std::filesystem::path& db_dir);

// Parses one benchmark JSON array into instances of the given split.
std::vector<TaskInstance> parse_split(const nlohmann::json& records, Split split, const SchemaCatalog& schemas);

// Inverse of parse_split: records with db_id, question, query.
nlohmann::json split_to_json(const std::vector<TaskInstance>& instances);

std::string instance_id(Split split, std::size_t index);

Difficulty classify_difficulty(const std::string& sql, const DbSchema& schema);

// Difficulty-stratified sample of n train instances, returned in source order.
std::vector<TaskInstance> select_training_pool(const std::vector<TaskInstance>& instances, std::size_t n,
                                               std::uint64_t seed);

}  // namespace starsql::corpus
