#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "starsql/bootstrap/candidate.hpp"
#include "starsql/corpus/benchmark.hpp"

namespace starsql::bootstrap {

// Per-instance data the dataset builders need beyond the candidates: the
// model input X and the report bucket.
struct InstanceContext {
    std::string input;
    std::string bucket;
    std::string gold_sql;
};
using ContextMap = std::map<std::string, InstanceContext>;

ContextMap build_contexts(const std::vector<corpus::TaskInstance>& instances, const corpus::SchemaCatalog& schemas);

struct SftRecord {
    std::string instance_id;
    std::string input;
    std::string target;
    Origin origin = Origin::initial;
    int round = 1;

    bool operator==(const SftRecord&) const = default;
};

struct OrmRecord {
    std::string instance_id;
    std::string input;
    std::string candidate;
    int label = 0;
    Origin origin = Origin::initial;
    int round = 1;

    bool operator==(const OrmRecord&) const = default;
};

nlohmann::json to_json(const SftRecord& r);
nlohmann::json to_json(const OrmRecord& r);
SftRecord sft_from_json(const nlohmann::json& j);
OrmRecord orm_from_json(const nlohmann::json& j);

// Label-true candidates, one per (instance, whitespace/case-normalized
// rationale+SQL), in candidate order.
std::vector<SftRecord> build_sft_dataset(std::vector<Candidate> candidates, const ContextMap& contexts);

struct OrmBalance {
    std::size_t positive = 0;
    std::size_t negative = 0;
};

struct OrmDataset {
    std::vector<OrmRecord> records;
    std::size_t excluded_extraction = 0;
    std::size_t excluded_transport = 0;
    std::map<std::string, OrmBalance> balance;  // by bucket
};

// Every candidate with an extracted SQL, both labels kept.
OrmDataset build_orm_dataset(std::vector<Candidate> candidates, const ContextMap& contexts);

void write_sft(const std::filesystem::path& path, const std::vector<SftRecord>& records);
void write_orm(const std::filesystem::path& path, const std::vector<OrmRecord>& records);
void write_candidates(const std::filesystem::path& path, const std::vector<Candidate>& candidates);
std::vector<Candidate> read_candidates(const std::filesystem::path& path);

// The SQL inside an SFT target or ORM candidate text.
std::string solution_sql(const std::string& target);

}  // namespace starsql::bootstrap
