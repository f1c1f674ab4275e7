#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "starsql/bootstrap/candidate.hpp"
#include "starsql/bootstrap/datasets.hpp"
#include "starsql/corpus/benchmark.hpp"
#include "starsql/modelio/endpoint.hpp"
#include "starsql/modelio/prompt.hpp"
#include "starsql/sqleval/label.hpp"

namespace starsql::bootstrap {

enum class LabelMetric { ex, em };

std::string to_string(LabelMetric m);
LabelMetric label_metric_from_string(const std::string& s);

struct RoundConfig {
    int k = 8;
    double temperature = 0.8;
    int max_tokens = 512;
    std::vector<std::string> stop;
    std::uint64_t seed = 0;
    std::size_t parallelism = 4;
    bool use_hints = true;
    LabelMetric metric = LabelMetric::ex;
};

// Request seed for one (instance, round, origin), so cassette keys do not
// depend on scheduling.
std::int64_t derive_seed(std::uint64_t seed, const std::string& instance_id, int round, Origin origin);

struct InstanceOutcome {
    std::string instance_id;
    bool excluded = false;  // gold did not execute
    std::string reason;
    int correct_initial = 0;
    int hint_attempts = 0;  // L
    std::vector<Candidate> candidates;
};

nlohmann::json to_json(const InstanceOutcome& o);
InstanceOutcome instance_outcome_from_json(const nlohmann::json& j);

// Per-instance JSONL checkpoint. Completed instances are appended and flushed
// one line at a time; a torn final line is ignored on load.
class Checkpoint {
public:
    explicit Checkpoint(std::filesystem::path path);
    const std::map<std::string, InstanceOutcome>& done() const { return done_; }
    void append(const InstanceOutcome& o);

private:
    std::filesystem::path path_;
    std::mutex mu_;
    std::map<std::string, InstanceOutcome> done_;
};

struct BucketStats {
    std::size_t instances = 0;
    std::size_t correct_initial = 0;  // label-true initial candidates
    std::size_t solved_initial = 0;   // instances with at least one
    std::size_t hint_attempts = 0;    // sum of L
    std::size_t rationalization_successes = 0;
    std::size_t sft_records = 0;
    std::size_t orm_positive = 0;
    std::size_t orm_negative = 0;
    std::size_t transport_failures = 0;
    std::size_t extraction_failures = 0;
};

nlohmann::json to_json(const BucketStats& s);
BucketStats bucket_stats_from_json(const nlohmann::json& j);

struct RoundResult {
    std::vector<InstanceOutcome> outcomes;  // pool order
    std::vector<Candidate> candidates;      // sorted
    std::vector<std::string> excluded;
};

class RoundRunner {
public:
    RoundRunner(const corpus::Benchmark& benchmark, sqleval::Labeler& labeler, modelio::ModelEndpoint& generator,
                std::vector<modelio::PromptExemplar> exemplars, RoundConfig config);

    // Samples k, labels, rationalizes L = k - correct with hints. Endpoint
    // errors other than exhausted retries propagate; finished instances stay
    // in the checkpoint.
    RoundResult run_round(const std::vector<corpus::TaskInstance>& pool, int round, const std::string& generator_ref,
                          const std::filesystem::path& checkpoint_path);

    InstanceOutcome process(const corpus::TaskInstance& inst, int round, const std::string& generator_ref);

    std::vector<Candidate> rationalize(const corpus::TaskInstance& inst, int L, int round,
                                       const std::string& generator_ref);

    const RoundConfig& config() const { return config_; }
    const corpus::Benchmark& benchmark() const { return benchmark_; }

private:
    std::vector<Candidate> sample(const corpus::TaskInstance& inst, const std::string& prompt, int n, Origin origin,
                                  int round, const std::string& generator_ref);
    void label(const corpus::TaskInstance& inst, Candidate& c);

    const corpus::Benchmark& benchmark_;
    sqleval::Labeler& labeler_;
    modelio::ModelEndpoint& generator_;
    std::vector<modelio::PromptExemplar> exemplars_;
    RoundConfig config_;
};

// Per-bucket statistics for one round; buckets present in the pool always
// appear, with "unparsed" for instances whose gold does not parse.
std::map<std::string, BucketStats> round_stats(const std::vector<corpus::TaskInstance>& pool,
                                               const RoundResult& result, const std::vector<SftRecord>& sft,
                                               const OrmDataset& orm);

}  // namespace starsql::bootstrap
