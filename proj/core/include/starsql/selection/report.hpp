#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "starsql/corpus/benchmark.hpp"
#include "starsql/sqleval/label.hpp"

namespace starsql::selection {

struct BucketScore {
    std::size_t count = 0;
    std::size_t ex_correct = 0;
    std::size_t em_count = 0;  // instances with a parseable gold
    std::size_t em_correct = 0;
    double ex = 0;  // percent
    double em = 0;
};

struct EvalReport {
    std::string strategy = "greedy";
    int n_used = 1;
    std::size_t count = 0;
    double ex_overall = 0;
    double em_overall = 0;
    std::map<std::string, BucketScore> per_difficulty;  // easy medium hard extra, plus unparsed if any
    std::size_t missing_predictions = 0;
    std::size_t gold_failures = 0;
    std::size_t pred_unparsed = 0;  // counted EM-incorrect
    std::size_t extraction_failures = 0;
    std::map<std::string, std::string> provenance;
};

// One row per instance; an empty verdict means no prediction or a gold that
// failed to execute, both counted incorrect.
struct InstanceResult {
    const corpus::TaskInstance* instance = nullptr;
    std::optional<sqleval::MatchVerdict> verdict;
    bool missing = false;
    bool gold_failed = false;
};

EvalReport build_report(const std::vector<InstanceResult>& results, std::string strategy = "greedy", int n_used = 1);

nlohmann::json to_json(const EvalReport& r);

// Fixed-width table for terminals.
std::string format_report(const EvalReport& r);

}  // namespace starsql::selection
