#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "starsql/corpus/benchmark.hpp"
#include "starsql/sqleval/exact_match.hpp"
#include "starsql/sqleval/executor.hpp"

namespace starsql::sqleval {

struct MatchVerdict {
    std::optional<bool> em;  // empty when either side does not parse
    bool ex = false;
    ExecStatus pred_status = ExecStatus::sql_error;
    std::string pred_error;
    std::string fingerprint;  // of the predicted result; empty on failure
};

nlohmann::json to_json(const MatchVerdict& v);

struct GoldInfo {
    ExecResult result;
    bool order_matters = false;
    std::optional<Query> parse;
};

// Scores predictions against instance golds. Gold executions and per-database
// matchers are cached; safe to call from several threads.
class Labeler {
public:
    explicit Labeler(const corpus::Benchmark& benchmark, ExecOptions opts = {});

    // Throws GoldExecutionFailed when the gold query does not execute.
    std::shared_ptr<const GoldInfo> gold(const corpus::TaskInstance& inst);

    MatchVerdict label(const corpus::TaskInstance& inst, const std::string& pred_sql);

    ExecResult execute(const corpus::TaskInstance& inst, const std::string& sql) const;

    const ExactMatcher& matcher(const std::string& db_id);

private:
    const corpus::Benchmark& benchmark_;
    ExecOptions opts_;
    std::mutex mu_;
    std::map<std::string, std::shared_ptr<const GoldInfo>> golds_;
    std::map<std::string, std::unique_ptr<ExactMatcher>> matchers_;
};

}  // namespace starsql::sqleval
