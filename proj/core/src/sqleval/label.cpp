#include "starsql/sqleval/label.hpp"

#include "starsql/sqleval/errors.hpp"
#include "starsql/sqleval/execution_match.hpp"

namespace starsql::sqleval {

nlohmann::json to_json(const MatchVerdict& v) {
    nlohmann::json out{{"em", v.em ? nlohmann::json(*v.em) : nlohmann::json(nullptr)},
                       {"ex", v.ex},
                       {"status", to_string(v.pred_status)}};
    if (!v.pred_error.empty()) out["error"] = v.pred_error;
    return out;
}

Labeler::Labeler(const corpus::Benchmark& benchmark, ExecOptions opts) : benchmark_(benchmark), opts_(opts) {}

const ExactMatcher& Labeler::matcher(const std::string& db_id) {
    std::lock_guard lock(mu_);
    auto& slot = matchers_[db_id];
    if (!slot) slot = std::make_unique<ExactMatcher>(benchmark_.schema(db_id));
    return *slot;
}

ExecResult Labeler::execute(const corpus::TaskInstance& inst, const std::string& sql) const {
    return execute_query(benchmark_.db_path(inst.db_id), sql, opts_);
}

std::shared_ptr<const GoldInfo> Labeler::gold(const corpus::TaskInstance& inst) {
    {
        std::lock_guard lock(mu_);
        if (auto it = golds_.find(inst.id); it != golds_.end()) return it->second;
    }
    auto info = std::make_shared<GoldInfo>();
    info->result = execute(inst, inst.gold_sql);
    if (!info->result.ok()) {
        throw GoldExecutionFailed(inst.id + ": gold query failed (" + to_string(info->result.status) +
                                  "): " + info->result.error);
    }
    try {
        info->parse = parse_sql_raw(inst.gold_sql, matcher(inst.db_id).index());
    } catch (const ParseError&) {
        info->parse.reset();
    }
    info->order_matters = gold_order_matters(inst.gold_sql, info->parse ? &*info->parse : nullptr);
    std::lock_guard lock(mu_);
    return golds_.emplace(inst.id, std::move(info)).first->second;
}

MatchVerdict Labeler::label(const corpus::TaskInstance& inst, const std::string& pred_sql) {
    auto g = gold(inst);
    MatchVerdict v;
    ExecResult pred = execute(inst, pred_sql);
    v.pred_status = pred.status;
    v.pred_error = pred.error;
    v.ex = results_match(pred, g->result, g->order_matters);
    v.fingerprint = result_fingerprint(pred, g->order_matters);
    v.em = matcher(inst.db_id).compare(pred_sql, inst.gold_sql).match;
    return v;
}

}  // namespace starsql::sqleval
