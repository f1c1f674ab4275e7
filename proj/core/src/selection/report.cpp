#include "starsql/selection/report.hpp"

#include <cmath>

#include <fmt/format.h>

namespace starsql::selection {

using nlohmann::json;

namespace {

double pct(std::size_t num, std::size_t den) { return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) / den; }

// Two decimals so reports are stable to print and diff.
double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

EvalReport build_report(const std::vector<InstanceResult>& results, std::string strategy, int n_used) {
    EvalReport r;
    r.strategy = std::move(strategy);
    r.n_used = n_used;
    for (auto d : {corpus::Difficulty::easy, corpus::Difficulty::medium, corpus::Difficulty::hard,
                   corpus::Difficulty::extra}) {
        r.per_difficulty[corpus::to_string(d)];
    }
    std::size_t ex_total = 0, em_total = 0, em_den = 0;
    for (const auto& res : results) {
        auto& b = r.per_difficulty[res.instance->bucket()];
        b.count++;
        r.count++;
        r.missing_predictions += res.missing ? 1 : 0;
        r.gold_failures += res.gold_failed ? 1 : 0;
        const bool gold_parses = !res.instance->unparsed();
        if (gold_parses) {
            b.em_count++;
            em_den++;
        }
        if (!res.verdict) continue;
        const auto& v = *res.verdict;
        if (v.ex) {
            b.ex_correct++;
            ex_total++;
        }
        if (gold_parses) {
            if (v.em.value_or(false)) {
                b.em_correct++;
                em_total++;
            }
            if (!v.em) r.pred_unparsed++;
        }
    }
    for (auto& [_, b] : r.per_difficulty) {
        b.ex = round2(pct(b.ex_correct, b.count));
        b.em = round2(pct(b.em_correct, b.em_count));
    }
    r.ex_overall = round2(pct(ex_total, r.count));
    r.em_overall = round2(pct(em_total, em_den));
    return r;
}

json to_json(const EvalReport& r) {
    json per = json::object();
    for (const auto& [k, b] : r.per_difficulty) {
        per[k] = json{{"count", b.count}, {"ex", b.ex},         {"em", b.em},
                      {"ex_correct", b.ex_correct}, {"em_count", b.em_count}, {"em_correct", b.em_correct}};
    }
    return json{{"strategy", r.strategy},
                {"n_used", r.n_used},
                {"count", r.count},
                {"ex_overall", r.ex_overall},
                {"em_overall", r.em_overall},
                {"per_difficulty", per},
                {"missing_predictions", r.missing_predictions},
                {"gold_failures", r.gold_failures},
                {"pred_unparsed", r.pred_unparsed},
                {"extraction_failures", r.extraction_failures},
                {"provenance", r.provenance}};
}

std::string format_report(const EvalReport& r) {
    std::string out = fmt::format("strategy {} (n={}), {} instances\n", r.strategy, r.n_used, r.count);
    out += fmt::format("{:<10}{:>8}{:>9}{:>9}\n", "level", "count", "EX", "EM");
    for (const auto& [k, b] : r.per_difficulty) {
        out += fmt::format("{:<10}{:>8}{:>9.2f}{:>9.2f}\n", k, b.count, b.ex, b.em);
    }
    out += fmt::format("{:<10}{:>8}{:>9.2f}{:>9.2f}\n", "all", r.count, r.ex_overall, r.em_overall);
    if (r.missing_predictions) out += fmt::format("missing predictions: {}\n", r.missing_predictions);
    if (r.gold_failures) out += fmt::format("gold execution failures: {}\n", r.gold_failures);
    if (r.pred_unparsed) out += fmt::format("predictions outside the EM grammar: {}\n", r.pred_unparsed);
    return out;
}

}  // namespace starsql::selection
