#include "starsql/bootstrap/datasets.hpp"

#include <set>
#include <utility>

#include "starsql/modelio/extract.hpp"
#include "starsql/modelio/prompt.hpp"
#include "starsql/util/json_io.hpp"
#include "starsql/util/text.hpp"

namespace starsql::bootstrap {

using nlohmann::json;

ContextMap build_contexts(const std::vector<corpus::TaskInstance>& instances, const corpus::SchemaCatalog& schemas) {
    ContextMap out;
    for (const auto& inst : instances) {
        out[inst.id] = InstanceContext{modelio::build_task_input(inst, schemas.at(inst.db_id)), inst.bucket(),
                                       inst.gold_sql};
    }
    return out;
}

json to_json(const SftRecord& r) {
    return json{{"instance_id", r.instance_id}, {"input", r.input},   {"target", r.target},
                {"origin", to_string(r.origin)}, {"round", r.round}};
}

json to_json(const OrmRecord& r) {
    return json{{"instance_id", r.instance_id}, {"input", r.input},          {"candidate", r.candidate},
                {"label", r.label},             {"origin", to_string(r.origin)}, {"round", r.round}};
}

SftRecord sft_from_json(const json& j) {
    return SftRecord{j.at("instance_id").get<std::string>(), j.at("input").get<std::string>(),
                     j.at("target").get<std::string>(), origin_from_string(j.at("origin").get<std::string>()),
                     j.at("round").get<int>()};
}

OrmRecord orm_from_json(const json& j) {
    return OrmRecord{j.at("instance_id").get<std::string>(), j.at("input").get<std::string>(),
                     j.at("candidate").get<std::string>(),   j.at("label").get<int>(),
                     origin_from_string(j.at("origin").get<std::string>()), j.at("round").get<int>()};
}

namespace {

const InstanceContext& context_of(const ContextMap& contexts, const std::string& id) {
    auto it = contexts.find(id);
    if (it == contexts.end()) throw Error("no instance context for candidate of " + id);
    return it->second;
}

}  // namespace

std::vector<SftRecord> build_sft_dataset(std::vector<Candidate> candidates, const ContextMap& contexts) {
    sort_candidates(candidates);
    std::set<std::pair<std::string, std::string>> seen;
    std::vector<SftRecord> out;
    for (const auto& c : candidates) {
        if (!c.label || !c.sql) continue;
        auto key = std::make_pair(c.instance_id, util::normalize_ws_lower(c.rationale + "\n" + *c.sql));
        if (!seen.insert(std::move(key)).second) continue;
        out.push_back(SftRecord{c.instance_id, context_of(contexts, c.instance_id).input,
                                modelio::format_solution(c.rationale, *c.sql), c.origin, c.round});
    }
    return out;
}

OrmDataset build_orm_dataset(std::vector<Candidate> candidates, const ContextMap& contexts) {
    sort_candidates(candidates);
    OrmDataset out;
    for (const auto& c : candidates) {
        if (!c.sql) {
            if (c.transport_failed) ++out.excluded_transport;
            else ++out.excluded_extraction;
            continue;
        }
        const auto& ctx = context_of(contexts, c.instance_id);
        out.records.push_back(OrmRecord{c.instance_id, ctx.input, modelio::format_solution(c.rationale, *c.sql),
                                        c.label ? 1 : 0, c.origin, c.round});
        auto& bal = out.balance[ctx.bucket];
        (c.label ? bal.positive : bal.negative)++;
    }
    return out;
}

void write_sft(const std::filesystem::path& path, const std::vector<SftRecord>& records) {
    std::vector<json> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(to_json(r));
    util::write_jsonl(path, rows);
}

void write_orm(const std::filesystem::path& path, const std::vector<OrmRecord>& records) {
    std::vector<json> rows;
    rows.reserve(records.size());
    for (const auto& r : records) rows.push_back(to_json(r));
    util::write_jsonl(path, rows);
}

void write_candidates(const std::filesystem::path& path, const std::vector<Candidate>& candidates) {
    std::vector<json> rows;
    rows.reserve(candidates.size());
    for (const auto& c : candidates) rows.push_back(to_json(c));
    util::write_jsonl(path, rows);
}

std::vector<Candidate> read_candidates(const std::filesystem::path& path) {
    std::vector<Candidate> out;
    for (const auto& j : util::read_jsonl(path)) out.push_back(candidate_from_json(j));
    return out;
}

std::string solution_sql(const std::string& target) { return modelio::extract_sql(target).value_or(std::string()); }

}  // namespace starsql::bootstrap
