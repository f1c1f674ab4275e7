#include "starsql/modelio/prompt.hpp"

#include <spdlog/spdlog.h>

#include "starsql/modelio/errors.hpp"
#include "starsql/util/json_io.hpp"
#include "starsql/util/text.hpp"

namespace starsql::modelio {

namespace {

constexpr const char* kInstruction =
    "Translate the question into a SQL query for the given database schema. "
    "First reason step by step, then write the final query in a ```sql code block.\n";

const corpus::DbSchema& exemplar_schema(const PromptExemplar& ex, const corpus::SchemaCatalog& catalog) {
    auto it = catalog.find(ex.schema_ref);
    if (it == catalog.end()) throw InvalidRequest("exemplar references unknown db_id '" + ex.schema_ref + "'");
    return it->second;
}

std::string fence(const std::string& sql) { return "```sql\n" + sql + "\n```"; }

std::string header(const std::vector<PromptExemplar>& exemplars, const corpus::SchemaCatalog& catalog) {
    if (exemplars.empty()) throw InvalidRequest("few-shot prompt needs at least one exemplar");
    std::string out = kInstruction;
    for (std::size_t i = 0; i < exemplars.size(); ++i) {
        const auto& ex = exemplars[i];
        out += "\n### Example " + std::to_string(i + 1) + "\n";
        out += "Schema:\n" + exemplar_schema(ex, catalog).serialize_compact() + "\n";
        out += "Question: " + ex.question + "\n";
        out += "Rationale: " + ex.rationale + "\n";
        out += "SQL:\n" + fence(ex.sql) + "\n";
    }
    out += "\n### Task\n";
    return out;
}

}  // namespace

std::vector<PromptExemplar> load_exemplars(const std::filesystem::path& path, const corpus::SchemaCatalog& catalog) {
    auto doc = util::read_json(path);
    if (!doc.is_array()) throw IoError(path.string() + ": exemplar file must hold a JSON array");
    std::vector<PromptExemplar> out;
    for (const auto& e : doc) {
        PromptExemplar ex{e.at("question").get<std::string>(), e.at("db_id").get<std::string>(),
                          e.at("rationale").get<std::string>(), e.at("sql").get<std::string>()};
        exemplar_schema(ex, catalog);
        out.push_back(std::move(ex));
    }
    return out;
}

std::string build_task_input(const corpus::TaskInstance& instance, const corpus::DbSchema& schema) {
    return "Schema:\n" + schema.serialize_compact() + "\nQuestion: " + instance.question + "\n";
}

std::string build_fewshot_prompt(const std::vector<PromptExemplar>& exemplars, const corpus::TaskInstance& instance,
                                 const corpus::DbSchema& schema, const corpus::SchemaCatalog& catalog) {
    std::string out = header(exemplars, catalog) + build_task_input(instance, schema) + "Rationale:";
    spdlog::debug("few-shot prompt for {}: {} bytes", instance.id, out.size());
    return out;
}

std::string build_hint_prompt(const std::vector<PromptExemplar>& exemplars, const corpus::TaskInstance& instance,
                              const corpus::DbSchema& schema, const corpus::SchemaCatalog& catalog,
                              const std::string& gold_sql) {
    if (util::trim(gold_sql).empty()) throw InvalidRequest("hint prompt needs a gold query");
    std::string out = header(exemplars, catalog) + build_task_input(instance, schema);
    out += "Hint: the correct query is\n" + fence(gold_sql) + "\n";
    out += "Explain step by step how to arrive at this query, in the same style as the examples, "
           "and end with the final SQL.\n";
    out += "Rationale:";
    spdlog::debug("hint prompt for {}: {} bytes", instance.id, out.size());
    return out;
}

std::string format_solution(const std::string& rationale, const std::string& sql) {
    return rationale + "\nSQL:\n" + fence(sql);
}

}  // namespace starsql::modelio
