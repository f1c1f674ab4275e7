#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "starsql/corpus/benchmark.hpp"

namespace starsql::modelio {

struct PromptExemplar {
    std::string question;
    std::string schema_ref;  // db_id
    std::string rationale;
    std::string sql;

    bool operator==(const PromptExemplar&) const = default;
};

// JSON array of {question, db_id, rationale, sql}. Every db_id must be in the catalog.
std::vector<PromptExemplar> load_exemplars(const std::filesystem::path& path, const corpus::SchemaCatalog& catalog);

// The model input X: serialized schema and question, no exemplars.
std::string build_task_input(const corpus::TaskInstance& instance, const corpus::DbSchema& schema);

// Throws InvalidRequest when exemplars is empty. `catalog` resolves each
// exemplar's schema_ref.
std::string build_fewshot_prompt(const std::vector<PromptExemplar>& exemplars, const corpus::TaskInstance& instance,
                                 const corpus::DbSchema& schema, const corpus::SchemaCatalog& catalog);

// The few-shot prompt with a hint section quoting gold_sql inserted before the
// final "Rationale:" cue. Throws InvalidRequest when gold_sql is blank.
std::string build_hint_prompt(const std::vector<PromptExemplar>& exemplars, const corpus::TaskInstance& instance,
                              const corpus::DbSchema& schema, const corpus::SchemaCatalog& catalog,
                              const std::string& gold_sql);

// Completion text for an (R, Y) pair in the format the prompts request.
std::string format_solution(const std::string& rationale, const std::string& sql);

}  // namespace starsql::modelio
