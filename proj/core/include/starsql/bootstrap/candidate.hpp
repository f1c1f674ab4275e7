#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace starsql::bootstrap {

enum class Origin { initial, rationalized };

std::string to_string(Origin o);
Origin origin_from_string(const std::string& s);

struct Candidate {
    std::string instance_id;
    std::string rationale;
    std::optional<std::string> sql;  // empty: extraction failed or no completion
    bool label = false;              // execution match against gold
    std::optional<bool> em;
    Origin origin = Origin::initial;
    int sample_index = 0;  // position within its origin's request
    int round = 1;
    bool transport_failed = false;
    std::string fingerprint;  // digest of the execution result; empty on failure

    bool extraction_failed() const { return !sql.has_value(); }
    bool operator==(const Candidate&) const = default;
};

nlohmann::json to_json(const Candidate& c);
Candidate candidate_from_json(const nlohmann::json& j);

// (instance_id, origin with initial first, sample_index).
bool candidate_order(const Candidate& a, const Candidate& b);

void sort_candidates(std::vector<Candidate>& cs);

}  // namespace starsql::bootstrap
