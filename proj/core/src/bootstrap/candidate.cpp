#include "starsql/bootstrap/candidate.hpp"

#include <algorithm>
#include <tuple>

#include "starsql/util/errors.hpp"

namespace starsql::bootstrap {

std::string to_string(Origin o) { return o == Origin::initial ? "initial" : "rationalized"; }

Origin origin_from_string(const std::string& s) {
    if (s == "initial") return Origin::initial;
    if (s == "rationalized") return Origin::rationalized;
    throw Error("unknown candidate origin '" + s + "'");
}

nlohmann::json to_json(const Candidate& c) {
    nlohmann::json j{{"instance_id", c.instance_id},
                     {"rationale", c.rationale},
                     {"sql", c.sql ? nlohmann::json(*c.sql) : nlohmann::json(nullptr)},
                     {"label", c.label},
                     {"em", c.em ? nlohmann::json(*c.em) : nlohmann::json(nullptr)},
                     {"origin", to_string(c.origin)},
                     {"sample_index", c.sample_index},
                     {"round", c.round},
                     {"transport_failed", c.transport_failed},
                     {"fingerprint", c.fingerprint}};
    return j;
}

Candidate candidate_from_json(const nlohmann::json& j) {
    Candidate c;
    c.instance_id = j.at("instance_id").get<std::string>();
    c.rationale = j.value("rationale", std::string());
    if (j.contains("sql") && j["sql"].is_string()) c.sql = j["sql"].get<std::string>();
    c.label = j.value("label", false);
    if (j.contains("em") && j["em"].is_boolean()) c.em = j["em"].get<bool>();
    c.origin = origin_from_string(j.value("origin", std::string("initial")));
    c.sample_index = j.value("sample_index", 0);
    c.round = j.value("round", 1);
    c.transport_failed = j.value("transport_failed", false);
    c.fingerprint = j.value("fingerprint", std::string());
    return c;
}

bool candidate_order(const Candidate& a, const Candidate& b) {
    return std::tie(a.instance_id, a.origin, a.sample_index) < std::tie(b.instance_id, b.origin, b.sample_index);
}

void sort_candidates(std::vector<Candidate>& cs) { std::stable_sort(cs.begin(), cs.end(), candidate_order); }

}  // namespace starsql::bootstrap
