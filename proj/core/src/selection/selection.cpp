#include "starsql/selection/selection.hpp"

#include <random>

#include "starsql/util/json_io.hpp"
#include "starsql/util/random.hpp"

namespace starsql::selection {

std::string to_string(Strategy s) {
    switch (s) {
        case Strategy::greedy: return "greedy";
        case Strategy::best_of_n: return "best_of_n";
        case Strategy::self_consistency: return "self_consistency";
    }
    return "greedy";
}

Strategy strategy_from_string(const std::string& s) {
    if (s == "greedy") return Strategy::greedy;
    if (s == "best_of_n" || s == "orm") return Strategy::best_of_n;
    if (s == "self_consistency" || s == "sc") return Strategy::self_consistency;
    throw ConfigError("unknown strategy '" + s + "'");
}

namespace {

void check(const std::vector<ScoredCandidate>& pool, int n) {
    if (n < 1) throw ConfigError("n must be >= 1");
    if (pool.empty()) throw EmptyPool("selection over an empty pool");
    if (static_cast<std::size_t>(n) > pool.size()) {
        throw InsufficientPool(pool.front().candidate.instance_id, pool.size(), static_cast<std::size_t>(n));
    }
}

SelectionOutcome outcome(const std::vector<ScoredCandidate>& pool, Strategy s, int n, int idx) {
    SelectionOutcome o;
    o.strategy = s;
    o.n_used = n;
    o.chosen_index = idx;
    o.correct = pool[static_cast<std::size_t>(idx)].candidate.label;
    return o;
}

}  // namespace

SelectionOutcome greedy(const std::vector<ScoredCandidate>& pool) {
    check(pool, 1);
    return outcome(pool, Strategy::greedy, 1, 0);
}

SelectionOutcome best_of_n(const std::vector<ScoredCandidate>& pool, int n) {
    check(pool, n);
    int best = 0;
    for (int i = 1; i < n; ++i) {
        if (pool[static_cast<std::size_t>(i)].score > pool[static_cast<std::size_t>(best)].score) best = i;
    }
    return outcome(pool, Strategy::best_of_n, n, best);
}

SelectionOutcome self_consistency(const std::vector<ScoredCandidate>& pool, int n) {
    check(pool, n);
    struct Cluster {
        int size = 0;
        int first = 0;
    };
    std::map<std::string, Cluster> clusters;
    for (int i = 0; i < n; ++i) {
        const auto& fp = pool[static_cast<std::size_t>(i)].candidate.fingerprint;
        if (fp.empty()) continue;
        auto [it, inserted] = clusters.try_emplace(fp, Cluster{0, i});
        it->second.size++;
    }
    if (clusters.empty()) {
        auto o = outcome(pool, Strategy::self_consistency, n, 0);
        o.all_failed = true;
        return o;
    }
    const Cluster* best = nullptr;
    for (const auto& [_, c] : clusters) {
        if (!best || c.size > best->size || (c.size == best->size && c.first < best->first)) best = &c;
    }
    return outcome(pool, Strategy::self_consistency, n, best->first);
}

bool pass_at_n(const std::vector<ScoredCandidate>& pool, int n) {
    check(pool, n);
    for (int i = 0; i < n; ++i) {
        if (pool[static_cast<std::size_t>(i)].candidate.label) return true;
    }
    return false;
}

Scorer oracle_scorer() {
    return [](const std::string&, const bootstrap::Candidate& c) { return c.label ? 1.0 : 0.0; };
}

Scorer random_scorer(std::uint64_t seed) {
    return [seed](const std::string& id, const bootstrap::Candidate& c) {
        std::uint64_t h = util::fnv1a(id, util::fnv1a(std::to_string(seed)));
        h = util::fnv1a("#" + std::to_string(c.sample_index), h);
        std::mt19937_64 rng(h);
        return util::uniform_unit(rng);
    };
}

void rescore(PoolMap& pools, const Scorer& scorer) {
    for (auto& [id, pool] : pools) {
        for (auto& sc : pool) sc.score = scorer(id, sc.candidate);
    }
}

void write_pools(const std::filesystem::path& path, const PoolMap& pools) {
    std::vector<nlohmann::json> rows;
    for (const auto& [id, pool] : pools) {
        nlohmann::json cs = nlohmann::json::array();
        for (const auto& sc : pool) {
            auto j = bootstrap::to_json(sc.candidate);
            j["score"] = sc.score;
            cs.push_back(std::move(j));
        }
        rows.push_back({{"instance_id", id}, {"candidates", std::move(cs)}});
    }
    util::write_jsonl(path, rows);
}

PoolMap read_pools(const std::filesystem::path& path) {
    PoolMap pools;
    for (const auto& row : util::read_jsonl(path)) {
        auto id = row.at("instance_id").get<std::string>();
        auto& pool = pools[id];
        for (const auto& c : row.at("candidates")) {
            ScoredCandidate sc;
            sc.candidate = bootstrap::candidate_from_json(c);
            sc.score = c.value("score", 0.0);
            if (!(sc.score >= 0.0 && sc.score <= 1.0)) {
                throw IoError(path.string() + ": score outside [0,1] for " + id);
            }
            pool.push_back(std::move(sc));
        }
    }
    return pools;
}

}  // namespace starsql::selection
