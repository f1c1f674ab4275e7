#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "starsql/bootstrap/candidate.hpp"
#include "starsql/util/errors.hpp"

namespace starsql::selection {

class EmptyPool : public Error {
public:
    using Error::Error;
};

class InsufficientPool : public Error {
public:
    InsufficientPool(std::string instance_id, std::size_t have, std::size_t need)
        : Error("pool for '" + instance_id + "' has " + std::to_string(have) + " candidates, need " +
                std::to_string(need)),
          instance_id_(std::move(instance_id)) {}
    const std::string& instance_id() const { return instance_id_; }

private:
    std::string instance_id_;
};

struct ScoredCandidate {
    bootstrap::Candidate candidate;
    double score = 0;  // r_T in [0,1]
};

enum class Strategy { greedy, best_of_n, self_consistency };

std::string to_string(Strategy s);
Strategy strategy_from_string(const std::string& s);

struct SelectionOutcome {
    Strategy strategy = Strategy::greedy;
    int n_used = 0;
    int chosen_index = 0;  // position in the pool
    bool correct = false;
    bool all_failed = false;  // self-consistency fallback to index 0
};

// Pools are in sample_index order; every strategy looks at the first n.
SelectionOutcome greedy(const std::vector<ScoredCandidate>& pool);

// Highest score among the first n, lowest index on ties.
SelectionOutcome best_of_n(const std::vector<ScoredCandidate>& pool, int n);

// Largest cluster of equal execution fingerprints among the first n; ties go
// to the cluster holding the lowest index, whose lowest index is chosen.
// Candidates without a fingerprint (errors, timeouts) form no cluster.
SelectionOutcome self_consistency(const std::vector<ScoredCandidate>& pool, int n);

// Any correct among the first n.
bool pass_at_n(const std::vector<ScoredCandidate>& pool, int n);

using Scorer = std::function<double(const std::string& instance_id, const bootstrap::Candidate&)>;

// score = label.
Scorer oracle_scorer();

// Uniform in [0,1), a pure function of (seed, instance, sample index).
Scorer random_scorer(std::uint64_t seed);

using PoolMap = std::map<std::string, std::vector<ScoredCandidate>>;

void rescore(PoolMap& pools, const Scorer& scorer);

// JSONL, one line per instance: {instance_id, candidates: [candidate + score]}.
// Candidates are stored in pool order.
void write_pools(const std::filesystem::path& path, const PoolMap& pools);
PoolMap read_pools(const std::filesystem::path& path);

}  // namespace starsql::selection
