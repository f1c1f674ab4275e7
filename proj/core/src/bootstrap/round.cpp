#include "starsql/bootstrap/round.hpp"

#include <fstream>

#include <spdlog/spdlog.h>

#include "starsql/sqleval/errors.hpp"
#include "starsql/util/errors.hpp"
#include "starsql/util/json_io.hpp"
#include "starsql/util/parallel.hpp"
#include "starsql/util/random.hpp"

namespace starsql::bootstrap {

using nlohmann::json;

std::string to_string(LabelMetric m) { return m == LabelMetric::ex ? "ex" : "em"; }

LabelMetric label_metric_from_string(const std::string& s) {
    if (s == "ex") return LabelMetric::ex;
    if (s == "em") return LabelMetric::em;
    throw ConfigError("unknown label metric '" + s + "'");
}

std::int64_t derive_seed(std::uint64_t seed, const std::string& instance_id, int round, Origin origin) {
    std::uint64_t h = util::fnv1a(std::to_string(seed));
    h = util::fnv1a("|" + instance_id, h);
    h = util::fnv1a("|" + std::to_string(round) + "|" + to_string(origin), h);
    return static_cast<std::int64_t>(h & 0x7fffffffULL);
}

json to_json(const InstanceOutcome& o) {
    json cs = json::array();
    for (const auto& c : o.candidates) cs.push_back(to_json(c));
    return json{{"instance_id", o.instance_id},         {"excluded", o.excluded},     {"reason", o.reason},
                {"correct_initial", o.correct_initial}, {"hint_attempts", o.hint_attempts}, {"candidates", cs}};
}

InstanceOutcome instance_outcome_from_json(const json& j) {
    InstanceOutcome o;
    o.instance_id = j.at("instance_id").get<std::string>();
    o.excluded = j.value("excluded", false);
    o.reason = j.value("reason", std::string());
    o.correct_initial = j.value("correct_initial", 0);
    o.hint_attempts = j.value("hint_attempts", 0);
    for (const auto& c : j.at("candidates")) o.candidates.push_back(candidate_from_json(c));
    return o;
}

Checkpoint::Checkpoint(std::filesystem::path path) : path_(std::move(path)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) return;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        try {
            auto o = instance_outcome_from_json(json::parse(line));
            done_.emplace(o.instance_id, std::move(o));
        } catch (const std::exception& e) {
            spdlog::warn("{}: skipping unreadable checkpoint line: {}", path_.string(), e.what());
        }
    }
}

void Checkpoint::append(const InstanceOutcome& o) {
    std::lock_guard lock(mu_);
    if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot append to checkpoint " + path_.string());
    out << util::canonical_dump(to_json(o)) << '\n';
    out.flush();
    if (!out) throw IoError("write failed for checkpoint " + path_.string());
    done_[o.instance_id] = o;
}

json to_json(const BucketStats& s) {
    return json{{"instances", s.instances},
                {"correct_initial", s.correct_initial},
                {"solved_initial", s.solved_initial},
                {"L", s.hint_attempts},
                {"rationalization_successes", s.rationalization_successes},
                {"sft_records", s.sft_records},
                {"orm_positive", s.orm_positive},
                {"orm_negative", s.orm_negative},
                {"transport_failures", s.transport_failures},
                {"extraction_failures", s.extraction_failures}};
}

BucketStats bucket_stats_from_json(const json& j) {
    BucketStats s;
    s.instances = j.value("instances", std::size_t{0});
    s.correct_initial = j.value("correct_initial", std::size_t{0});
    s.solved_initial = j.value("solved_initial", std::size_t{0});
    s.hint_attempts = j.value("L", std::size_t{0});
    s.rationalization_successes = j.value("rationalization_successes", std::size_t{0});
    s.sft_records = j.value("sft_records", std::size_t{0});
    s.orm_positive = j.value("orm_positive", std::size_t{0});
    s.orm_negative = j.value("orm_negative", std::size_t{0});
    s.transport_failures = j.value("transport_failures", std::size_t{0});
    s.extraction_failures = j.value("extraction_failures", std::size_t{0});
    return s;
}

RoundRunner::RoundRunner(const corpus::Benchmark& benchmark, sqleval::Labeler& labeler,
                         modelio::ModelEndpoint& generator, std::vector<modelio::PromptExemplar> exemplars,
                         RoundConfig config)
    : benchmark_(benchmark),
      labeler_(labeler),
      generator_(generator),
      exemplars_(std::move(exemplars)),
      config_(std::move(config)) {
    if (config_.k < 1) throw ConfigError("k must be >= 1");
    if (config_.temperature == 0 && config_.k > 1) throw ConfigError("temperature 0 allows only k = 1");
}

std::vector<Candidate> RoundRunner::sample(const corpus::TaskInstance& inst, const std::string& prompt, int n,
                                           Origin origin, int round, const std::string& generator_ref) {
    modelio::GenerationRequest req;
    req.prompt = prompt;
    req.n = n;
    req.temperature = config_.temperature;
    req.max_tokens = config_.max_tokens;
    req.stop = config_.stop;
    req.seed = derive_seed(config_.seed, inst.id, round, origin);
    req.model = generator_ref;

    std::vector<Candidate> out;
    std::vector<modelio::Completion> completions;
    bool failed = false;
    try {
        completions = generator_.sample_completions(req);
    } catch (const modelio::TransportExhausted& e) {
        spdlog::warn("{}: {} request failed after retries, {} slots counted incorrect: {}", inst.id,
                     to_string(origin), n, e.what());
        failed = true;
    }
    for (int i = 0; i < n; ++i) {
        Candidate c;
        c.instance_id = inst.id;
        c.origin = origin;
        c.sample_index = i;
        c.round = round;
        if (failed) {
            c.transport_failed = true;
        } else {
            auto& comp = completions[static_cast<std::size_t>(i)];
            c.rationale = std::move(comp.rationale);
            c.sql = std::move(comp.sql);
            label(inst, c);
        }
        out.push_back(std::move(c));
    }
    return out;
}

void RoundRunner::label(const corpus::TaskInstance& inst, Candidate& c) {
    if (!c.sql) {
        c.label = false;
        return;
    }
    auto v = labeler_.label(inst, *c.sql);
    c.em = v.em;
    c.fingerprint = v.fingerprint;
    c.label = config_.metric == LabelMetric::ex ? v.ex : v.em.value_or(false);
}

std::vector<Candidate> RoundRunner::rationalize(const corpus::TaskInstance& inst, int L, int round,
                                                const std::string& generator_ref) {
    if (L <= 0) return {};
    const auto& schema = benchmark_.schema(inst.db_id);
    auto prompt = modelio::build_hint_prompt(exemplars_, inst, schema, benchmark_.schemas, inst.gold_sql);
    return sample(inst, prompt, L, Origin::rationalized, round, generator_ref);
}

InstanceOutcome RoundRunner::process(const corpus::TaskInstance& inst, int round, const std::string& generator_ref) {
    InstanceOutcome o;
    o.instance_id = inst.id;
    try {
        labeler_.gold(inst);
    } catch (const sqleval::GoldExecutionFailed& e) {
        spdlog::warn("excluding {}: {}", inst.id, e.what());
        o.excluded = true;
        o.reason = e.what();
        return o;
    }
    const auto& schema = benchmark_.schema(inst.db_id);
    auto prompt = modelio::build_fewshot_prompt(exemplars_, inst, schema, benchmark_.schemas);
    o.candidates = sample(inst, prompt, config_.k, Origin::initial, round, generator_ref);
    for (const auto& c : o.candidates) o.correct_initial += c.label ? 1 : 0;
    o.hint_attempts = std::max(0, config_.k - o.correct_initial);
    if (config_.use_hints) {
        auto hinted = rationalize(inst, o.hint_attempts, round, generator_ref);
        o.candidates.insert(o.candidates.end(), hinted.begin(), hinted.end());
    }
    return o;
}

RoundResult RoundRunner::run_round(const std::vector<corpus::TaskInstance>& pool, int round,
                                   const std::string& generator_ref, const std::filesystem::path& checkpoint_path) {
    if (pool.empty()) throw ConfigError("training pool is empty");
    Checkpoint checkpoint(checkpoint_path);
    if (!checkpoint.done().empty()) {
        spdlog::info("round {}: resuming with {} of {} instances done", round, checkpoint.done().size(), pool.size());
    }
    auto outcomes = util::parallel_map(pool.size(), config_.parallelism, [&](std::size_t i) {
        const auto& inst = pool[i];
        if (auto it = checkpoint.done().find(inst.id); it != checkpoint.done().end()) return it->second;
        auto o = process(inst, round, generator_ref);
        checkpoint.append(o);
        return o;
    });
    RoundResult res;
    for (auto& o : outcomes) {
        if (o.excluded) res.excluded.push_back(o.instance_id);
        res.candidates.insert(res.candidates.end(), o.candidates.begin(), o.candidates.end());
    }
    res.outcomes = std::move(outcomes);
    sort_candidates(res.candidates);
    return res;
}

std::map<std::string, BucketStats> round_stats(const std::vector<corpus::TaskInstance>& pool,
                                               const RoundResult& result, const std::vector<SftRecord>& sft,
                                               const OrmDataset& orm) {
    std::map<std::string, BucketStats> stats;
    std::map<std::string, std::string> bucket_of;
    for (const auto& inst : pool) {
        bucket_of[inst.id] = inst.bucket();
        stats[inst.bucket()].instances++;
    }
    for (const auto& o : result.outcomes) {
        auto& s = stats[bucket_of.at(o.instance_id)];
        s.correct_initial += static_cast<std::size_t>(o.correct_initial);
        s.solved_initial += o.correct_initial > 0 ? 1 : 0;
        s.hint_attempts += static_cast<std::size_t>(o.hint_attempts);
        bool rationalized = false;
        for (const auto& c : o.candidates) {
            if (c.origin == Origin::rationalized && c.label) rationalized = true;
            if (c.transport_failed) s.transport_failures++;
            else if (!c.sql) s.extraction_failures++;
        }
        s.rationalization_successes += rationalized ? 1 : 0;
    }
    for (const auto& r : sft) stats[bucket_of.at(r.instance_id)].sft_records++;
    for (const auto& [bucket, bal] : orm.balance) {
        stats[bucket].orm_positive += bal.positive;
        stats[bucket].orm_negative += bal.negative;
    }
    return stats;
}

}  // namespace starsql::bootstrap
