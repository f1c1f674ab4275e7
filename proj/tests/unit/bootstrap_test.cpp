#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "fixtures.hpp"
#include "scripted.hpp"
#include "starsql/bootstrap/datasets.hpp"
#include "starsql/bootstrap/loop.hpp"
#include "starsql/bootstrap/round.hpp"
#include "starsql/sqleval/label.hpp"
#include "starsql/util/json_io.hpp"

using namespace starsql;
using namespace starsql::bootstrap;
using namespace starsql::testing;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const json& truth() {
    static const json t = util::read_json(mini_dir() / "truth.json");
    return t;
}

struct Rig {
    const corpus::Benchmark& b = mini_benchmark();
    sqleval::Labeler labeler{b};
    std::shared_ptr<ScriptedTransport> script = std::make_shared<ScriptedTransport>(mini_dir() / "script.json");
    modelio::ModelEndpoint endpoint;
    RoundRunner runner;
    std::vector<corpus::TaskInstance> pool = b.split(corpus::Split::train);

    explicit Rig(RoundConfig rc = {}) : endpoint(config(), script), runner(b, labeler, endpoint, default_exemplars(b), rc) {}

    static modelio::EndpointConfig config() {
        modelio::EndpointConfig c;
        c.model_name = "base";
        c.backoff = std::chrono::milliseconds(1);
        return c;
    }
};

struct Built {
    RoundResult result;
    std::vector<SftRecord> sft;
    OrmDataset orm;
};

Built run_one(Rig& rig, const fs::path& dir) {
    Built out;
    out.result = rig.runner.run_round(rig.pool, 1, "base", dir / "checkpoint.jsonl");
    auto ctx = build_contexts(rig.pool, rig.b.schemas);
    out.sft = build_sft_dataset(out.result.candidates, ctx);
    out.orm = build_orm_dataset(out.result.candidates, ctx);
    return out;
}

std::size_t generation_calls(const InstanceOutcome& o) { return 1 + (o.hint_attempts > 0 ? 1 : 0); }

}  // namespace

TEST(Round, MatchesTruthTable) {
    Rig rig;
    auto built = run_one(rig, temp_dir("round"));
    const auto& t = truth()["instances"];
    ASSERT_EQ(rig.pool.size(), t.size());
    ASSERT_EQ(built.result.outcomes.size(), t.size());
    EXPECT_TRUE(built.result.excluded.empty());

    std::map<std::string, std::size_t> sft_by, pos_by, neg_by;
    for (const auto& r : built.sft) sft_by[r.instance_id]++;
    for (const auto& r : built.orm.records) (r.label ? pos_by : neg_by)[r.instance_id]++;

    for (std::size_t i = 0; i < t.size(); ++i) {
        const auto& want = t[i];
        const auto& o = built.result.outcomes[i];
        SCOPED_TRACE(o.instance_id);
        EXPECT_EQ(o.instance_id, rig.pool[i].id);
        EXPECT_EQ(rig.pool[i].bucket(), want["bucket"]);
        EXPECT_EQ(o.correct_initial, want["correct_initial"].get<int>());
        EXPECT_EQ(o.hint_attempts, want["L"].get<int>());
        std::vector<bool> init, hint;
        int extraction = 0;
        for (const auto& c : o.candidates) {
            (c.origin == Origin::initial ? init : hint).push_back(c.label);
            extraction += c.extraction_failed() ? 1 : 0;
            EXPECT_FALSE(c.transport_failed);
        }
        EXPECT_EQ(init, want["initial_labels"].get<std::vector<bool>>());
        EXPECT_EQ(hint, want["hint_labels"].get<std::vector<bool>>());
        EXPECT_EQ(extraction, want["extraction_failures"].get<int>());
        EXPECT_EQ(sft_by[o.instance_id], want["sft"].get<std::size_t>());
        EXPECT_EQ(pos_by[o.instance_id], want["orm_positive"].get<std::size_t>());
        EXPECT_EQ(neg_by[o.instance_id], want["orm_negative"].get<std::size_t>());
    }
    EXPECT_EQ(built.sft.size(), 80u);
    EXPECT_EQ(built.orm.records.size(), 241u);
}

TEST(Round, StatsPerBucket) {
    Rig rig;
    auto built = run_one(rig, temp_dir("round"));
    auto stats = round_stats(rig.pool, built.result, built.sft, built.orm);
    std::map<std::string, BucketStats> want;
    for (const auto& t : truth()["instances"]) {
        auto& s = want[t["bucket"].get<std::string>()];
        s.instances++;
        s.correct_initial += t["correct_initial"].get<std::size_t>();
        s.solved_initial += t["correct_initial"].get<int>() > 0 ? 1 : 0;
        s.hint_attempts += t["L"].get<std::size_t>();
        s.rationalization_successes += t["rationalization_success"].get<bool>() ? 1 : 0;
        s.sft_records += t["sft"].get<std::size_t>();
        s.orm_positive += t["orm_positive"].get<std::size_t>();
        s.orm_negative += t["orm_negative"].get<std::size_t>();
        s.extraction_failures += t["extraction_failures"].get<std::size_t>();
    }
    ASSERT_EQ(stats.size(), 4u);
    for (const auto& [bucket, w] : want) {
        SCOPED_TRACE(bucket);
        EXPECT_EQ(to_json(stats.at(bucket)), to_json(w));
    }
    EXPECT_EQ(bucket_stats_from_json(to_json(stats.at("hard"))).hint_attempts, stats.at("hard").hint_attempts);
}

// Every sampled slot ends up exactly once: an ORM record, or excluded for a
// failed extraction or a failed request.
TEST(Round, ConservationLaw) {
    Rig rig;
    auto built = run_one(rig, temp_dir("round"));
    std::size_t slots = 0, positives = 0;
    for (const auto& o : built.result.outcomes) {
        int init = 0, hint = 0;
        for (const auto& c : o.candidates) (c.origin == Origin::initial ? init : hint)++;
        EXPECT_EQ(init, rig.runner.config().k);
        EXPECT_EQ(hint, o.hint_attempts);
        EXPECT_EQ(o.hint_attempts, std::max(0, rig.runner.config().k - o.correct_initial));
        slots += static_cast<std::size_t>(init + hint);
        for (const auto& c : o.candidates) positives += c.label ? 1 : 0;
    }
    EXPECT_EQ(built.result.candidates.size(), slots);
    EXPECT_EQ(built.orm.records.size() + built.orm.excluded_extraction + built.orm.excluded_transport, slots);
    std::size_t orm_pos = 0;
    for (const auto& r : built.orm.records) orm_pos += static_cast<std::size_t>(r.label);
    EXPECT_EQ(orm_pos, positives);
    EXPECT_LE(built.sft.size(), positives);
}

TEST(Round, SftIsPureAndHintFree) {
    Rig rig;
    auto built = run_one(rig, temp_dir("round"));
    ASSERT_FALSE(built.sft.empty());
    bool saw_rationalized = false;
    for (const auto& r : built.sft) {
        const auto* inst = rig.b.find(r.instance_id);
        ASSERT_NE(inst, nullptr);
        EXPECT_TRUE(rig.labeler.label(*inst, solution_sql(r.target)).ex) << r.target;
        EXPECT_EQ(r.input, modelio::build_task_input(*inst, rig.b.schema(inst->db_id)));
        EXPECT_EQ(r.input.find("Hint"), std::string::npos);
        EXPECT_EQ(r.target.find("Hint"), std::string::npos);
        EXPECT_EQ(r.input.find("### Example"), std::string::npos);
        saw_rationalized |= r.origin == Origin::rationalized;
    }
    EXPECT_TRUE(saw_rationalized);
    for (const auto& r : built.orm.records) {
        EXPECT_EQ(r.input.find("Hint"), std::string::npos);
        EXPECT_EQ(r.candidate.find("Hint"), std::string::npos);
    }
}

// Dropping the hint step costs most on the hardest bucket.
TEST(Round, HintsWidenTailCoverage) {
    RoundConfig plain;
    plain.use_hints = false;
    Rig with, without(plain);
    auto a = run_one(with, temp_dir("round"));
    auto b = run_one(without, temp_dir("round"));
    auto sa = round_stats(with.pool, a.result, a.sft, a.orm);
    auto sb = round_stats(without.pool, b.result, b.sft, b.orm);
    std::size_t extra_without = 0;
    for (const auto& t : truth()["instances"]) {
        if (t["bucket"] == "extra") extra_without += t["sft_without_hints"].get<std::size_t>();
    }
    EXPECT_EQ(sb.at("extra").sft_records, extra_without);
    EXPECT_GT(sa.at("extra").sft_records, sb.at("extra").sft_records);
    for (const auto& o : b.result.outcomes) {
        for (const auto& c : o.candidates) EXPECT_EQ(c.origin, Origin::initial);
    }
}

TEST(Round, SingleSample) {
    RoundConfig rc;
    rc.k = 1;
    Rig rig(rc);
    std::vector<corpus::TaskInstance> one{rig.pool[12]};
    auto res = rig.runner.run_round(one, 1, "base", temp_dir("round") / "c.jsonl");
    ASSERT_EQ(res.outcomes.size(), 1u);
    const auto& o = res.outcomes[0];
    EXPECT_EQ(o.hint_attempts, 1 - o.correct_initial);
    EXPECT_EQ(res.candidates.size(), static_cast<std::size_t>(1 + o.hint_attempts));
}

TEST(Round, RejectsBadConfig) {
    const auto& b = mini_benchmark();
    sqleval::Labeler labeler(b);
    modelio::ModelEndpoint ep(Rig::config(), std::make_shared<ScriptedTransport>(json::object()));
    RoundConfig rc;
    rc.k = 0;
    EXPECT_THROW(RoundRunner(b, labeler, ep, default_exemplars(b), rc), ConfigError);
    rc.k = 4;
    rc.temperature = 0;
    EXPECT_THROW(RoundRunner(b, labeler, ep, default_exemplars(b), rc), ConfigError);
    rc.temperature = 0.8;
    RoundRunner runner(b, labeler, ep, default_exemplars(b), rc);
    EXPECT_THROW(runner.run_round({}, 1, "m", temp_dir("round") / "c.jsonl"), ConfigError);
}

TEST(Round, ExhaustedRequestsBecomeFailedSlots) {
    Rig rig;
    const auto& victim = rig.pool[3];
    rig.script->fail_question(victim.question, 503);
    auto built = run_one(rig, temp_dir("round"));
    const auto& o = built.result.outcomes[3];
    const int k = rig.runner.config().k;
    EXPECT_EQ(o.correct_initial, 0);
    EXPECT_EQ(o.hint_attempts, k);
    ASSERT_EQ(o.candidates.size(), static_cast<std::size_t>(2 * k));
    for (const auto& c : o.candidates) {
        EXPECT_TRUE(c.transport_failed);
        EXPECT_FALSE(c.label);
    }
    EXPECT_EQ(built.orm.excluded_transport, static_cast<std::size_t>(2 * k));
    auto stats = round_stats(rig.pool, built.result, built.sft, built.orm);
    EXPECT_EQ(stats.at(victim.bucket()).transport_failures, static_cast<std::size_t>(2 * k));
}

TEST(Round, ResumeAfterInterruption) {
    auto clean_dir = temp_dir("round");
    Rig clean;
    auto want = clean.runner.run_round(clean.pool, 1, "base", clean_dir / "c.jsonl");
    const auto clean_calls = clean.script->calls();

    RoundConfig rc;
    rc.parallelism = 2;
    auto dir = temp_dir("round");
    std::size_t done_calls = 0;
    {
        Rig broken(rc);
        broken.script->fail_after(9, 400);
        EXPECT_THROW(broken.runner.run_round(broken.pool, 1, "base", dir / "c.jsonl"), modelio::EndpointError);
        Checkpoint cp(dir / "c.jsonl");
        EXPECT_GT(cp.done().size(), 0u);
        EXPECT_LT(cp.done().size(), broken.pool.size());
        for (const auto& [id, o] : cp.done()) done_calls += generation_calls(o);
    }
    Rig again(rc);
    auto got = again.runner.run_round(again.pool, 1, "base", dir / "c.jsonl");
    EXPECT_EQ(got.candidates, want.candidates);
    EXPECT_EQ(again.script->calls() + done_calls, clean_calls);
    EXPECT_EQ(Checkpoint(dir / "c.jsonl").done().size(), again.pool.size());
}

TEST(Checkpoint, TornLineIsSkipped) {
    auto dir = temp_dir("ckpt");
    InstanceOutcome o;
    o.instance_id = "train-0";
    o.correct_initial = 2;
    o.hint_attempts = 6;
    Candidate c;
    c.instance_id = "train-0";
    c.sql = "SELECT 1";
    c.label = true;
    o.candidates.push_back(c);
    {
        Checkpoint cp(dir / "c.jsonl");
        cp.append(o);
    }
    {
        std::ofstream f(dir / "c.jsonl", std::ios::app);
        f << R"({"instance_id": "train-1", "candi)";
    }
    Checkpoint cp(dir / "c.jsonl");
    ASSERT_EQ(cp.done().size(), 1u);
    const auto& back = cp.done().at("train-0");
    EXPECT_EQ(back.hint_attempts, 6);
    EXPECT_EQ(back.candidates, o.candidates);
}

TEST(Seeds, Derivation) {
    auto a = derive_seed(0, "train-1", 1, Origin::initial);
    EXPECT_EQ(a, derive_seed(0, "train-1", 1, Origin::initial));
    EXPECT_NE(a, derive_seed(0, "train-1", 1, Origin::rationalized));
    EXPECT_NE(a, derive_seed(0, "train-1", 2, Origin::initial));
    EXPECT_NE(a, derive_seed(1, "train-1", 1, Origin::initial));
    EXPECT_GE(a, 0);
    EXPECT_LE(a, 0x7fffffff);
}

TEST(Datasets, DedupAndRoundTrip) {
    Rig rig;
    auto dir = temp_dir("datasets");
    auto built = run_one(rig, dir);
    // the all-correct instance: 8 correct samples, two distinct rationales
    const auto& all_right = built.result.outcomes[0];
    ASSERT_EQ(all_right.correct_initial, 8);
    std::set<std::string> targets;
    for (const auto& r : built.sft) {
        if (r.instance_id == all_right.instance_id) targets.insert(r.target);
    }
    EXPECT_EQ(targets.size(), 2u);

    write_candidates(dir / "candidates.jsonl", built.result.candidates);
    EXPECT_EQ(read_candidates(dir / "candidates.jsonl"), built.result.candidates);
    write_sft(dir / "sft.jsonl", built.sft);
    write_orm(dir / "orm.jsonl", built.orm.records);
    auto sft_rows = util::read_jsonl(dir / "sft.jsonl");
    auto orm_rows = util::read_jsonl(dir / "orm.jsonl");
    ASSERT_EQ(sft_rows.size(), built.sft.size());
    ASSERT_EQ(orm_rows.size(), built.orm.records.size());
    for (std::size_t i = 0; i < sft_rows.size(); ++i) EXPECT_EQ(sft_from_json(sft_rows[i]), built.sft[i]);
    for (std::size_t i = 0; i < orm_rows.size(); ++i) {
        EXPECT_EQ(orm_from_json(orm_rows[i]), built.orm.records[i]);
        EXPECT_TRUE(orm_rows[i]["label"] == 0 || orm_rows[i]["label"] == 1);
    }
    for (const auto& key : {"instance_id", "input", "target", "origin", "round"}) EXPECT_TRUE(sft_rows[0].contains(key));
    for (const auto& key : {"instance_id", "input", "candidate", "label", "origin", "round"}) {
        EXPECT_TRUE(orm_rows[0].contains(key));
    }
}

TEST(Datasets, SolutionSql) {
    EXPECT_EQ(solution_sql(modelio::format_solution("Step 1: x", "SELECT a FROM t")), "SELECT a FROM t");
}

TEST(Trainer, CommandTrainer) {
    auto dir = temp_dir("trainer");
    TrainRequest req;
    req.round = 2;
    req.base_model_ref = "base";
    req.sft_path = dir / "sft.jsonl";
    req.orm_path = dir / "orm.jsonl";
    req.output_dir = dir / "model";
    CommandTrainer ok("mkdir -p '{out}' && echo {base_model} {round} > '{out}/ref'", "{out}/r{round}");
    EXPECT_EQ(ok.train(req), (dir / "model").string() + "/r2");
    EXPECT_EQ(util::read_text(dir / "model" / "ref"), "base 2\n");
    CommandTrainer bad("false", "{out}");
    EXPECT_THROW(bad.train(req), TrainerFailed);
    NoopTrainer noop;
    EXPECT_EQ(noop.train(req), "base");
}
