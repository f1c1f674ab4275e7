#include "starsql/bootstrap/loop.hpp"

#include <cmath>
#include <cstdlib>

#include <spdlog/spdlog.h>

#include "starsql/selection/report.hpp"
#include "starsql/sqleval/errors.hpp"
#include "starsql/util/hash.hpp"
#include "starsql/util/json_io.hpp"
#include "starsql/util/parallel.hpp"

namespace starsql::bootstrap {

namespace fs = std::filesystem;
using nlohmann::json;

json to_json(const IterationManifest& m) {
    json stats = json::object();
    for (const auto& [k, s] : m.stats) stats[k] = to_json(s);
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    return json{{"round", m.round},
                {"base_model_ref", m.base_model_ref},
                {"generator_ref", m.generator_ref},
                {"trained_ref", m.trained_ref},
                {"k", m.k},
                {"pool_size", m.pool_size},
                {"excluded", m.excluded},
                {"candidates_path", m.candidates_path},
                {"sft_path", m.sft_path},
                {"orm_path", m.orm_path},
                {"hashes", m.hashes},
                {"stats", stats},
                {"sft_records", m.sft_records},
                {"orm_records", m.orm_records},
                {"orm_excluded_extraction", m.orm_excluded_extraction},
                {"orm_excluded_transport", m.orm_excluded_transport},
                {"dev_ex", opt(m.dev_ex)},
                {"dev_em", opt(m.dev_em)},
                {"plateaued", m.plateaued}};
}

IterationManifest manifest_from_json(const json& j) {
    IterationManifest m;
    m.round = j.at("round").get<int>();
    m.base_model_ref = j.at("base_model_ref").get<std::string>();
    m.generator_ref = j.at("generator_ref").get<std::string>();
    m.trained_ref = j.value("trained_ref", std::string());
    m.k = j.value("k", 8);
    m.pool_size = j.value("pool_size", std::size_t{0});
    m.excluded = j.value("excluded", std::vector<std::string>{});
    m.candidates_path = j.value("candidates_path", std::string());
    m.sft_path = j.at("sft_path").get<std::string>();
    m.orm_path = j.at("orm_path").get<std::string>();
    m.hashes = j.value("hashes", std::map<std::string, std::string>{});
    const auto stats = j.value("stats", json::object());
    for (const auto& [k, v] : stats.items()) m.stats[k] = bucket_stats_from_json(v);
    m.sft_records = j.value("sft_records", std::size_t{0});
    m.orm_records = j.value("orm_records", std::size_t{0});
    m.orm_excluded_extraction = j.value("orm_excluded_extraction", std::size_t{0});
    m.orm_excluded_transport = j.value("orm_excluded_transport", std::size_t{0});
    if (j.contains("dev_ex") && !j["dev_ex"].is_null()) m.dev_ex = j["dev_ex"].get<double>();
    if (j.contains("dev_em") && !j["dev_em"].is_null()) m.dev_em = j["dev_em"].get<double>();
    m.plateaued = j.value("plateaued", false);
    return m;
}

namespace {

std::string substitute(std::string text, const TrainRequest& r) {
    const std::pair<std::string, std::string> subs[] = {{"{round}", std::to_string(r.round)},
                                                        {"{base_model}", r.base_model_ref},
                                                        {"{sft}", r.sft_path.string()},
                                                        {"{orm}", r.orm_path.string()},
                                                        {"{out}", r.output_dir.string()}};
    for (const auto& [key, value] : subs) {
        for (auto pos = text.find(key); pos != std::string::npos; pos = text.find(key, pos + value.size())) {
            text.replace(pos, key.size(), value);
        }
    }
    return text;
}

}  // namespace

CommandTrainer::CommandTrainer(std::string command, std::string model_ref)
    : command_(std::move(command)), model_ref_(std::move(model_ref)) {
    if (command_.empty()) throw ConfigError("trainer command is empty");
}

std::string CommandTrainer::train(const TrainRequest& request) {
    auto cmd = substitute(command_, request);
    spdlog::info("round {}: running trainer: {}", request.round, cmd);
    int rc = std::system(cmd.c_str());
    if (rc != 0) throw TrainerFailed("trainer command exited with status " + std::to_string(rc));
    return substitute(model_ref_.empty() ? "{out}" : model_ref_, request);
}

GreedyDevEvaluator::GreedyDevEvaluator(const corpus::Benchmark& benchmark, sqleval::Labeler& labeler,
                                       modelio::ModelEndpoint& generator,
                                       std::vector<modelio::PromptExemplar> exemplars,
                                       std::vector<corpus::TaskInstance> dev, RoundConfig config)
    : benchmark_(benchmark),
      labeler_(labeler),
      generator_(generator),
      exemplars_(std::move(exemplars)),
      dev_(std::move(dev)),
      config_(std::move(config)) {}

DevScore GreedyDevEvaluator::evaluate(const std::string& generator_ref, int round) {
    auto results = util::parallel_map(dev_.size(), config_.parallelism, [&](std::size_t i) {
        const auto& inst = dev_[i];
        selection::InstanceResult res;
        res.instance = &inst;
        try {
            labeler_.gold(inst);
        } catch (const sqleval::GoldExecutionFailed&) {
            res.gold_failed = true;
            return res;
        }
        modelio::GenerationRequest req;
        req.prompt = modelio::build_fewshot_prompt(exemplars_, inst, benchmark_.schema(inst.db_id), benchmark_.schemas);
        req.n = 1;
        req.temperature = 0;
        req.max_tokens = config_.max_tokens;
        req.stop = config_.stop;
        req.seed = derive_seed(config_.seed, inst.id, round, Origin::initial);
        req.model = generator_ref;
        std::vector<modelio::Completion> out;
        try {
            out = generator_.sample_completions(req);
        } catch (const modelio::TransportExhausted& e) {
            spdlog::warn("dev {}: no completion: {}", inst.id, e.what());
            res.missing = true;
            return res;
        }
        if (out.empty() || !out[0].sql) {
            res.missing = true;
            return res;
        }
        res.verdict = labeler_.label(inst, *out[0].sql);
        return res;
    });
    auto report = selection::build_report(results);
    return DevScore{report.ex_overall, report.em_overall};
}

bool plateaued(const std::vector<IterationManifest>& manifests, double eps) {
    if (manifests.size() < 2) return false;
    const auto& a = manifests[manifests.size() - 2];
    const auto& b = manifests.back();
    if (!a.dev_ex || !b.dev_ex) return false;
    return *b.dev_ex - *a.dev_ex < eps;
}

fs::path round_dir(const fs::path& workdir, int round) { return workdir / ("round-" + std::to_string(round)); }

std::vector<IterationManifest> run_loop(const std::vector<corpus::TaskInstance>& pool, RoundRunner& runner,
                                        TrainerStage& trainer, DevEvaluator* evaluator, const LoopConfig& config) {
    if (config.max_rounds < 1) throw ConfigError("max_rounds must be >= 1");
    if (config.base_model_ref.empty()) throw ConfigError("base model reference is empty");
    fs::create_directories(config.workdir);
    std::vector<IterationManifest> manifests;
    std::string generator_ref = config.base_model_ref;

    for (int round = 1; round <= config.max_rounds; ++round) {
        const auto dir = round_dir(config.workdir, round);
        const auto manifest_path = dir / "manifest.json";
        if (fs::exists(manifest_path)) {
            auto m = manifest_from_json(util::read_json(manifest_path));
            if (m.base_model_ref != config.base_model_ref) {
                throw ConfigError(manifest_path.string() + " was produced from base model '" + m.base_model_ref + "'");
            }
            spdlog::info("round {}: already complete", round);
            generator_ref = m.trained_ref;
            manifests.push_back(std::move(m));
            if (manifests.back().plateaued) break;
            continue;
        }
        fs::create_directories(dir);

        IterationManifest m;
        m.round = round;
        m.base_model_ref = config.base_model_ref;
        m.generator_ref = generator_ref;
        m.k = runner.config().k;
        m.pool_size = pool.size();

        auto result = runner.run_round(pool, round, generator_ref, dir / "checkpoint.jsonl");
        m.excluded = result.excluded;

        auto contexts = build_contexts(pool, runner.benchmark().schemas);
        auto sft = build_sft_dataset(result.candidates, contexts);
        auto orm = build_orm_dataset(result.candidates, contexts);
        write_candidates(dir / "candidates.jsonl", result.candidates);
        write_sft(dir / "sft.jsonl", sft);
        write_orm(dir / "orm.jsonl", orm.records);
        m.candidates_path = fs::relative(dir / "candidates.jsonl", config.workdir).generic_string();
        m.sft_path = fs::relative(dir / "sft.jsonl", config.workdir).generic_string();
        m.orm_path = fs::relative(dir / "orm.jsonl", config.workdir).generic_string();
        m.hashes["candidates"] = util::sha256_file(dir / "candidates.jsonl");
        m.hashes["sft"] = util::sha256_file(dir / "sft.jsonl");
        m.hashes["orm"] = util::sha256_file(dir / "orm.jsonl");
        if (!config.cassette_path.empty() && fs::exists(config.cassette_path)) {
            m.hashes["cassette"] = util::sha256_file(config.cassette_path);
        }
        m.stats = round_stats(pool, result, sft, orm);
        m.sft_records = sft.size();
        m.orm_records = orm.records.size();
        m.orm_excluded_extraction = orm.excluded_extraction;
        m.orm_excluded_transport = orm.excluded_transport;

        TrainRequest req{round, config.base_model_ref, dir / "sft.jsonl", dir / "orm.jsonl", dir / "model"};
        m.trained_ref = trainer.train(req);
        if (evaluator) {
            auto score = evaluator->evaluate(m.trained_ref, round);
            m.dev_ex = score.ex;
            m.dev_em = score.em;
        }
        manifests.push_back(m);
        manifests.back().plateaued = plateaued(manifests, config.plateau_eps);
        util::write_json(manifest_path, to_json(manifests.back()));
        spdlog::info("round {}: {} sft, {} orm records{}", round, m.sft_records, m.orm_records,
                     m.dev_ex ? ", dev EX " + std::to_string(*m.dev_ex) : std::string());
        generator_ref = m.trained_ref;
        if (manifests.back().plateaued) {
            spdlog::info("round {}: dev EX gain below {}, stopping", round, config.plateau_eps);
            break;
        }
    }
    return manifests;
}

}  // namespace starsql::bootstrap
