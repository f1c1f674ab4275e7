#include "starsql/cli/commands.hpp"

#include <iostream>
#include <mutex>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "starsql/bootstrap/datasets.hpp"
#include "starsql/corpus/benchmark.hpp"
#include "starsql/modelio/errors.hpp"
#include "starsql/modelio/prompt.hpp"
#include "starsql/sqleval/errors.hpp"
#include "starsql/util/hash.hpp"
#include "starsql/util/json_io.hpp"
#include "starsql/util/parallel.hpp"
#include "starsql/util/text.hpp"

namespace starsql::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

corpus::Benchmark load(const RunConfig& cfg, bool with_train) {
    return corpus::load_benchmark(with_train ? cfg.train.string() : std::string(), cfg.dev.string(),
                                  cfg.tables.string(), cfg.db_dir);
}

sqleval::ExecOptions exec_options(const RunConfig& cfg) {
    sqleval::ExecOptions o;
    o.timeout = std::chrono::milliseconds(cfg.timeout_ms);
    return o;
}

std::vector<modelio::PromptExemplar> exemplars(const RunConfig& cfg, const corpus::Benchmark& b) {
    if (cfg.exemplars.empty()) throw ConfigError("no exemplar file configured (paths.exemplars)");
    auto ex = modelio::load_exemplars(cfg.exemplars, b.schemas);
    if (ex.size() < static_cast<std::size_t>(cfg.p)) {
        throw ConfigError(fmt::format("{} holds {} exemplars, p = {}", cfg.exemplars.string(), ex.size(), cfg.p));
    }
    ex.resize(static_cast<std::size_t>(cfg.p));
    return ex;
}

std::unique_ptr<modelio::ModelEndpoint> endpoint(const RunConfig& cfg, const EndpointSettings& s,
                                                 std::shared_ptr<modelio::Transport> transport) {
    return std::make_unique<modelio::ModelEndpoint>(endpoint_config(s, cfg.api_key), std::move(transport));
}

std::string hash_if_exists(const fs::path& p) {
    return !p.empty() && fs::is_regular_file(p) ? util::sha256_file(p) : std::string();
}

std::vector<selection::InstanceResult> label_all(sqleval::Labeler& labeler,
                                                 const std::vector<corpus::TaskInstance>& dev,
                                                 const std::vector<std::optional<std::string>>& sqls,
                                                 std::size_t parallelism) {
    return util::parallel_map(dev.size(), parallelism, [&](std::size_t i) {
        selection::InstanceResult r;
        r.instance = &dev[i];
        try {
            labeler.gold(dev[i]);
        } catch (const sqleval::GoldExecutionFailed& e) {
            spdlog::warn("{}", e.what());
            r.gold_failed = true;
            return r;
        }
        if (!sqls[i]) {
            r.missing = true;
            return r;
        }
        r.verdict = labeler.label(dev[i], *sqls[i]);
        return r;
    });
}

void score_pools(const RunConfig& cfg, const corpus::Benchmark& b, selection::PoolMap& pools,
                 const Services& services) {
    if (cfg.scorer == "oracle") return selection::rescore(pools, selection::oracle_scorer());
    if (cfg.scorer == "random") return selection::rescore(pools, selection::random_scorer(cfg.seed));
    auto verifier = endpoint(cfg, cfg.verifier, services.verifier);
    std::vector<selection::PoolMap::value_type*> items;
    for (auto& kv : pools) items.push_back(&kv);
    util::parallel_map(items.size(), static_cast<std::size_t>(cfg.parallelism), [&](std::size_t i) {
        auto& [id, pool] = *items[i];
        const auto* inst = b.find(id);
        if (!inst) throw IoError("pool for unknown instance '" + id + "'");
        const auto input = modelio::build_task_input(*inst, b.schema(inst->db_id));
        for (auto& sc : pool) {
            sc.score = sc.candidate.sql
                           ? verifier->score_candidate(input,
                                                       modelio::format_solution(sc.candidate.rationale, *sc.candidate.sql))
                           : 0.0;
        }
        return 0;
    });
}

selection::PoolMap sample_pools(const RunConfig& cfg, const corpus::Benchmark& b, sqleval::Labeler& labeler,
                                const Services& services) {
    auto gen = endpoint(cfg, cfg.generator, services.generator);
    auto ex = exemplars(cfg, b);
    auto dev = b.split(corpus::Split::dev);
    const int n = std::max(cfg.n, *std::max_element(cfg.n_values.begin(), cfg.n_values.end()));
    auto pools = util::parallel_map(dev.size(), static_cast<std::size_t>(cfg.parallelism), [&](std::size_t i) {
        const auto& inst = dev[i];
        std::vector<selection::ScoredCandidate> pool;
        try {
            labeler.gold(inst);
        } catch (const sqleval::GoldExecutionFailed& e) {
            spdlog::warn("skipping {}: {}", inst.id, e.what());
            return pool;
        }
        modelio::GenerationRequest req;
        req.prompt = modelio::build_fewshot_prompt(ex, inst, b.schema(inst.db_id), b.schemas);
        req.n = n;
        req.temperature = cfg.temperature;
        req.max_tokens = cfg.max_tokens;
        req.stop = cfg.stop;
        req.seed = bootstrap::derive_seed(cfg.seed, inst.id, 0, bootstrap::Origin::initial);
        std::vector<modelio::Completion> comps;
        try {
            comps = gen->sample_completions(req);
        } catch (const modelio::TransportExhausted& e) {
            spdlog::warn("{}: sampling failed, pool left out: {}", inst.id, e.what());
            return pool;
        }
        for (std::size_t j = 0; j < comps.size(); ++j) {
            selection::ScoredCandidate sc;
            auto& c = sc.candidate;
            c.instance_id = inst.id;
            c.sample_index = static_cast<int>(j);
            c.round = 0;
            c.rationale = comps[j].rationale;
            c.sql = comps[j].sql;
            if (c.sql) {
                auto v = labeler.label(inst, *c.sql);
                c.label = v.ex;
                c.em = v.em;
                c.fingerprint = v.fingerprint;
            }
            pool.push_back(std::move(sc));
        }
        return pool;
    });
    selection::PoolMap out;
    for (std::size_t i = 0; i < dev.size(); ++i) {
        if (!pools[i].empty()) out[dev[i].id] = std::move(pools[i]);
    }
    return out;
}

}  // namespace

std::vector<std::optional<std::string>> load_predictions(const fs::path& path,
                                                         const std::vector<corpus::TaskInstance>& dev) {
    std::vector<std::optional<std::string>> out(dev.size());
    std::map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < dev.size(); ++i) pos[dev[i].id] = i;
    auto put = [&](const std::string& id, const std::string& sql) {
        auto it = pos.find(id);
        if (it == pos.end()) throw IoError(path.string() + ": prediction for unknown instance '" + id + "'");
        out[it->second] = util::trim(sql);
    };
    const auto ext = path.extension().string();
    if (ext == ".json") {
        auto j = util::read_json(path);
        if (j.is_array()) {
            if (j.size() > dev.size()) throw IoError(path.string() + ": more predictions than dev instances");
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (j[i].is_string()) out[i] = util::trim(j[i].get<std::string>());
            }
        } else if (j.is_object()) {
            for (const auto& [id, sql] : j.items()) {
                if (!sql.is_string()) throw IoError(path.string() + ": non-string prediction for '" + id + "'");
                put(id, sql.get<std::string>());
            }
        } else {
            throw IoError(path.string() + ": expected a JSON array or object");
        }
    } else if (ext == ".jsonl") {
        for (const auto& row : util::read_jsonl(path)) {
            put(row.at("instance_id").get<std::string>(), row.at("sql").get<std::string>());
        }
    } else {
        // one query per line in dev order; a tab and db_id may follow
        auto text = util::read_text(path);
        std::size_t i = 0, start = 0;
        while (start < text.size()) {
            auto end = text.find('\n', start);
            if (end == std::string::npos) end = text.size();
            std::string line = text.substr(start, end - start);
            if (auto tab = line.find('\t'); tab != std::string::npos) line.resize(tab);
            if (i >= dev.size()) {
                if (!util::trim(line).empty()) throw IoError(path.string() + ": more predictions than dev instances");
            } else {
                out[i] = util::trim(line);
            }
            ++i;
            start = end + 1;
        }
    }
    return out;
}

selection::EvalReport cmd_evaluate(const RunConfig& cfg, const EvaluateOptions& opts, std::ostream& out,
                                   const Services& services) {
    validate(cfg, false);
    if (opts.predictions.empty() == opts.pools.empty()) {
        throw ConfigError("evaluate needs exactly one of --predictions or --pools");
    }
    auto b = load(cfg, false);
    auto dev = b.split(corpus::Split::dev);
    if (dev.empty()) throw ConfigError("the dev split is empty");
    sqleval::Labeler labeler(b, exec_options(cfg));

    std::vector<std::optional<std::string>> sqls(dev.size());
    std::string strategy = "predictions";
    int n_used = 1;
    std::map<std::string, std::string> provenance;
    if (!opts.predictions.empty()) {
        sqls = load_predictions(opts.predictions, dev);
        provenance["predictions"] = util::sha256_file(opts.predictions);
    } else {
        if (opts.strategy.empty()) throw ConfigError("--pools needs --strategy");
        auto strat = selection::strategy_from_string(opts.strategy);
        strategy = selection::to_string(strat);
        n_used = strat == selection::Strategy::greedy ? 1 : cfg.n;
        auto pools = selection::read_pools(opts.pools);
        provenance["pools"] = util::sha256_file(opts.pools);
        if (strat == selection::Strategy::best_of_n) score_pools(cfg, b, pools, services);
        for (std::size_t i = 0; i < dev.size(); ++i) {
            auto it = pools.find(dev[i].id);
            if (it == pools.end() || it->second.empty()) continue;
            selection::SelectionOutcome o;
            switch (strat) {
                case selection::Strategy::greedy: o = selection::greedy(it->second); break;
                case selection::Strategy::best_of_n: o = selection::best_of_n(it->second, cfg.n); break;
                case selection::Strategy::self_consistency: o = selection::self_consistency(it->second, cfg.n); break;
            }
            const auto& c = it->second[static_cast<std::size_t>(o.chosen_index)].candidate;
            sqls[i] = c.sql.value_or("");
        }
    }
    if (auto h = hash_if_exists(opts.manifest); !h.empty()) provenance["manifest"] = h;
    if (auto h = hash_if_exists(cfg.generator.cassette); !h.empty()) provenance["generator_cassette"] = h;
    if (strategy == "best_of_n" && cfg.scorer == "verifier") {
        if (auto h = hash_if_exists(cfg.verifier.cassette); !h.empty()) provenance["verifier_cassette"] = h;
    }

    auto results = label_all(labeler, dev, sqls, static_cast<std::size_t>(cfg.parallelism));
    auto report = selection::build_report(results, strategy, n_used);
    for (std::size_t i = 0; i < dev.size(); ++i) {
        if (sqls[i] && sqls[i]->empty()) report.extraction_failures++;
    }
    report.provenance = provenance;

    const fs::path dir = opts.out_dir.empty() ? cfg.workdir / "eval" : opts.out_dir;
    fs::create_directories(dir);
    util::write_json(dir / "report.json", selection::to_json(report));
    util::write_text(dir / "report.txt", selection::format_report(report));
    out << selection::format_report(report);
    return report;
}

std::vector<bootstrap::IterationManifest> cmd_bootstrap(const RunConfig& cfg, bool resume, std::ostream& out,
                                                        const Services& services) {
    validate(cfg, true);
    if (cfg.generator.model.empty()) throw ConfigError("generator.model (the base model reference) is empty");
    if (!resume && fs::exists(bootstrap::round_dir(cfg.workdir, 1))) {
        throw ConfigError(cfg.workdir.string() + " holds an earlier run; pass --resume to continue it");
    }
    auto b = load(cfg, true);
    auto train = b.split(corpus::Split::train);
    auto pool = corpus::select_training_pool(train, static_cast<std::size_t>(cfg.pool_size), cfg.seed);
    auto ex = exemplars(cfg, b);
    auto gen = endpoint(cfg, cfg.generator, services.generator);
    sqleval::Labeler labeler(b, exec_options(cfg));
    auto rc = round_config(cfg);
    bootstrap::RoundRunner runner(b, labeler, *gen, ex, rc);

    std::unique_ptr<bootstrap::TrainerStage> trainer;
    if (cfg.trainer_command.empty()) trainer = std::make_unique<bootstrap::NoopTrainer>();
    else trainer = std::make_unique<bootstrap::CommandTrainer>(cfg.trainer_command, cfg.trainer_model_ref);

    std::unique_ptr<bootstrap::DevEvaluator> evaluator;
    auto dev = b.split(corpus::Split::dev);
    if (cfg.eval_dev && !dev.empty()) {
        evaluator = std::make_unique<bootstrap::GreedyDevEvaluator>(b, labeler, *gen, ex, dev, rc);
    }

    bootstrap::LoopConfig lc;
    lc.workdir = cfg.workdir;
    lc.base_model_ref = cfg.generator.model;
    lc.max_rounds = cfg.max_rounds;
    lc.plateau_eps = cfg.plateau_eps;
    lc.cassette_path = cfg.generator.cassette;
    auto manifests = bootstrap::run_loop(pool, runner, *trainer, evaluator.get(), lc);

    out << fmt::format("{:<6}{:<24}{:>8}{:>8}{:>8}{:>8}{:>9}\n", "round", "generator", "pool", "L", "sft", "orm",
                       "dev EX");
    for (const auto& m : manifests) {
        std::size_t L = 0;
        for (const auto& [_, s] : m.stats) L += s.hint_attempts;
        out << fmt::format("{:<6}{:<24}{:>8}{:>8}{:>8}{:>8}{:>9}\n", m.round, m.generator_ref, m.pool_size, L,
                           m.sft_records, m.orm_records, m.dev_ex ? fmt::format("{:.2f}", *m.dev_ex) : "-");
    }
    out << fmt::format("{:<10}{:>10}{:>10}{:>8}{:>12}{:>8}\n", "level", "instances", "correct", "L", "rationalized",
                       "sft");
    if (!manifests.empty()) {
        for (const auto& [bucket, s] : manifests.back().stats) {
            out << fmt::format("{:<10}{:>10}{:>10}{:>8}{:>12}{:>8}\n", bucket, s.instances, s.correct_initial,
                               s.hint_attempts, s.rationalization_successes, s.sft_records);
        }
    }
    return manifests;
}

std::vector<selection::CurvePoint> cmd_scaling(const RunConfig& cfg, const ScalingOptions& opts, std::ostream& out,
                                               const Services& services) {
    validate(cfg, false);
    auto b = load(cfg, false);
    sqleval::Labeler labeler(b, exec_options(cfg));
    const fs::path dir = opts.out_dir.empty() ? cfg.workdir / "scaling" : opts.out_dir;
    fs::create_directories(dir);

    selection::PoolMap pools;
    std::map<std::string, std::string> provenance;
    if (opts.pools.empty()) {
        pools = sample_pools(cfg, b, labeler, services);
        if (auto h = hash_if_exists(cfg.generator.cassette); !h.empty()) provenance["generator_cassette"] = h;
    } else {
        pools = selection::read_pools(opts.pools);
        provenance["pools"] = util::sha256_file(opts.pools);
    }
    // fail on short pools before spending verifier calls
    const auto need = static_cast<std::size_t>(*std::max_element(cfg.n_values.begin(), cfg.n_values.end()));
    for (const auto& [id, pool] : pools) {
        if (pool.size() < need) throw selection::InsufficientPool(id, pool.size(), need);
    }
    score_pools(cfg, b, pools, services);
    if (cfg.scorer == "verifier") {
        if (auto h = hash_if_exists(cfg.verifier.cassette); !h.empty()) provenance["verifier_cassette"] = h;
    }
    selection::write_pools(dir / "pools.jsonl", pools);

    std::vector<selection::Strategy> strategies;
    for (const auto& s : cfg.strategies) strategies.push_back(selection::strategy_from_string(s));
    selection::CurveOptions co;
    co.resamples = static_cast<std::size_t>(cfg.resamples);
    co.seed = cfg.seed;
    auto points = selection::scaling_curve(pools, strategies, cfg.n_values, co);

    util::write_text(dir / "curve.csv", selection::curve_csv(points));
    auto summary = selection::curve_json(points);
    summary["scorer"] = cfg.scorer;
    summary["provenance"] = provenance;
    summary["pools_sha256"] = util::sha256_file(dir / "pools.jsonl");
    util::write_json(dir / "curve.json", summary);
    if (opts.plot) util::write_text(dir / "curve.svg", selection::curve_svg(points));
    out << selection::curve_csv(points);
    return points;
}

void cmd_label(const RunConfig& cfg, const LabelOptions& opts, std::ostream& out) {
    validate(cfg, false);
    if (opts.predictions.empty()) throw ConfigError("label needs --predictions");
    auto b = load(cfg, false);
    auto dev = b.split(corpus::Split::dev);
    sqleval::Labeler labeler(b, exec_options(cfg));
    auto sqls = load_predictions(opts.predictions, dev);
    auto results = label_all(labeler, dev, sqls, static_cast<std::size_t>(cfg.parallelism));
    std::vector<json> rows;
    for (std::size_t i = 0; i < dev.size(); ++i) {
        json row{{"instance_id", dev[i].id}, {"bucket", dev[i].bucket()}};
        row["sql"] = sqls[i] ? json(*sqls[i]) : json(nullptr);
        row["gold_failed"] = results[i].gold_failed;
        if (results[i].verdict) row["verdict"] = sqleval::to_json(*results[i].verdict);
        else row["verdict"] = nullptr;
        rows.push_back(std::move(row));
    }
    const fs::path path = opts.out.empty() ? cfg.workdir / "labels.jsonl" : opts.out;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    util::write_jsonl(path, rows);
    auto report = selection::build_report(results, "predictions", 1);
    out << selection::format_report(report);
}

void cmd_datasets(const RunConfig& cfg, const DatasetsOptions& opts, std::ostream& out) {
    validate(cfg, false);
    if (opts.candidates.empty()) throw ConfigError("datasets needs at least one --candidates file");
    auto b = load(cfg, !cfg.train.empty());
    auto contexts = bootstrap::build_contexts(b.instances, b.schemas);
    std::vector<bootstrap::Candidate> all;
    for (const auto& p : opts.candidates) {
        auto cs = bootstrap::read_candidates(p);
        for (const auto& c : cs) {
            if (!contexts.count(c.instance_id)) {
                throw IoError(p.string() + ": candidate for unknown instance '" + c.instance_id + "'");
            }
        }
        all.insert(all.end(), cs.begin(), cs.end());
    }
    auto sft = bootstrap::build_sft_dataset(all, contexts);
    auto orm = bootstrap::build_orm_dataset(all, contexts);
    const fs::path dir = opts.out_dir.empty() ? cfg.workdir / "datasets" : opts.out_dir;
    fs::create_directories(dir);
    bootstrap::write_sft(dir / "sft.jsonl", sft);
    bootstrap::write_orm(dir / "orm.jsonl", orm.records);
    out << fmt::format("{} candidates: {} sft records, {} orm records ({} without SQL, {} transport failures)\n",
                       all.size(), sft.size(), orm.records.size(), orm.excluded_extraction, orm.excluded_transport);
    for (const auto& [bucket, bal] : orm.balance) {
        out << fmt::format("  {:<10} +{} -{}\n", bucket, bal.positive, bal.negative);
    }
}

int exit_code_for(const std::exception& e) {
    if (dynamic_cast<const bootstrap::TrainerFailed*>(&e)) return kTrainerError;
    if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const corpus::PoolTooSmall*>(&e) ||
        dynamic_cast<const modelio::InvalidRequest*>(&e)) {
        return kConfigError;
    }
    if (dynamic_cast<const modelio::EndpointError*>(&e) || dynamic_cast<const modelio::CassetteMiss*>(&e) ||
        dynamic_cast<const modelio::ContractViolation*>(&e)) {
        return kEndpointError;
    }
    if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const corpus::MalformedRecord*>(&e) ||
        dynamic_cast<const corpus::MissingDatabaseFile*>(&e) || dynamic_cast<const corpus::SchemaError*>(&e) ||
        dynamic_cast<const sqleval::DatabaseUnavailable*>(&e) || dynamic_cast<const selection::InsufficientPool*>(&e) ||
        dynamic_cast<const selection::EmptyPool*>(&e) || dynamic_cast<const nlohmann::json::exception*>(&e) ||
        dynamic_cast<const std::filesystem::filesystem_error*>(&e)) {
        return kDataError;
    }
    return kPipelineError;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Services& services) {
    CLI::App app{"starsql: self-training text-to-SQL pipeline and evaluation harness"};
    app.require_subcommand(0, 1);
    app.fallthrough();
    app.set_version_flag("--version", "starsql 0.1.0");

    RunConfig cfg;
    fs::path config_path;
    bool print_cfg = false;
    std::string log_level = "info";

    // Overrides are kept optional so they only replace file values when given.
    std::optional<std::string> train, dev, tables, db_dir, workdir, exemplars_path, mode, cassette, verifier_cassette,
        scorer, label_metric;
    std::optional<int> k, n, p, pool_size, max_rounds, timeout_ms, parallelism, resamples;
    std::optional<double> temperature, plateau_eps;
    std::optional<std::uint64_t> seed;
    std::vector<int> n_values;
    std::vector<std::string> strategies;
    bool no_hints = false;

    app.add_option("-c,--config", config_path, "TOML configuration file");
    app.add_flag("--print-config", print_cfg, "Print the effective configuration and exit");
    app.add_option("--log-level", log_level, "trace, debug, info, warn, error, off");
    app.add_option("--train", train, "Training split JSON");
    app.add_option("--dev", dev, "Dev split JSON");
    app.add_option("--tables", tables, "Schema file (tables.json)");
    app.add_option("--db-dir", db_dir, "Directory of <db_id>/<db_id>.sqlite files");
    app.add_option("--workdir", workdir, "Output directory");
    app.add_option("--exemplars", exemplars_path, "Few-shot exemplar JSON");
    app.add_option("-k,--k", k, "Samples per training instance");
    app.add_option("-n,--n", n, "Candidates per dev instance for selection");
    app.add_option("-p,--p", p, "Few-shot exemplars per prompt");
    app.add_option("--pool-size", pool_size, "Training instances per round");
    app.add_option("--temperature", temperature, "Sampling temperature");
    app.add_option("--timeout-ms", timeout_ms, "Per-query execution budget");
    app.add_option("--plateau-eps", plateau_eps, "Stop when dev EX gains less than this (points)");
    app.add_option("--max-rounds", max_rounds, "Bootstrap rounds");
    app.add_option("--mode", mode, "Generator endpoint mode: live, record, replay");
    app.add_option("--cassette", cassette, "Generator cassette JSONL");
    app.add_option("--verifier-cassette", verifier_cassette, "Verifier cassette JSONL");
    app.add_option("--seed", seed, "Seed");
    app.add_option("--parallelism", parallelism, "Concurrent work items");
    app.add_option("--scorer", scorer, "verifier, oracle or random");
    app.add_option("--label-metric", label_metric, "ex or em");
    app.add_option("--n-values", n_values, "Curve points")->delimiter(',');
    app.add_option("--strategies", strategies, "Curve strategies")->delimiter(',');
    app.add_option("--resamples", resamples, "Bootstrap resamples for confidence intervals");
    app.add_flag("--no-hints", no_hints, "Disable hint rationalization");

    EvaluateOptions eval_opts;
    auto* evaluate = app.add_subcommand("evaluate", "Score predictions or a selection strategy on the dev split");
    evaluate->add_option("--predictions", eval_opts.predictions, "Prediction file (.txt, .json, .jsonl)");
    evaluate->add_option("--pools", eval_opts.pools, "Candidate pools JSONL");
    evaluate->add_option("--strategy", eval_opts.strategy, "greedy, best_of_n, self_consistency");
    evaluate->add_option("--manifest", eval_opts.manifest, "Manifest to record in the report");
    evaluate->add_option("--out", eval_opts.out_dir, "Report directory");

    bool resume = false;
    auto* boot = app.add_subcommand("bootstrap", "Run the self-training loop");
    boot->add_flag("--resume", resume, "Continue an interrupted run in the work directory");

    ScalingOptions scaling_opts;
    bool no_plot = false;
    auto* scaling = app.add_subcommand("scaling", "Accuracy against number of candidates");
    scaling->add_option("--pools", scaling_opts.pools, "Candidate pools JSONL (sampled when absent)");
    scaling->add_option("--out", scaling_opts.out_dir, "Output directory");
    scaling->add_flag("--no-plot", no_plot, "Skip the SVG plot");

    LabelOptions label_opts;
    auto* label = app.add_subcommand("label", "Label a prediction file against dev golds");
    label->add_option("--predictions", label_opts.predictions, "Prediction file")->required();
    label->add_option("--out", label_opts.out, "Verdict JSONL");

    DatasetsOptions ds_opts;
    auto* datasets = app.add_subcommand("datasets", "Rebuild SFT and ORM files from stored candidates");
    datasets->add_option("--candidates", ds_opts.candidates, "Candidate JSONL files")->required();
    datasets->add_option("--out", ds_opts.out_dir, "Output directory");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e, out, err);
        return rc == 0 ? kOk : kConfigError;
    }

    try {
        spdlog::set_level(spdlog::level::from_str(log_level));
        if (!config_path.empty()) load_config_file(cfg, config_path);
        if (train) cfg.train = *train;
        if (dev) cfg.dev = *dev;
        if (tables) cfg.tables = *tables;
        if (db_dir) cfg.db_dir = *db_dir;
        if (workdir) cfg.workdir = *workdir;
        if (exemplars_path) cfg.exemplars = *exemplars_path;
        if (k) cfg.k = *k;
        if (n) cfg.n = *n;
        if (p) cfg.p = *p;
        if (pool_size) cfg.pool_size = *pool_size;
        if (temperature) cfg.temperature = *temperature;
        if (timeout_ms) cfg.timeout_ms = *timeout_ms;
        if (plateau_eps) cfg.plateau_eps = *plateau_eps;
        if (max_rounds) cfg.max_rounds = *max_rounds;
        if (mode) cfg.generator.mode = cfg.verifier.mode = *mode;
        if (cassette) cfg.generator.cassette = *cassette;
        if (verifier_cassette) cfg.verifier.cassette = *verifier_cassette;
        if (seed) cfg.seed = *seed;
        if (parallelism) cfg.parallelism = *parallelism;
        if (scorer) cfg.scorer = *scorer;
        if (label_metric) cfg.label_metric = *label_metric;
        if (!n_values.empty()) cfg.n_values = n_values;
        if (!strategies.empty()) cfg.strategies = strategies;
        if (resamples) cfg.resamples = *resamples;
        if (no_hints) cfg.use_hints = false;
        apply_environment(cfg);

        if (print_cfg) {
            out << print_config(cfg);
            return kOk;
        }
        if (app.get_subcommands().empty()) throw ConfigError("a command is required (evaluate, bootstrap, scaling, label, datasets)");
        if (evaluate->parsed()) cmd_evaluate(cfg, eval_opts, out, services);
        else if (boot->parsed()) cmd_bootstrap(cfg, resume, out, services);
        else if (scaling->parsed()) {
            scaling_opts.plot = !no_plot;
            cmd_scaling(cfg, scaling_opts, out, services);
        } else if (label->parsed()) cmd_label(cfg, label_opts, out);
        else if (datasets->parsed()) cmd_datasets(cfg, ds_opts, out);
        return kOk;
    } catch (const std::exception& e) {
        int code = exit_code_for(e);
        err << "error: " << e.what() << "\n";
        return code;
    }
}

}  // namespace starsql::cli
