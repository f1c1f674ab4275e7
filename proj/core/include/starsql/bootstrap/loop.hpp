#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "starsql/bootstrap/round.hpp"
#include "starsql/util/errors.hpp"

namespace starsql::bootstrap {

class TrainerFailed : public Error {
public:
    using Error::Error;
};

struct IterationManifest {
    int round = 1;
    std::string base_model_ref;  // same for every round of a run
    std::string generator_ref;   // model sampled this round
    std::string trained_ref;     // model the trainer produced from base_model_ref
    int k = 8;
    std::size_t pool_size = 0;
    std::vector<std::string> excluded;
    // Relative to the work directory.
    std::string candidates_path;
    std::string sft_path;
    std::string orm_path;
    std::map<std::string, std::string> hashes;  // artifact -> sha256
    std::map<std::string, BucketStats> stats;
    std::size_t sft_records = 0;
    std::size_t orm_records = 0;
    std::size_t orm_excluded_extraction = 0;
    std::size_t orm_excluded_transport = 0;
    std::optional<double> dev_ex;  // percent
    std::optional<double> dev_em;
    bool plateaued = false;
};

nlohmann::json to_json(const IterationManifest& m);
IterationManifest manifest_from_json(const nlohmann::json& j);

struct TrainRequest {
    int round = 1;
    std::string base_model_ref;
    std::filesystem::path sft_path;
    std::filesystem::path orm_path;
    std::filesystem::path output_dir;
};

// External training step. Always starts from base_model_ref.
class TrainerStage {
public:
    virtual ~TrainerStage() = default;
    // Returns the reference of the trained generator. Throws TrainerFailed.
    virtual std::string train(const TrainRequest& request) = 0;
};

// Leaves the generator unchanged; for dataset-only runs.
class NoopTrainer : public TrainerStage {
public:
    std::string train(const TrainRequest& request) override { return request.base_model_ref; }
};

// Runs a shell command. Placeholders {round} {base_model} {sft} {orm} {out}
// are substituted; the trained reference is model_ref with the same
// placeholders.
class CommandTrainer : public TrainerStage {
public:
    CommandTrainer(std::string command, std::string model_ref);
    std::string train(const TrainRequest& request) override;

private:
    std::string command_;
    std::string model_ref_;
};

struct DevScore {
    double ex = 0;  // percent
    double em = 0;  // percent over instances whose gold parses
};

class DevEvaluator {
public:
    virtual ~DevEvaluator() = default;
    virtual DevScore evaluate(const std::string& generator_ref, int round) = 0;
};

// One temperature-0 sample per dev instance.
class GreedyDevEvaluator : public DevEvaluator {
public:
    GreedyDevEvaluator(const corpus::Benchmark& benchmark, sqleval::Labeler& labeler,
                       modelio::ModelEndpoint& generator, std::vector<modelio::PromptExemplar> exemplars,
                       std::vector<corpus::TaskInstance> dev, RoundConfig config);
    DevScore evaluate(const std::string& generator_ref, int round) override;

private:
    const corpus::Benchmark& benchmark_;
    sqleval::Labeler& labeler_;
    modelio::ModelEndpoint& generator_;
    std::vector<modelio::PromptExemplar> exemplars_;
    std::vector<corpus::TaskInstance> dev_;
    RoundConfig config_;
};

struct LoopConfig {
    std::filesystem::path workdir;
    std::string base_model_ref;
    int max_rounds = 3;
    double plateau_eps = 0.5;  // EX points
    std::filesystem::path cassette_path;  // hashed into manifests when set
};

// Stop rule: dev EX gain of the latest round below eps.
bool plateaued(const std::vector<IterationManifest>& manifests, double eps);

std::filesystem::path round_dir(const std::filesystem::path& workdir, int round);

// Rounds with a manifest on disk are loaded rather than rerun, and an
// interrupted round resumes from its checkpoint.
std::vector<IterationManifest> run_loop(const std::vector<corpus::TaskInstance>& pool, RoundRunner& runner,
                                        TrainerStage& trainer, DevEvaluator* evaluator, const LoopConfig& config);

}  // namespace starsql::bootstrap
