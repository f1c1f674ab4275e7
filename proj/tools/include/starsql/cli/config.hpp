#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "starsql/bootstrap/round.hpp"
#include "starsql/modelio/endpoint.hpp"

namespace starsql::cli {

// Documented process exit codes.
enum ExitCode : int {
    kOk = 0,
    kPipelineError = 1,
    kConfigError = 2,
    kDataError = 3,
    kEndpointError = 4,
    kTrainerError = 5,
};

inline constexpr const char* kApiKeyEnv = "STARSQL_API_KEY";

struct EndpointSettings {
    std::string base_url = "http://127.0.0.1:8000";
    std::string model;
    std::string mode = "replay";
    std::filesystem::path cassette;
    int max_retries = 3;
    int backoff_ms = 250;
    int timeout_ms = 120000;
};

struct RunConfig {
    std::filesystem::path train;
    std::filesystem::path dev;
    std::filesystem::path tables;
    std::filesystem::path db_dir;
    std::filesystem::path workdir = "starsql-work";
    std::filesystem::path exemplars;

    int k = 8;
    int n = 16;
    int p = 3;
    int pool_size = 7000;
    double temperature = 0.8;
    int max_tokens = 512;
    std::vector<std::string> stop;
    int timeout_ms = 30000;
    double plateau_eps = 0.5;
    int max_rounds = 3;
    std::uint64_t seed = 0;
    int parallelism = 4;
    bool use_hints = true;
    bool eval_dev = true;
    std::string label_metric = "ex";

    EndpointSettings generator;
    EndpointSettings verifier;
    std::string api_key;  // from the environment only

    std::string trainer_command;
    std::string trainer_model_ref;

    std::vector<int> n_values{1, 2, 4, 8, 16};
    std::vector<std::string> strategies{"greedy", "self_consistency", "best_of_n"};
    std::string scorer = "verifier";  // verifier, oracle, random
    int resamples = 1000;
};

// Overlays a TOML document on cfg. Relative paths resolve against the file's
// directory. Throws ConfigError.
void load_config_file(RunConfig& cfg, const std::filesystem::path& path);

// Reads the API key from the environment.
void apply_environment(RunConfig& cfg);

// Counts and enums; `need_train` also requires the train split.
void validate(const RunConfig& cfg, bool need_train);

// Every setting with "paper" or "ours" marking where its default comes from.
std::string print_config(const RunConfig& cfg);

modelio::EndpointConfig endpoint_config(const EndpointSettings& s, const std::string& api_key);
bootstrap::RoundConfig round_config(const RunConfig& cfg);

}  // namespace starsql::cli
