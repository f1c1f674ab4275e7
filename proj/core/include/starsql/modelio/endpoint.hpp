#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "starsql/modelio/cassette.hpp"
#include "starsql/modelio/errors.hpp"
#include "starsql/modelio/extract.hpp"
#include "starsql/modelio/transport.hpp"

namespace starsql::modelio {

enum class EndpointMode { live, record, replay };

std::string to_string(EndpointMode m);
EndpointMode endpoint_mode_from_string(const std::string& s);

struct EndpointConfig {
    std::string base_url = "http://127.0.0.1:8000";
    std::string model_name;
    EndpointMode mode = EndpointMode::live;
    std::filesystem::path cassette_path;
    std::string api_key;
    std::string generation_path = "/v1/completions";
    std::string scoring_path = "/v1/score";
    int max_retries = 3;
    std::chrono::milliseconds backoff{250};
    std::chrono::milliseconds timeout{120000};
};

struct GenerationRequest {
    std::string prompt;
    int n = 1;
    double temperature = 0.8;
    int max_tokens = 512;
    std::vector<std::string> stop;
    std::optional<std::int64_t> seed;
    std::string model;  // overrides the endpoint's model_name when set

    // Throws InvalidRequest: n >= 1, temperature >= 0, temperature 0 implies n = 1.
    void validate() const;
};

struct Completion {
    std::string text;
    std::string rationale;
    std::optional<std::string> sql;
    std::string finish_reason;

    bool extraction_failed() const { return !sql.has_value(); }
};

// A generation or scoring service reached over HTTP, optionally through a
// cassette. Shareable across threads.
class ModelEndpoint {
public:
    // transport may be null for replay mode; otherwise HttpTransport is used
    // when none is given.
    explicit ModelEndpoint(EndpointConfig config, std::shared_ptr<Transport> transport = nullptr);

    std::vector<Completion> sample_completions(const GenerationRequest& request);
    double score_candidate(const std::string& prompt, const std::string& candidate_text,
                           const std::string& model = {});

    // One logical request with retries and cassette handling; returns the
    // parsed JSON response body.
    nlohmann::json call(const std::string& path, const nlohmann::json& body);

    // Logical requests that reached the transport (retries count once).
    std::size_t live_calls() const { return live_calls_.load(); }
    const EndpointConfig& config() const { return config_; }

private:
    nlohmann::json call_live(const std::string& path, const std::string& body);

    EndpointConfig config_;
    std::shared_ptr<Transport> transport_;
    std::unique_ptr<Cassette> cassette_;
    std::atomic<std::size_t> live_calls_{0};
};

}  // namespace starsql::modelio
