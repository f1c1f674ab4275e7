#include "starsql/modelio/endpoint.hpp"

#include <cmath>
#include <thread>

#include <spdlog/spdlog.h>

namespace starsql::modelio {

using nlohmann::json;

std::string to_string(EndpointMode m) {
    switch (m) {
        case EndpointMode::live: return "live";
        case EndpointMode::record: return "record";
        case EndpointMode::replay: return "replay";
    }
    return "live";
}

EndpointMode endpoint_mode_from_string(const std::string& s) {
    if (s == "live") return EndpointMode::live;
    if (s == "record") return EndpointMode::record;
    if (s == "replay") return EndpointMode::replay;
    throw InvalidRequest("unknown endpoint mode '" + s + "'");
}

void GenerationRequest::validate() const {
    if (n < 1) throw InvalidRequest("n must be >= 1");
    if (!(temperature >= 0)) throw InvalidRequest("temperature must be >= 0");
    if (temperature == 0 && n != 1) throw InvalidRequest("temperature 0 requires n = 1");
    if (max_tokens < 1) throw InvalidRequest("max_tokens must be >= 1");
}

ModelEndpoint::ModelEndpoint(EndpointConfig config, std::shared_ptr<Transport> transport)
    : config_(std::move(config)), transport_(std::move(transport)) {
    if (config_.mode != EndpointMode::live) {
        if (config_.cassette_path.empty()) throw InvalidRequest(to_string(config_.mode) + " mode needs a cassette path");
        cassette_ = std::make_unique<Cassette>(config_.cassette_path);
    }
    if (!transport_ && config_.mode != EndpointMode::replay) {
        transport_ = std::make_shared<HttpTransport>(config_.base_url, config_.timeout);
    }
}

json ModelEndpoint::call_live(const std::string& path, const std::string& body) {
    std::map<std::string, std::string> headers;
    if (!config_.api_key.empty()) headers["Authorization"] = "Bearer " + config_.api_key;
    HttpResponse last;
    for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
        if (attempt > 0) std::this_thread::sleep_for(config_.backoff * (1 << (attempt - 1)));
        last = transport_->post(path, body, headers);
        if (last.status >= 200 && last.status < 300) {
            try {
                return json::parse(last.body);
            } catch (const json::parse_error& e) {
                throw ContractViolation(std::string("response is not JSON: ") + e.what());
            }
        }
        bool transient = last.status == 0 || last.status == 429 || last.status >= 500;
        if (!transient) throw EndpointError(last.status, last.body);
        spdlog::warn("{} attempt {} failed: {}", path, attempt + 1,
                     last.status ? "status " + std::to_string(last.status) : last.error);
    }
    throw TransportExhausted(last.status, last.status ? last.body : last.error);
}

json ModelEndpoint::call(const std::string& path, const json& body) {
    const json request{{"path", path}, {"body", body}};
    const std::string hash = request_hash(request);

    if (config_.mode == EndpointMode::replay) {
        auto hit = cassette_->lookup(hash);
        if (!hit) throw CassetteMiss(hash);
        if (hit->contains("error")) {
            const auto& err = (*hit)["error"];
            const std::string kind = err.value("kind", "transport");
            const std::string message = err.value("message", std::string());
            if (kind == "contract") throw ContractViolation(message);
            if (kind == "endpoint") throw EndpointError(err.value("status", 0), message);
            throw TransportExhausted(err.value("status", 0), message);
        }
        return *hit;
    }

    ++live_calls_;
    if (config_.mode == EndpointMode::live) return call_live(path, body.dump());

    try {
        json response = call_live(path, body.dump());
        cassette_->append(hash, request, response);
        return response;
    } catch (const TransportExhausted& e) {
        cassette_->append(hash, request,
                          json{{"error", {{"kind", "transport"}, {"status", e.status()}, {"message", e.body()}}}});
        throw;
    } catch (const EndpointError& e) {
        cassette_->append(hash, request,
                          json{{"error", {{"kind", "endpoint"}, {"status", e.status()}, {"message", e.body()}}}});
        throw;
    } catch (const ContractViolation& e) {
        cassette_->append(hash, request, json{{"error", {{"kind", "contract"}, {"message", e.what()}}}});
        throw;
    }
}

std::vector<Completion> ModelEndpoint::sample_completions(const GenerationRequest& request) {
    request.validate();
    json body{{"model", request.model.empty() ? config_.model_name : request.model},
              {"prompt", request.prompt},
              {"n", request.n},
              {"temperature", request.temperature},
              {"max_tokens", request.max_tokens},
              {"stop", request.stop}};
    body["seed"] = request.seed ? json(*request.seed) : json(nullptr);
    json response = call(config_.generation_path, body);
    if (!response.contains("choices") || !response["choices"].is_array()) {
        throw ContractViolation("generation response without choices array");
    }
    const auto& choices = response["choices"];
    if (choices.size() != static_cast<std::size_t>(request.n)) {
        throw ContractViolation("requested " + std::to_string(request.n) + " completions, got " +
                                std::to_string(choices.size()));
    }
    std::vector<Completion> out;
    out.reserve(choices.size());
    for (const auto& c : choices) {
        if (!c.contains("text") || !c["text"].is_string()) throw ContractViolation("choice without text");
        Completion comp;
        comp.text = c["text"].get<std::string>();
        comp.finish_reason = c.contains("finish_reason") && c["finish_reason"].is_string()
                                 ? c["finish_reason"].get<std::string>()
                                 : "unknown";
        auto ext = extract_completion(comp.text);
        comp.rationale = std::move(ext.rationale);
        comp.sql = std::move(ext.sql);
        out.push_back(std::move(comp));
    }
    return out;
}

double ModelEndpoint::score_candidate(const std::string& prompt, const std::string& candidate_text,
                                      const std::string& model) {
    json body{{"model", model.empty() ? config_.model_name : model}, {"prompt", prompt}, {"completion", candidate_text}};
    json response = call(config_.scoring_path, body);
    if (!response.contains("score") || !response["score"].is_number()) {
        throw ContractViolation("scoring response without numeric score");
    }
    double s = response["score"].get<double>();
    if (!std::isfinite(s) || s < 0.0 || s > 1.0) {
        throw ContractViolation("verifier score " + std::to_string(s) + " outside [0,1]");
    }
    return s;
}

}  // namespace starsql::modelio
