#include "starsql/cli/config.hpp"

#include <cstdlib>
#include <set>

#include <fmt/format.h>
#include <toml.hpp>

#include "starsql/util/errors.hpp"

namespace starsql::cli {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::set<std::string>> kKnownKeys = {
    {"paths", {"train", "dev", "tables", "db_dir", "workdir", "exemplars"}},
    {"run",
     {"k", "n", "p", "pool_size", "temperature", "max_tokens", "stop", "timeout_ms", "plateau_eps", "max_rounds",
      "seed", "parallelism", "use_hints", "eval_dev", "label_metric"}},
    {"generator", {"base_url", "model", "mode", "cassette", "max_retries", "backoff_ms", "timeout_ms"}},
    {"verifier", {"base_url", "model", "mode", "cassette", "max_retries", "backoff_ms", "timeout_ms"}},
    {"trainer", {"command", "model_ref"}},
    {"scaling", {"n_values", "strategies", "scorer", "resamples"}},
};

template <class T>
void get(const toml::table& t, const char* section, const char* key, T& out) {
    auto node = t[section][key];
    if (!node) return;
    if constexpr (std::is_same_v<T, bool>) {
        if (auto v = node.value<bool>()) return void(out = *v);
    } else if constexpr (std::is_integral_v<T>) {
        if (auto v = node.value<std::int64_t>()) return void(out = static_cast<T>(*v));
    } else if constexpr (std::is_floating_point_v<T>) {
        if (auto v = node.value<double>()) return void(out = *v);
    } else {
        if (auto v = node.value<std::string>()) return void(out = *v);
    }
    throw ConfigError(fmt::format("[{}] {} has the wrong type", section, key));
}

void get_path(const toml::table& t, const char* section, const char* key, const fs::path& base, fs::path& out) {
    std::string s;
    get(t, section, key, s);
    if (s.empty()) return;
    fs::path p(s);
    out = p.is_absolute() ? p : (base / p).lexically_normal();
}

template <class T>
void get_list(const toml::table& t, const char* section, const char* key, std::vector<T>& out) {
    auto node = t[section][key];
    if (!node) return;
    const auto* arr = node.as_array();
    if (!arr) throw ConfigError(fmt::format("[{}] {} must be an array", section, key));
    std::vector<T> vals;
    for (const auto& el : *arr) {
        std::optional<T> v;
        if constexpr (std::is_integral_v<T>) {
            if (auto x = el.template value<std::int64_t>()) v = static_cast<T>(*x);
        } else {
            v = el.template value<T>();
        }
        if (!v) throw ConfigError(fmt::format("[{}] {} has an element of the wrong type", section, key));
        vals.push_back(*v);
    }
    out = std::move(vals);
}

void get_endpoint(const toml::table& t, const char* section, const fs::path& base, EndpointSettings& e) {
    get(t, section, "base_url", e.base_url);
    get(t, section, "model", e.model);
    get(t, section, "mode", e.mode);
    get_path(t, section, "cassette", base, e.cassette);
    get(t, section, "max_retries", e.max_retries);
    get(t, section, "backoff_ms", e.backoff_ms);
    get(t, section, "timeout_ms", e.timeout_ms);
}

}  // namespace

void load_config_file(RunConfig& cfg, const fs::path& path) {
    toml::table t;
    try {
        t = toml::parse_file(path.string());
    } catch (const toml::parse_error& e) {
        throw ConfigError(fmt::format("{}: {}", path.string(), e.description()));
    }
    for (const auto& [section, node] : t) {
        auto known = kKnownKeys.find(std::string(section.str()));
        if (known == kKnownKeys.end()) throw ConfigError(fmt::format("unknown config section [{}]", section.str()));
        const auto* tbl = node.as_table();
        if (!tbl) throw ConfigError(fmt::format("[{}] must be a table", section.str()));
        for (const auto& [key, _] : *tbl) {
            if (!known->second.count(std::string(key.str()))) {
                throw ConfigError(fmt::format("unknown config key [{}] {}", section.str(), key.str()));
            }
        }
    }
    const fs::path base = fs::absolute(path).parent_path();
    get_path(t, "paths", "train", base, cfg.train);
    get_path(t, "paths", "dev", base, cfg.dev);
    get_path(t, "paths", "tables", base, cfg.tables);
    get_path(t, "paths", "db_dir", base, cfg.db_dir);
    get_path(t, "paths", "workdir", base, cfg.workdir);
    get_path(t, "paths", "exemplars", base, cfg.exemplars);

    get(t, "run", "k", cfg.k);
    get(t, "run", "n", cfg.n);
    get(t, "run", "p", cfg.p);
    get(t, "run", "pool_size", cfg.pool_size);
    get(t, "run", "temperature", cfg.temperature);
    get(t, "run", "max_tokens", cfg.max_tokens);
    get_list(t, "run", "stop", cfg.stop);
    get(t, "run", "timeout_ms", cfg.timeout_ms);
    get(t, "run", "plateau_eps", cfg.plateau_eps);
    get(t, "run", "max_rounds", cfg.max_rounds);
    get(t, "run", "seed", cfg.seed);
    get(t, "run", "parallelism", cfg.parallelism);
    get(t, "run", "use_hints", cfg.use_hints);
    get(t, "run", "eval_dev", cfg.eval_dev);
    get(t, "run", "label_metric", cfg.label_metric);

    get_endpoint(t, "generator", base, cfg.generator);
    get_endpoint(t, "verifier", base, cfg.verifier);

    get(t, "trainer", "command", cfg.trainer_command);
    get(t, "trainer", "model_ref", cfg.trainer_model_ref);

    get_list(t, "scaling", "n_values", cfg.n_values);
    get_list(t, "scaling", "strategies", cfg.strategies);
    get(t, "scaling", "scorer", cfg.scorer);
    get(t, "scaling", "resamples", cfg.resamples);
}

void apply_environment(RunConfig& cfg) {
    if (const char* key = std::getenv(kApiKeyEnv)) cfg.api_key = key;
}

void validate(const RunConfig& cfg, bool need_train) {
    auto positive = [](const char* name, long long v) {
        if (v < 1) throw ConfigError(fmt::format("{} must be >= 1 (got {})", name, v));
    };
    positive("k", cfg.k);
    positive("n", cfg.n);
    positive("p", cfg.p);
    positive("pool_size", cfg.pool_size);
    positive("max_tokens", cfg.max_tokens);
    positive("timeout_ms", cfg.timeout_ms);
    positive("max_rounds", cfg.max_rounds);
    positive("parallelism", cfg.parallelism);
    positive("resamples", cfg.resamples);
    if (!(cfg.temperature >= 0)) throw ConfigError("temperature must be >= 0");
    if (cfg.temperature == 0 && cfg.k > 1) throw ConfigError("temperature 0 allows only k = 1");
    if (!(cfg.plateau_eps >= 0)) throw ConfigError("plateau_eps must be >= 0");
    bootstrap::label_metric_from_string(cfg.label_metric);
    for (const auto* e : {&cfg.generator, &cfg.verifier}) {
        if (e->mode != "live" && e->mode != "record" && e->mode != "replay") {
            throw ConfigError("endpoint mode must be live, record or replay (got '" + e->mode + "')");
        }
    }
    for (int v : cfg.n_values) positive("n_values entry", v);
    for (const auto& s : cfg.strategies) {
        if (s != "greedy" && s != "best_of_n" && s != "self_consistency") {
            throw ConfigError("unknown strategy '" + s + "'");
        }
    }
    if (cfg.scorer != "verifier" && cfg.scorer != "oracle" && cfg.scorer != "random") {
        throw ConfigError("scorer must be verifier, oracle or random");
    }
    if (cfg.tables.empty() || !fs::is_regular_file(cfg.tables)) {
        throw ConfigError("tables file not found: '" + cfg.tables.string() + "'");
    }
    if (cfg.db_dir.empty() || !fs::is_directory(cfg.db_dir)) {
        throw ConfigError("database directory not found: '" + cfg.db_dir.string() + "'");
    }
    if (!cfg.dev.empty() && !fs::is_regular_file(cfg.dev)) {
        throw ConfigError("dev file not found: '" + cfg.dev.string() + "'");
    }
    if (need_train && (cfg.train.empty() || !fs::is_regular_file(cfg.train))) {
        throw ConfigError("train file not found: '" + cfg.train.string() + "'");
    }
}

std::string print_config(const RunConfig& c) {
    std::string out;
    auto line = [&](const std::string& key, const std::string& value, bool paper) {
        out += fmt::format("{:<28} = {:<40} # {}\n", key, value, paper ? "paper" : "ours");
    };
    auto q = [](const std::string& s) { return "\"" + s + "\""; };
    auto list = [](const auto& v, bool quote) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ", ";
            if constexpr (std::is_same_v<std::decay_t<decltype(v[0])>, std::string>) {
                s += quote ? "\"" + v[i] + "\"" : v[i];
            } else {
                s += std::to_string(v[i]);
            }
        }
        return s + "]";
    };
    line("paths.train", q(c.train.string()), false);
    line("paths.dev", q(c.dev.string()), false);
    line("paths.tables", q(c.tables.string()), false);
    line("paths.db_dir", q(c.db_dir.string()), false);
    line("paths.workdir", q(c.workdir.string()), false);
    line("paths.exemplars", q(c.exemplars.string()), false);
    line("run.k", std::to_string(c.k), true);
    line("run.n", std::to_string(c.n), true);
    line("run.p", std::to_string(c.p), true);
    line("run.pool_size", std::to_string(c.pool_size), true);
    line("run.temperature", fmt::format("{}", c.temperature), false);
    line("run.max_tokens", std::to_string(c.max_tokens), false);
    line("run.stop", list(c.stop, true), false);
    line("run.timeout_ms", std::to_string(c.timeout_ms), false);
    line("run.plateau_eps", fmt::format("{}", c.plateau_eps), false);
    line("run.max_rounds", std::to_string(c.max_rounds), false);
    line("run.seed", std::to_string(c.seed), false);
    line("run.parallelism", std::to_string(c.parallelism), false);
    line("run.use_hints", c.use_hints ? "true" : "false", true);
    line("run.eval_dev", c.eval_dev ? "true" : "false", false);
    line("run.label_metric", q(c.label_metric), false);
    for (auto [name, e] : {std::pair{"generator", &c.generator}, std::pair{"verifier", &c.verifier}}) {
        line(std::string(name) + ".base_url", q(e->base_url), false);
        line(std::string(name) + ".model", q(e->model), false);
        line(std::string(name) + ".mode", q(e->mode), false);
        line(std::string(name) + ".cassette", q(e->cassette.string()), false);
        line(std::string(name) + ".max_retries", std::to_string(e->max_retries), false);
        line(std::string(name) + ".backoff_ms", std::to_string(e->backoff_ms), false);
        line(std::string(name) + ".timeout_ms", std::to_string(e->timeout_ms), false);
    }
    line("api_key", c.api_key.empty() ? q("") : q("<set from " + std::string(kApiKeyEnv) + ">"), false);
    line("trainer.command", q(c.trainer_command), false);
    line("trainer.model_ref", q(c.trainer_model_ref), false);
    line("scaling.n_values", list(c.n_values, false), true);
    line("scaling.strategies", list(c.strategies, true), true);
    line("scaling.scorer", q(c.scorer), false);
    line("scaling.resamples", std::to_string(c.resamples), false);
    return out;
}

modelio::EndpointConfig endpoint_config(const EndpointSettings& s, const std::string& api_key) {
    modelio::EndpointConfig e;
    e.base_url = s.base_url;
    e.model_name = s.model;
    e.mode = modelio::endpoint_mode_from_string(s.mode);
    e.cassette_path = s.cassette;
    e.api_key = api_key;
    e.max_retries = s.max_retries;
    e.backoff = std::chrono::milliseconds(s.backoff_ms);
    e.timeout = std::chrono::milliseconds(s.timeout_ms);
    return e;
}

bootstrap::RoundConfig round_config(const RunConfig& c) {
    bootstrap::RoundConfig r;
    r.k = c.k;
    r.temperature = c.temperature;
    r.max_tokens = c.max_tokens;
    r.stop = c.stop;
    r.seed = c.seed;
    r.parallelism = static_cast<std::size_t>(c.parallelism);
    r.use_hints = c.use_hints;
    r.metric = bootstrap::label_metric_from_string(c.label_metric);
    return r;
}

}  // namespace starsql::cli
