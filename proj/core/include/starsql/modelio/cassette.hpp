#pragma once

#include <cstddef>
#include <filesystem>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace starsql::modelio {

// sha256 over the canonical (sorted-key, compact) serialization.
std::string request_hash(const nlohmann::json& request);

// Append-only JSONL of {request_hash, request, response}. Lookups return the
// first entry recorded for a hash. Appends are serialized and flushed.
class Cassette {
public:
    explicit Cassette(std::filesystem::path path);

    std::optional<nlohmann::json> lookup(const std::string& hash) const;
    void append(const std::string& hash, const nlohmann::json& request, const nlohmann::json& response);

    std::size_t size() const;
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
    mutable std::mutex mu_;
    std::vector<nlohmann::json> entries_;
    std::unordered_map<std::string, std::size_t> first_;
};

}  // namespace starsql::modelio
