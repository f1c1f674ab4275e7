#include "starsql/modelio/cassette.hpp"

#include <fstream>

#include "starsql/util/errors.hpp"
#include "starsql/util/hash.hpp"
#include "starsql/util/json_io.hpp"

namespace starsql::modelio {

std::string request_hash(const nlohmann::json& request) { return util::sha256_hex(util::canonical_dump(request)); }

Cassette::Cassette(std::filesystem::path path) : path_(std::move(path)) {
    if (!std::filesystem::exists(path_)) return;
    for (auto& e : util::read_jsonl(path_)) {
        if (!e.contains("request_hash") || !e.contains("response")) {
            throw IoError(path_.string() + ": cassette entry without request_hash/response");
        }
        first_.emplace(e["request_hash"].get<std::string>(), entries_.size());
        entries_.push_back(std::move(e));
    }
}

std::optional<nlohmann::json> Cassette::lookup(const std::string& hash) const {
    std::lock_guard lock(mu_);
    auto it = first_.find(hash);
    if (it == first_.end()) return std::nullopt;
    return std::optional<nlohmann::json>(std::in_place, entries_[it->second].at("response"));
}

void Cassette::append(const std::string& hash, const nlohmann::json& request, const nlohmann::json& response) {
    nlohmann::json entry{{"request_hash", hash}, {"request", request}, {"response", response}};
    std::lock_guard lock(mu_);
    if (!path_.parent_path().empty()) std::filesystem::create_directories(path_.parent_path());
    std::ofstream out(path_, std::ios::app | std::ios::binary);
    if (!out) throw IoError("cannot append to cassette " + path_.string());
    out << util::canonical_dump(entry) << '\n';
    out.flush();
    if (!out) throw IoError("write failed for cassette " + path_.string());
    first_.emplace(hash, entries_.size());
    entries_.push_back(std::move(entry));
}

std::size_t Cassette::size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
}

}  // namespace starsql::modelio
