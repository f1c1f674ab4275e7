#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace starsql::util {

using json = nlohmann::json;

std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);
std::vector<json> read_jsonl(const std::filesystem::path& path);

// Writes via a sibling temp file and rename so readers never see a partial file.
void write_text(const std::filesystem::path& path, const std::string& text);
void write_json(const std::filesystem::path& path, const json& value);
void write_jsonl(const std::filesystem::path& path, const std::vector<json>& rows);

// Compact dump with sorted keys; the byte form used for hashing and JSONL rows.
std::string canonical_dump(const json& value);

}  // namespace starsql::util
