#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace starsql::util {

std::string sha256_hex(std::string_view data);

// Hash of the file contents; throws IoError when unreadable.
std::string sha256_file(const std::filesystem::path& path);

}  // namespace starsql::util
