#pragma once

#include <filesystem>
#include <string>

#include "starsql/corpus/benchmark.hpp"
#include "starsql/modelio/prompt.hpp"

namespace starsql::testing {

inline std::filesystem::path fixtures_dir() { return STARSQL_TEST_FIXTURES; }
inline std::filesystem::path fixture_dbs() { return STARSQL_TEST_DBS; }
inline std::filesystem::path data_dir() { return STARSQL_TEST_DATA; }

inline std::filesystem::path spider_tables() { return fixtures_dir() / "spider" / "tables.json"; }
inline std::filesystem::path spider_dev() { return fixtures_dir() / "spider" / "dev.json"; }
inline std::filesystem::path mini_dir() { return fixtures_dir() / "mini"; }

// Full fixture dev split.
const corpus::Benchmark& dev_benchmark();

// 20 train + 10 dev instances with a completion script.
const corpus::Benchmark& mini_benchmark();

std::vector<modelio::PromptExemplar> default_exemplars(const corpus::Benchmark& b);

// Fresh empty directory under the system temp dir.
std::filesystem::path temp_dir(const std::string& tag);

}  // namespace starsql::testing
