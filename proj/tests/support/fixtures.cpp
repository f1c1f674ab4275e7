#include "fixtures.hpp"

#include <atomic>
#include <random>

#include <unistd.h>

namespace starsql::testing {

namespace fs = std::filesystem;

const corpus::Benchmark& dev_benchmark() {
    static const corpus::Benchmark b =
        corpus::load_benchmark("", spider_dev().string(), spider_tables().string(), fixture_dbs());
    return b;
}

const corpus::Benchmark& mini_benchmark() {
    static const corpus::Benchmark b = corpus::load_benchmark(
        (mini_dir() / "train.json").string(), (mini_dir() / "dev.json").string(), spider_tables().string(),
        fixture_dbs());
    return b;
}

std::vector<modelio::PromptExemplar> default_exemplars(const corpus::Benchmark& b) {
    return modelio::load_exemplars(data_dir() / "exemplars.json", b.schemas);
}

fs::path temp_dir(const std::string& tag) {
    static std::atomic<int> counter{0};
    auto p = fs::temp_directory_path() /
             ("starsql-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

}  // namespace starsql::testing
