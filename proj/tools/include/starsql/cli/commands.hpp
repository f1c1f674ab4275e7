#pragma once

#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "starsql/bootstrap/loop.hpp"
#include "starsql/cli/config.hpp"
#include "starsql/modelio/transport.hpp"
#include "starsql/selection/curve.hpp"
#include "starsql/selection/report.hpp"

namespace starsql::cli {

// Transports to use instead of HTTP; tests inject scripted ones here.
struct Services {
    std::shared_ptr<modelio::Transport> generator;
    std::shared_ptr<modelio::Transport> verifier;
};

struct EvaluateOptions {
    std::filesystem::path predictions;  // .txt (one per dev line), .json or .jsonl
    std::filesystem::path pools;        // with strategy, instead of predictions
    std::string strategy;
    std::filesystem::path manifest;     // hashed into the report when given
    std::filesystem::path out_dir;      // default <workdir>/eval
};

struct ScalingOptions {
    std::filesystem::path pools;  // sampled from the generator when empty
    std::filesystem::path out_dir;
    bool plot = true;
};

struct LabelOptions {
    std::filesystem::path predictions;
    std::filesystem::path out;
};

struct DatasetsOptions {
    std::vector<std::filesystem::path> candidates;
    std::filesystem::path out_dir;
};

// Per-dev-instance SQL, aligned with the dev split: nullopt where the file has
// no entry, an empty string where the entry is blank (no SQL was extracted).
std::vector<std::optional<std::string>> load_predictions(const std::filesystem::path& path,
                                                         const std::vector<corpus::TaskInstance>& dev);

selection::EvalReport cmd_evaluate(const RunConfig& cfg, const EvaluateOptions& opts, std::ostream& out,
                                   const Services& services = {});
std::vector<bootstrap::IterationManifest> cmd_bootstrap(const RunConfig& cfg, bool resume, std::ostream& out,
                                                        const Services& services = {});
std::vector<selection::CurvePoint> cmd_scaling(const RunConfig& cfg, const ScalingOptions& opts, std::ostream& out,
                                               const Services& services = {});
void cmd_label(const RunConfig& cfg, const LabelOptions& opts, std::ostream& out);
void cmd_datasets(const RunConfig& cfg, const DatasetsOptions& opts, std::ostream& out);

// Maps an exception from any command to its exit code.
int exit_code_for(const std::exception& e);

// Whole command line: parse, run, report errors on err. Returns the exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err, const Services& services = {});

}  // namespace starsql::cli
