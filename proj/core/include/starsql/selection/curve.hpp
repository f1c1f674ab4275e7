#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "starsql/selection/selection.hpp"

namespace starsql::selection {

struct CurvePoint {
    std::string strategy;  // greedy, best_of_n, self_consistency, pass@n
    int n = 1;
    double accuracy = 0;  // percent
    double ci_low = 0;
    double ci_high = 0;
    std::size_t correct = 0;
    std::size_t instances = 0;
};

struct CurveOptions {
    std::size_t resamples = 1000;
    std::uint64_t seed = 0;
    double confidence = 0.95;
};

inline constexpr const char* kPassAtN = "pass@n";

// One row per (strategy, n) plus pass@n rows as the upper bound. Throws
// InsufficientPool when a pool is shorter than max(n_values).
std::vector<CurvePoint> scaling_curve(const PoolMap& pools, const std::vector<Strategy>& strategies,
                                      const std::vector<int>& n_values, const CurveOptions& opts = {});

// Percentile bootstrap over instances for the mean of `hits`.
std::pair<double, double> bootstrap_ci(const std::vector<bool>& hits, const CurveOptions& opts);

std::string curve_csv(const std::vector<CurvePoint>& points);
nlohmann::json curve_json(const std::vector<CurvePoint>& points);
std::string curve_svg(const std::vector<CurvePoint>& points);

}  // namespace starsql::selection
