#include "starsql/selection/curve.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>

#include <fmt/format.h>

#include "starsql/util/random.hpp"

namespace starsql::selection {

using nlohmann::json;

std::pair<double, double> bootstrap_ci(const std::vector<bool>& hits, const CurveOptions& opts) {
    if (hits.empty() || opts.resamples == 0) return {0, 0};
    std::mt19937_64 rng(opts.seed);
    std::vector<double> means;
    means.reserve(opts.resamples);
    const auto m = hits.size();
    for (std::size_t r = 0; r < opts.resamples; ++r) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < m; ++i) c += hits[util::uniform_below(rng, m)] ? 1 : 0;
        means.push_back(100.0 * static_cast<double>(c) / static_cast<double>(m));
    }
    std::sort(means.begin(), means.end());
    const double alpha = (1.0 - opts.confidence) / 2.0;
    auto at = [&](double q) {
        auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(means.size() - 1) + 0.5));
        return means[std::min(idx, means.size() - 1)];
    };
    return {at(alpha), at(1.0 - alpha)};
}

std::vector<CurvePoint> scaling_curve(const PoolMap& pools, const std::vector<Strategy>& strategies,
                                      const std::vector<int>& n_values, const CurveOptions& opts) {
    if (pools.empty()) throw EmptyPool("no candidate pools");
    if (n_values.empty()) throw ConfigError("no n values");
    const int max_n = *std::max_element(n_values.begin(), n_values.end());
    if (max_n < 1) throw ConfigError("n values must be >= 1");
    for (const auto& [id, pool] : pools) {
        if (pool.size() < static_cast<std::size_t>(max_n)) {
            throw InsufficientPool(id, pool.size(), static_cast<std::size_t>(max_n));
        }
    }
    auto point = [&](std::string name, int n, const std::vector<bool>& hits) {
        CurvePoint p;
        p.strategy = std::move(name);
        p.n = n;
        p.instances = hits.size();
        p.correct = static_cast<std::size_t>(std::count(hits.begin(), hits.end(), true));
        p.accuracy = 100.0 * static_cast<double>(p.correct) / static_cast<double>(p.instances);
        std::tie(p.ci_low, p.ci_high) = bootstrap_ci(hits, opts);
        return p;
    };
    std::vector<CurvePoint> out;
    for (auto s : strategies) {
        for (int n : n_values) {
            std::vector<bool> hits;
            for (const auto& [_, pool] : pools) {
                SelectionOutcome o;
                switch (s) {
                    case Strategy::greedy: o = greedy(pool); break;
                    case Strategy::best_of_n: o = best_of_n(pool, n); break;
                    case Strategy::self_consistency: o = self_consistency(pool, n); break;
                }
                hits.push_back(o.correct);
            }
            out.push_back(point(to_string(s), n, hits));
        }
    }
    for (int n : n_values) {
        std::vector<bool> hits;
        for (const auto& [_, pool] : pools) hits.push_back(pass_at_n(pool, n));
        out.push_back(point(kPassAtN, n, hits));
    }
    return out;
}

std::string curve_csv(const std::vector<CurvePoint>& points) {
    std::string out = "strategy,n,accuracy,ci_low,ci_high\n";
    for (const auto& p : points) {
        out += fmt::format("{},{},{:.2f},{:.2f},{:.2f}\n", p.strategy, p.n, p.accuracy, p.ci_low, p.ci_high);
    }
    return out;
}

json curve_json(const std::vector<CurvePoint>& points) {
    json rows = json::array();
    for (const auto& p : points) {
        rows.push_back(json{{"strategy", p.strategy},
                            {"n", p.n},
                            {"accuracy", std::round(p.accuracy * 100) / 100},
                            {"ci_low", std::round(p.ci_low * 100) / 100},
                            {"ci_high", std::round(p.ci_high * 100) / 100},
                            {"correct", p.correct},
                            {"instances", p.instances}});
    }
    std::size_t instances = points.empty() ? 0 : points.front().instances;
    return json{{"instances", instances}, {"points", rows}};
}

std::string curve_svg(const std::vector<CurvePoint>& points) {
    const double w = 640, h = 400, left = 60, right = 150, top = 20, bottom = 50;
    const double pw = w - left - right, ph = h - top - bottom;
    int max_n = 1;
    for (const auto& p : points) max_n = std::max(max_n, p.n);
    // log2 x axis, the usual shape for n = 1, 2, 4, ...
    auto x = [&](int n) {
        double span = std::log2(static_cast<double>(max_n));
        return left + (span == 0 ? 0.0 : std::log2(static_cast<double>(n)) / span * pw);
    };
    auto y = [&](double acc) { return top + ph - acc / 100.0 * ph; };

    std::string svg = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" font-family=\"sans-serif\" "
        "font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        w, h);
    svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", left, top + ph, left + pw,
                       top + ph);
    svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n", left, top, left, top + ph);
    for (int tick = 0; tick <= 100; tick += 20) {
        svg += fmt::format("<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n", left - 6, y(tick) + 4, tick);
    }
    for (int n = 1; n <= max_n; n *= 2) {
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", x(n), top + ph + 18, n);
    }
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">n</text>\n", left + pw / 2, h - 10);
    svg += fmt::format(
        "<text x=\"14\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 14 {})\">accuracy (%)</text>\n",
        top + ph / 2, top + ph / 2);

    std::map<std::string, std::vector<const CurvePoint*>> series;
    std::vector<std::string> order;
    for (const auto& p : points) {
        if (!series.count(p.strategy)) order.push_back(p.strategy);
        series[p.strategy].push_back(&p);
    }
    const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#7f7f7f", "#9467bd"};
    for (std::size_t s = 0; s < order.size(); ++s) {
        const char* color = colors[s % 5];
        std::string path;
        for (const auto* p : series[order[s]]) {
            path += fmt::format("{:.1f},{:.1f} ", x(p->n), y(p->accuracy));
        }
        const bool dashed = order[s] == kPassAtN;
        svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"2\"{} points=\"{}\"/>\n", color,
                           dashed ? " stroke-dasharray=\"5,4\"" : "", path);
        for (const auto* p : series[order[s]]) {
            svg += fmt::format("<circle cx=\"{:.1f}\" cy=\"{:.1f}\" r=\"3\" fill=\"{}\"/>\n", x(p->n), y(p->accuracy),
                               color);
        }
        double ly = top + 10 + 18.0 * static_cast<double>(s);
        svg += fmt::format("<line x1=\"{}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>\n",
                           left + pw + 12, ly, left + pw + 32, ly, color);
        svg += fmt::format("<text x=\"{}\" y=\"{}\">{}</text>\n", left + pw + 38, ly + 4, order[s]);
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace starsql::selection
