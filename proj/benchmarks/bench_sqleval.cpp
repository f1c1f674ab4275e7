#include <benchmark/benchmark.h>

#include <algorithm>
#include <random>

#include "starsql/corpus/schema.hpp"
#include "starsql/modelio/extract.hpp"
#include "starsql/selection/curve.hpp"
#include "starsql/sqleval/exact_match.hpp"
#include "starsql/sqleval/execution_match.hpp"
#include "starsql/sqleval/tokenizer.hpp"
#include "starsql/util/json_io.hpp"

using namespace starsql;

namespace {

const std::filesystem::path kFixtures = STARSQL_BENCH_FIXTURES;

struct Corpus {
    corpus::SchemaCatalog schemas = corpus::load_schemas((kFixtures / "spider" / "tables.json").string());
    nlohmann::json dev = util::read_json(kFixtures / "spider" / "dev.json");
};

const Corpus& corpus_data() {
    static const Corpus c;
    return c;
}

void BM_Tokenize(benchmark::State& state) {
    const auto& c = corpus_data();
    std::size_t i = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sqleval::tokenize(c.dev[i % c.dev.size()]["query"].get<std::string>()));
        ++i;
    }
}
BENCHMARK(BM_Tokenize);

void BM_Parse(benchmark::State& state) {
    const auto& c = corpus_data();
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& r = c.dev[i++ % c.dev.size()];
        try {
            benchmark::DoNotOptimize(
                sqleval::parse_sql(r["query"].get<std::string>(), c.schemas.at(r["db_id"].get<std::string>())));
        } catch (const std::exception&) {
        }
    }
}
BENCHMARK(BM_Parse);

void BM_ExactMatchSelf(benchmark::State& state) {
    const auto& c = corpus_data();
    std::size_t i = 0;
    for (auto _ : state) {
        const auto& r = c.dev[i++ % c.dev.size()];
        const auto q = r["query"].get<std::string>();
        benchmark::DoNotOptimize(sqleval::exact_set_match(q, q, c.schemas.at(r["db_id"].get<std::string>())));
    }
}
BENCHMARK(BM_ExactMatchSelf);

void BM_ResultsMatchUnordered(benchmark::State& state) {
    const auto rows = static_cast<std::size_t>(state.range(0));
    sqleval::ExecResult a, b;
    a.status = b.status = sqleval::ExecStatus::ok;
    a.width = b.width = 2;
    std::mt19937_64 rng(1);
    for (std::size_t i = 0; i < rows; ++i) {
        sqleval::Row r{sqleval::SqlValue{static_cast<std::int64_t>(rng() % 50)}, sqleval::SqlValue{std::to_string(rng() % 7)}};
        a.rows.push_back(r);
        b.rows.push_back(r);
    }
    std::shuffle(b.rows.begin(), b.rows.end(), rng);
    for (auto _ : state) benchmark::DoNotOptimize(sqleval::results_match(a, b, false));
}
BENCHMARK(BM_ResultsMatchUnordered)->Arg(16)->Arg(256)->Arg(4096);

void BM_ExtractSql(benchmark::State& state) {
    const std::string text =
        "Step 1: find the singers.\nStep 2: keep those older than 30.\nSQL:\n```sql\nSELECT name FROM singer WHERE age > 30\n```";
    for (auto _ : state) benchmark::DoNotOptimize(modelio::extract_sql(text));
}
BENCHMARK(BM_ExtractSql);

void BM_ScalingCurve(benchmark::State& state) {
    std::mt19937_64 rng(3);
    selection::PoolMap pools;
    for (int i = 0; i < 1034; ++i) {
        std::vector<selection::ScoredCandidate> pool(16);
        for (int s = 0; s < 16; ++s) {
            auto& c = pool[static_cast<std::size_t>(s)];
            c.candidate.sample_index = s;
            c.candidate.label = rng() % 3 == 0;
            c.candidate.fingerprint = std::to_string(rng() % 4);
            c.score = std::uniform_real_distribution<>(0, 1)(rng);
        }
        pools["q" + std::to_string(i)] = std::move(pool);
    }
    selection::CurveOptions opts;
    opts.resamples = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(selection::scaling_curve(
            pools, {selection::Strategy::greedy, selection::Strategy::self_consistency, selection::Strategy::best_of_n},
            {1, 2, 4, 8, 16}, opts));
    }
}
BENCHMARK(BM_ScalingCurve)->Arg(0)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
