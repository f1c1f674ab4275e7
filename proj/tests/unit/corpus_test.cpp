#include <gtest/gtest.h>

#include <fstream>

#include "fixtures.hpp"
#include "starsql/corpus/benchmark.hpp"
#include "starsql/sqleval/errors.hpp"
#include "starsql/util/json_io.hpp"

using namespace starsql;
using namespace starsql::testing;
using nlohmann::json;

namespace {

std::vector<corpus::TaskInstance> dev_as_train() {
    auto records = util::read_json(spider_dev());
    return corpus::parse_split(records, corpus::Split::train, dev_benchmark().schemas);
}

std::map<std::string, double> proportions(const std::vector<corpus::TaskInstance>& xs) {
    std::map<std::string, double> p;
    for (const auto& x : xs) p[x.bucket()] += 1.0 / static_cast<double>(xs.size());
    return p;
}

}  // namespace

TEST(Corpus, LoadsDevSplit) {
    const auto& b = dev_benchmark();
    EXPECT_EQ(b.count(corpus::Split::dev), 1034u);
    EXPECT_EQ(b.count(corpus::Split::train), 0u);
    EXPECT_EQ(b.schemas.size(), 20u);
    EXPECT_EQ(b.unparsed_count(corpus::Split::dev), 0u);
    EXPECT_TRUE(std::filesystem::exists(b.db_path("concert_singer")));
}

TEST(Corpus, EmptyTrainOneDev) {
    auto dir = temp_dir("corpus");
    util::write_text(dir / "train.json", "[]");
    util::write_json(dir / "dev.json",
                     json::array({{{"db_id", "singer"}, {"question", "How many singers?"}, {"query", "SELECT count(*) FROM singer"}}}));
    auto b = corpus::load_benchmark((dir / "train.json").string(), (dir / "dev.json").string(),
                                    spider_tables().string(), fixture_dbs());
    EXPECT_EQ(b.count(corpus::Split::train), 0u);
    EXPECT_EQ(b.count(corpus::Split::dev), 1u);
    EXPECT_EQ(b.instances[0].difficulty, corpus::Difficulty::easy);
}

TEST(Corpus, UnknownDbIdIsMalformed) {
    auto dir = temp_dir("corpus");
    util::write_json(dir / "dev.json",
                     json::array({{{"db_id", "no_such_db"}, {"question", "q"}, {"query", "SELECT 1"}}}));
    EXPECT_THROW(corpus::load_benchmark("", (dir / "dev.json").string(), spider_tables().string(), fixture_dbs()),
                 corpus::MalformedRecord);
}

TEST(Corpus, MissingFieldIsMalformed) {
    auto dir = temp_dir("corpus");
    util::write_json(dir / "dev.json", json::array({{{"db_id", "singer"}, {"question", "q"}}}));
    try {
        corpus::load_benchmark("", (dir / "dev.json").string(), spider_tables().string(), fixture_dbs());
        FAIL() << "expected MalformedRecord";
    } catch (const corpus::MalformedRecord& e) {
        EXPECT_EQ(e.index(), 0u);
    }
}

TEST(Corpus, MissingDatabaseFile) {
    auto dir = temp_dir("corpus");
    util::write_json(dir / "dev.json",
                     json::array({{{"db_id", "singer"}, {"question", "q"}, {"query", "SELECT count(*) FROM singer"}}}));
    EXPECT_THROW(corpus::load_benchmark("", (dir / "dev.json").string(), spider_tables().string(), dir / "nodbs"),
                 corpus::MissingDatabaseFile);
}

TEST(Corpus, HardnessMatchesOracleOnAllDev) {
    auto oracle = util::read_json(fixtures_dir() / "oracle" / "hardness.json");
    const auto& b = dev_benchmark();
    ASSERT_EQ(oracle.size(), 1034u);
    std::size_t agree = 0, unparsed = 0;
    for (const auto& row : oracle) {
        const auto& inst = b.instances.at(row["index"].get<std::size_t>());
        ASSERT_EQ(inst.gold_sql, row["query"].get<std::string>());
        if (row["hardness"].is_null()) {
            ++unparsed;
            EXPECT_TRUE(inst.unparsed());
            continue;
        }
        auto got = corpus::classify_difficulty(inst.gold_sql, b.schema(inst.db_id));
        if (corpus::to_string(got) == row["hardness"].get<std::string>()) ++agree;
        else ADD_FAILURE() << inst.gold_sql << " -> " << corpus::to_string(got) << ", oracle " << row["hardness"];
    }
    EXPECT_EQ(agree + unparsed, oracle.size());
    EXPECT_EQ(unparsed, 0u);
}

TEST(Corpus, HardnessExamples) {
    const auto& s = dev_benchmark().schema("concert_singer");
    EXPECT_EQ(corpus::classify_difficulty("SELECT count(*) FROM singer", s), corpus::Difficulty::easy);
    EXPECT_EQ(corpus::classify_difficulty(
                  "SELECT T2.name FROM singer_in_concert AS T1 JOIN singer AS T2 ON T1.singer_id = T2.singer_id "
                  "WHERE T1.concert_id IN (SELECT concert_id FROM concert WHERE year = 2014) "
                  "GROUP BY T2.name ORDER BY count(*) DESC",
                  s),
              corpus::Difficulty::extra);
    EXPECT_THROW(corpus::classify_difficulty("SELECT FROM WHERE", s), corpus::UnparsableSql);
}

TEST(Corpus, SplitRoundTrip) {
    const auto& b = dev_benchmark();
    auto dev = b.split(corpus::Split::dev);
    auto again = corpus::parse_split(corpus::split_to_json(dev), corpus::Split::dev, b.schemas);
    EXPECT_EQ(again, dev);
}

TEST(Corpus, SchemaRoundTripAndValidation) {
    for (const auto& [id, s] : dev_benchmark().schemas) {
        EXPECT_NO_THROW(s.validate()) << id;
        EXPECT_EQ(corpus::schema_from_json(corpus::schema_to_json(s)), s) << id;
    }
    auto bad = dev_benchmark().schema("pets_1");
    bad.tables[0].primary_key.push_back("no_such_column");
    EXPECT_THROW(bad.validate(), corpus::SchemaError);
}

TEST(Corpus, CompactSchemaSerialization) {
    auto text = dev_benchmark().schema("pets_1").serialize_compact();
    EXPECT_NE(text.find("Student(StuID, LName, Fname, Age, Sex, Major, Advisor, city_code)"), std::string::npos);
    EXPECT_NE(text.find("Pets(PetID, PetType, pet_age, weight)"), std::string::npos);
}

TEST(Pool, DeterministicForSeed) {
    auto train = dev_as_train();
    auto a = corpus::select_training_pool(train, 300, 11);
    auto b = corpus::select_training_pool(train, 300, 11);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.size(), 300u);
    auto c = corpus::select_training_pool(train, 300, 12);
    EXPECT_NE(a, c);
}

TEST(Pool, FullSizeIsWholeSet) {
    auto train = dev_as_train();
    auto all = corpus::select_training_pool(train, train.size(), 5);
    EXPECT_EQ(all, train);  // source order is kept
}

TEST(Pool, TooSmall) {
    auto train = dev_as_train();
    EXPECT_THROW(corpus::select_training_pool(train, train.size() + 1, 0), corpus::PoolTooSmall);
}

TEST(Pool, StratifiedWithinTwoPoints) {
    auto train = dev_as_train();
    auto full = proportions(train);
    for (std::uint64_t seed = 0; seed < 25; ++seed) {
        for (std::size_t n : {50u, 137u, 500u, 1000u}) {
            auto pick = proportions(corpus::select_training_pool(train, n, seed));
            for (const auto& [bucket, p] : full) {
                EXPECT_LT(std::abs(pick[bucket] - p), 0.02) << "seed " << seed << " n " << n << " " << bucket;
            }
        }
    }
}
