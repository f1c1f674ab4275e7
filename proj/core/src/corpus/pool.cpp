#include <algorithm>
#include <array>

#include "starsql/corpus/benchmark.hpp"
#include "starsql/util/random.hpp"

namespace starsql::corpus {

std::vector<TaskInstance> select_training_pool(const std::vector<TaskInstance>& instances, std::size_t n,
                                               std::uint64_t seed) {
    // Strata: easy, medium, hard, extra, unparsed.
    std::array<std::vector<std::size_t>, 5> strata;
    std::size_t total = 0;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        if (instances[i].split != Split::train) continue;
        const auto& d = instances[i].difficulty;
        strata[d ? static_cast<std::size_t>(*d) : 4].push_back(i);
        ++total;
    }
    if (n > total)
        throw PoolTooSmall("requested " + std::to_string(n) + " training instances, train split has " +
                           std::to_string(total));

    std::array<std::size_t, 5> quota{};
    std::array<std::pair<std::uint64_t, std::size_t>, 5> remainders{};
    std::size_t assigned = 0;
    for (std::size_t s = 0; s < strata.size(); ++s) {
        const std::uint64_t scaled = static_cast<std::uint64_t>(n) * strata[s].size();
        quota[s] = total ? scaled / total : 0;
        remainders[s] = {total ? scaled % total : 0, s};
        assigned += quota[s];
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t r = 0; assigned < n; ++r) {
        const std::size_t s = remainders[r % remainders.size()].second;
        if (quota[s] < strata[s].size()) {
            ++quota[s];
            ++assigned;
        }
    }

    std::mt19937_64 rng(seed);
    std::vector<std::size_t> chosen;
    chosen.reserve(n);
    for (std::size_t s = 0; s < strata.size(); ++s) {
        auto& idx = strata[s];
        for (std::size_t i = 0; i < quota[s]; ++i) {
            const std::size_t j = i + util::uniform_below(rng, idx.size() - i);
            std::swap(idx[i], idx[j]);
            chosen.push_back(idx[i]);
        }
    }
    std::sort(chosen.begin(), chosen.end());
    std::vector<TaskInstance> out;
    out.reserve(chosen.size());
    for (std::size_t i : chosen) out.push_back(instances[i]);
    return out;
}

}  // namespace starsql::corpus
