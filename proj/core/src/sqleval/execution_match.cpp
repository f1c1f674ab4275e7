#include "starsql/sqleval/execution_match.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <regex>

#include "starsql/util/hash.hpp"

namespace starsql::sqleval {

namespace {

bool is_number(const SqlValue& v) {
    return std::holds_alternative<std::int64_t>(v) || std::holds_alternative<double>(v);
}

long double as_long_double(const SqlValue& v) {
    if (const auto* i = std::get_if<std::int64_t>(&v)) return static_cast<long double>(*i);
    return static_cast<long double>(std::get<double>(v));
}

// Total order used for sorting rows: by type tag, then value.
int compare_values(const SqlValue& a, const SqlValue& b) {
    auto rank = [](const SqlValue& v) {
        if (std::holds_alternative<std::monostate>(v)) return 0;
        if (is_number(v)) return 1;
        if (std::holds_alternative<std::string>(v)) return 2;
        return 3;
    };
    int ra = rank(a), rb = rank(b);
    if (ra != rb) return ra < rb ? -1 : 1;
    switch (ra) {
        case 0: return 0;
        case 1: {
            long double x = as_long_double(a), y = as_long_double(b);
            if (std::isnan(x) || std::isnan(y)) return std::isnan(x) == std::isnan(y) ? 0 : (std::isnan(x) ? 1 : -1);
            return x < y ? -1 : (y < x ? 1 : 0);
        }
        case 2: return std::get<std::string>(a).compare(std::get<std::string>(b));
        default: return std::get<Blob>(a).bytes.compare(std::get<Blob>(b).bytes);
    }
}

bool row_less(const Row& a, const Row& b) {
    for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
        int c = compare_values(a[i], b[i]);
        if (c != 0) return c < 0;
    }
    return a.size() < b.size();
}

// Non-numeric columns must agree exactly for two rows to match; numeric
// columns contribute only their type.
std::string bucket_key(const Row& r) {
    std::string key;
    for (const auto& v : r) {
        key += is_number(v) ? "#" : render_value(v);
        key.push_back('\x1f');
    }
    return key;
}

// Kuhn's augmenting-path matching; true when every left row is matched.
bool perfect_matching(const std::vector<const Row*>& left, const std::vector<const Row*>& right) {
    const std::size_t n = left.size();
    std::vector<std::vector<std::size_t>> adj(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < right.size(); ++j) {
            if (rows_equal(*left[i], *right[j])) adj[i].push_back(j);
        }
        if (adj[i].empty()) return false;
    }
    std::vector<long> match_right(right.size(), -1);
    std::vector<char> seen;
    auto augment = [&](auto&& self, std::size_t u) -> bool {
        for (std::size_t v : adj[u]) {
            if (seen[v]) continue;
            seen[v] = 1;
            if (match_right[v] < 0 || self(self, static_cast<std::size_t>(match_right[v]))) {
                match_right[v] = static_cast<long>(u);
                return true;
            }
        }
        return false;
    };
    for (std::size_t u = 0; u < n; ++u) {
        seen.assign(right.size(), 0);
        if (!augment(augment, u)) return false;
    }
    return true;
}

bool multiset_equal(const std::vector<Row>& pred, const std::vector<Row>& gold) {
    std::vector<Row> a = pred, b = gold;
    std::sort(a.begin(), a.end(), row_less);
    std::sort(b.begin(), b.end(), row_less);
    bool aligned = true;
    for (std::size_t i = 0; i < a.size() && aligned; ++i) aligned = rows_equal(a[i], b[i]);
    if (aligned) return true;

    std::map<std::string, std::pair<std::vector<const Row*>, std::vector<const Row*>>> buckets;
    for (const auto& r : pred) buckets[bucket_key(r)].first.push_back(&r);
    for (const auto& r : gold) buckets[bucket_key(r)].second.push_back(&r);
    for (const auto& [key, sides] : buckets) {
        if (sides.first.size() != sides.second.size()) return false;
        if (!perfect_matching(sides.first, sides.second)) return false;
    }
    return true;
}

}  // namespace

bool values_equal(const SqlValue& a, const SqlValue& b) {
    const bool a_null = std::holds_alternative<std::monostate>(a);
    const bool b_null = std::holds_alternative<std::monostate>(b);
    if (a_null || b_null) return a_null && b_null;
    if (is_number(a) && is_number(b)) {
        if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
            if (std::get<std::int64_t>(a) == std::get<std::int64_t>(b)) return true;
        }
        long double x = as_long_double(a), y = as_long_double(b);
        if (x == y) return true;
        return std::fabs(x - y) <= static_cast<long double>(kRelativeTolerance) * std::max(std::fabs(x), std::fabs(y));
    }
    if (a.index() != b.index()) return false;
    return a == b;
}

bool rows_equal(const Row& a, const Row& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (!values_equal(a[i], b[i])) return false;
    }
    return true;
}

bool results_match(const ExecResult& pred, const ExecResult& gold, bool order_matters) {
    if (!pred.ok() || !gold.ok()) return false;
    if (pred.width != gold.width) return false;
    if (pred.rows.size() != gold.rows.size()) return false;
    if (order_matters) {
        for (std::size_t i = 0; i < pred.rows.size(); ++i) {
            if (!rows_equal(pred.rows[i], gold.rows[i])) return false;
        }
        return true;
    }
    return multiset_equal(pred.rows, gold.rows);
}

bool gold_order_matters(const std::string& gold_sql, const Query* gold_parse) {
    if (gold_parse) return gold_parse->order_by.has_value();
    static const std::regex order_by(R"(order\s+by)", std::regex::icase);
    return std::regex_search(gold_sql, order_by);
}

std::string result_fingerprint(const ExecResult& r, bool order_matters) {
    if (!r.ok()) return {};
    std::vector<std::string> lines;
    lines.reserve(r.rows.size());
    for (const auto& row : r.rows) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) line.push_back('\x1f');
            line += render_value(row[i]);
        }
        lines.push_back(std::move(line));
    }
    if (!order_matters) std::sort(lines.begin(), lines.end());
    std::string text = std::to_string(r.width) + "\n";
    for (const auto& l : lines) text += l + "\n";
    return util::sha256_hex(text);
}

}  // namespace starsql::sqleval
