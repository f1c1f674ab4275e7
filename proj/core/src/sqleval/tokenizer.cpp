#include "starsql/sqleval/tokenizer.hpp"

#include <map>

#include "starsql/sqleval/errors.hpp"

namespace starsql::sqleval {

namespace {

using u32 = std::u32string;

// UTF-8 decoding with surrogate-escape for invalid bytes so encode(decode(x)) == x.
u32 decode(std::string_view s) {
    u32 out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const auto b0 = static_cast<unsigned char>(s[i]);
        int len = 0;
        char32_t cp = 0;
        if (b0 < 0x80) {
            len = 1;
            cp = b0;
        } else if ((b0 & 0xE0) == 0xC0) {
            len = 2;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            len = 3;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            len = 4;
            cp = b0 & 0x07;
        }
        bool ok = len > 0 && i + len <= s.size();
        for (int k = 1; ok && k < len; ++k) {
            const auto b = static_cast<unsigned char>(s[i + k]);
            if ((b & 0xC0) != 0x80) ok = false;
            cp = (cp << 6) | (b & 0x3F);
        }
        if (ok && len > 1) {
            static constexpr char32_t min_cp[] = {0, 0, 0x80, 0x800, 0x10000};
            if (cp < min_cp[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) ok = false;
        }
        if (!ok) {
            out.push_back(0xDC00 + b0);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::string encode(const u32& s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) {
        if (cp >= 0xDC80 && cp <= 0xDCFF) {
            out.push_back(static_cast<char>(cp - 0xDC00));
        } else if (cp < 0x80) {
            out.push_back(static_cast<char>(cp));
        } else if (cp < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else if (cp < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
        }
    }
    return out;
}

// Python str.isspace().
bool is_space(char32_t c) {
    return (c >= 0x09 && c <= 0x0D) || (c >= 0x1C && c <= 0x20) || c == 0x85 || c == 0xA0 || c == 0x1680 ||
           (c >= 0x2000 && c <= 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
           c == 0x3000;
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_quote_like(char32_t c) {
    switch (c) {
        case 0xAB: case 0xBB: case 0x2018: case 0x2019: case 0x201C: case 0x201D: case 0x201E:
        case 0x2012: case 0x2013: case 0x2014: case 0x2015:
            return true;
        default:
            return false;
    }
}

// Approximation of Python's Unicode \w: ASCII alphanumerics and underscore, plus
// any non-ASCII code point that is neither whitespace nor punctuation handled here.
bool is_word(char32_t c) {
    if (c < 0x80) return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z') || is_digit(c) || c == U'_';
    return !is_space(c) && !is_quote_like(c);
}

char32_t lower(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 32;
    if (c >= 0xC0 && c <= 0xDE && c != 0xD7) return c + 32;
    return c;
}

bool ws_only(const u32& s, std::size_t from) {
    for (std::size_t k = from; k < s.size(); ++k) {
        if (!is_space(s[k])) return false;
    }
    return true;
}

template <class Pred>
u32 pad_chars(const u32& s, Pred pred) {
    u32 out;
    out.reserve(s.size() + 8);
    for (char32_t c : s) {
        if (pred(c)) {
            out += U' ';
            out += c;
            out += U' ';
        } else {
            out += c;
        }
    }
    return out;
}

// ([«“‘„]|[`]+) -> " \1 "
u32 starting_quotes(const u32& s) {
    u32 out;
    std::size_t i = 0;
    while (i < s.size()) {
        const char32_t c = s[i];
        if (c == 0xAB || c == 0x201C || c == 0x2018 || c == 0x201E) {
            out += U' ';
            out += c;
            out += U' ';
            ++i;
        } else if (c == U'`') {
            std::size_t j = i;
            while (j < s.size() && s[j] == U'`') ++j;
            out += U' ';
            out += s.substr(i, j - i);
            out += U' ';
            i = j;
        } else {
            out += c;
            ++i;
        }
    }
    return out;
}

// Non-overlapping literal replacement of `needle` by " needle ".
u32 pad_literal(const u32& s, const u32& needle) {
    u32 out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s.compare(i, needle.size(), needle) == 0) {
            out += U' ';
            out += needle;
            out += U' ';
            i += needle.size();
        } else {
            out += s[i++];
        }
    }
    return out;
}

// ([^\.])(\.)([<cls>]*)\s*$ with replacement "\1 \2<sep>\3 ".
template <class Cls>
u32 final_period(const u32& s, Cls in_class, bool space_after_period) {
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        if (s[i] == U'.' || s[i + 1] != U'.') continue;
        std::size_t e = i + 2;
        while (e < s.size() && in_class(s[e])) ++e;
        if (!ws_only(s, e)) continue;
        u32 out = s.substr(0, i + 1);
        out += U' ';
        out += U'.';
        if (space_after_period) out += U' ';
        out += s.substr(i + 2, e - (i + 2));
        out += U' ';
        return out;
    }
    return s;
}

// ([:,])([^\d]) -> " \1 \2"
u32 split_colon_comma(const u32& s) {
    u32 out;
    std::size_t i = 0;
    while (i < s.size()) {
        if ((s[i] == U':' || s[i] == U',') && i + 1 < s.size() && !is_digit(s[i + 1])) {
            out += U' ';
            out += s[i];
            out += U' ';
            out += s[i + 1];
            i += 2;
        } else {
            out += s[i++];
        }
    }
    return out;
}

// ([:,])$ -> " \1 "  ($ also matches before a final newline)
u32 trailing_colon_comma(const u32& s) {
    const std::size_t n = s.size();
    auto is_cc = [](char32_t c) { return c == U':' || c == U','; };
    if (n >= 1 && is_cc(s[n - 1])) return s.substr(0, n - 1) + U" " + s[n - 1] + U" ";
    if (n >= 2 && s[n - 1] == U'\n' && is_cc(s[n - 2])) return s.substr(0, n - 2) + U" " + s[n - 2] + U" \n";
    return s;
}

// \.{2,} -> " \g<0> "
u32 pad_ellipsis(const u32& s) {
    u32 out;
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == U'.') {
            std::size_t j = i;
            while (j < s.size() && s[j] == U'.') ++j;
            if (j - i >= 2) out += U' ';
            out += s.substr(i, j - i);
            if (j - i >= 2) out += U' ';
            i = j;
        } else {
            out += s[i++];
        }
    }
    return out;
}

u32 collapse_spaces(const u32& s) {
    u32 out;
    bool in_ws = false;
    for (char32_t c : s) {
        if (is_space(c)) {
            if (!in_ws) out += U' ';
            in_ws = true;
        } else {
            out += c;
            in_ws = false;
        }
    }
    return out;
}

bool ieq_at(const u32& s, std::size_t pos, std::u32string_view w) {
    if (pos + w.size() > s.size()) return false;
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (lower(s[pos + k]) != w[k]) return false;
    }
    return true;
}

// (?i)\b(first)(second)\b, or (?=\s) at the end when lookahead_space is set.
u32 split_contraction(const u32& s, std::u32string_view first, std::u32string_view second, bool lookahead_space) {
    u32 out;
    const std::size_t len = first.size() + second.size();
    std::size_t i = 0;
    while (i < s.size()) {
        bool hit = ieq_at(s, i, first) && ieq_at(s, i + first.size(), second);
        if (hit) hit = (i == 0 || !is_word(s[i - 1])) && is_word(s[i]);
        if (hit) {
            const std::size_t end = i + len;
            if (lookahead_space) hit = end < s.size() && is_space(s[end]);
            else hit = end == s.size() || !is_word(s[end]);
        }
        if (hit) {
            out += U' ';
            out += s.substr(i, first.size());
            out += U' ';
            out += s.substr(i + first.size(), second.size());
            out += U' ';
            i += len;
        } else {
            out += s[i++];
        }
    }
    return out;
}

std::vector<u32> split_ws(const u32& s) {
    std::vector<u32> out;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_space(s[i])) ++i;
        std::size_t j = i;
        while (j < s.size() && !is_space(s[j])) ++j;
        if (j > i) out.push_back(s.substr(i, j - i));
        i = j;
    }
    return out;
}

// After quote masking the text holds no ' or " characters, so the quote rules
// that need them (and the apostrophe clitic rules) never fire and are omitted.
std::vector<u32> nltk_tokenize(u32 text) {
    text = starting_quotes(text);
    text = pad_literal(text, U"``");

    text = final_period(text, [](char32_t c) {
        return c == U']' || c == U')' || c == U'}' || c == U'>' || c == U'"' || c == U'\'' || c == 0xBB ||
               c == 0x201D || c == 0x2019 || c == U' ';
    }, true);
    text = split_colon_comma(text);
    text = trailing_colon_comma(text);
    text = pad_ellipsis(text);
    text = pad_chars(text, [](char32_t c) {
        return c == U';' || c == U'@' || c == U'#' || c == U'$' || c == U'%' || c == U'&';
    });
    text = pad_chars(text, [](char32_t c) { return c >= 0x2012 && c <= 0x2015; });
    text = final_period(text, [](char32_t c) {
        return c == U']' || c == U')' || c == U'}' || c == U'>' || c == U'"' || c == U'\'';
    }, false);
    text = pad_chars(text, [](char32_t c) { return c == U'?' || c == U'!'; });
    text = pad_chars(text, [](char32_t c) { return c == U'*'; });
    text = pad_chars(text, [](char32_t c) {
        return c == U'[' || c == U']' || c == U'(' || c == U')' || c == U'{' || c == U'}' || c == U'<' ||
               c == U'>';
    });
    text = pad_literal(text, U"--");

    text = U" " + text + U" ";
    text = pad_chars(text, [](char32_t c) { return c == 0xBB || c == 0x201D || c == 0x2019; });
    text = collapse_spaces(text);

    text = split_contraction(text, U"can", U"not", false);
    text = split_contraction(text, U"gim", U"me", false);
    text = split_contraction(text, U"gon", U"na", false);
    text = split_contraction(text, U"got", U"ta", false);
    text = split_contraction(text, U"lem", U"me", false);
    text = split_contraction(text, U"wan", U"na", true);

    return split_ws(text);
}

}  // namespace

std::vector<std::string> word_tokenize(std::string_view text) {
    std::vector<std::string> out;
    for (const auto& t : nltk_tokenize(decode(text))) out.push_back(encode(t));
    return out;
}

std::vector<std::string> tokenize(std::string_view sql) {
    u32 s = decode(sql);
    for (char32_t& c : s) {
        if (c == U'\'') c = U'"';
    }
    std::vector<std::size_t> quotes;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == U'"') quotes.push_back(i);
    }
    if (quotes.size() % 2 != 0) throw ParseError(quotes.back(), "Unexpected quote");

    std::map<u32, u32> vals;
    for (std::size_t i = quotes.size(); i >= 2; i -= 2) {
        const std::size_t q1 = quotes[i - 2];
        const std::size_t q2 = quotes[i - 1];
        const std::string key_ascii = "__val_" + std::to_string(q1) + "_" + std::to_string(q2) + "__";
        const u32 key(key_ascii.begin(), key_ascii.end());
        vals[key] = s.substr(q1, q2 - q1 + 1);
        s = s.substr(0, q1) + key + s.substr(q2 + 1);
    }

    std::vector<u32> toks = nltk_tokenize(s);
    for (auto& t : toks) {
        for (char32_t& c : t) c = lower(c);
        auto it = vals.find(t);
        if (it != vals.end()) t = it->second;
    }

    std::vector<std::size_t> eq;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i] == U"=") eq.push_back(i);
    }
    for (auto it = eq.rbegin(); it != eq.rend(); ++it) {
        const std::size_t idx = *it;
        // Python's toks[idx - 1] wraps to the last token when idx is 0.
        const std::size_t prev = idx == 0 ? toks.size() - 1 : idx - 1;
        const u32 pre = toks[prev];
        if (pre == U"!" || pre == U">" || pre == U"<") {
            std::vector<u32> merged;
            if (idx == 0) {
                merged.assign(toks.begin(), toks.end() - 1);
            } else {
                merged.assign(toks.begin(), toks.begin() + static_cast<std::ptrdiff_t>(idx - 1));
            }
            merged.push_back(pre + U"=");
            merged.insert(merged.end(), toks.begin() + static_cast<std::ptrdiff_t>(idx + 1), toks.end());
            toks = std::move(merged);
        }
    }

    std::vector<std::string> out;
    out.reserve(toks.size());
    for (const auto& t : toks) out.push_back(encode(t));
    return out;
}

}  // namespace starsql::sqleval
