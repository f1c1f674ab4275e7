#include "starsql/modelio/extract.hpp"

#include <cctype>
#include <vector>

#include "starsql/util/text.hpp"

namespace starsql::modelio {

namespace {

// Keeps text up to the first ';' outside quotes and comments.
std::string first_statement(std::string_view s) {
    char quote = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        char c = s[i];
        if (quote) {
            if (c == quote) quote = 0;
        } else if (c == '\'' || c == '"' || c == '`') {
            quote = c;
        } else if (c == '-' && i + 1 < s.size() && s[i + 1] == '-') {
            while (i < s.size() && s[i] != '\n') ++i;
        } else if (c == ';') {
            return std::string(s.substr(0, i));
        }
    }
    return std::string(s);
}

std::optional<std::string> clean(std::string_view body) {
    std::string sql = util::trim(first_statement(body));
    if (sql.empty()) return std::nullopt;
    return sql;
}

bool is_info_string(std::string_view s) {
    if (s.empty()) return true;
    if (util::iequals(s, "select") || util::iequals(s, "with")) return false;
    for (char c : s) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '-' && c != '_') return false;
    }
    return true;
}

std::string strip_trailing_marker(std::string s) {
    s = util::trim(s);
    if (s.size() >= 4 && s.compare(s.size() - 4, 4, "SQL:") == 0) s = util::trim(s.substr(0, s.size() - 4));
    return s;
}

}  // namespace

Extraction extract_completion(std::string_view text) {
    Extraction out;
    std::vector<std::size_t> fences;
    for (std::size_t pos = text.find("```"); pos != std::string_view::npos; pos = text.find("```", pos + 3)) {
        fences.push_back(pos);
    }
    if (!fences.empty()) {
        // Fences pair up in order; an unpaired final fence opens a block that
        // runs to the end of the text.
        std::size_t open_i = (fences.size() % 2 == 0) ? fences.size() - 2 : fences.size() - 1;
        std::size_t open = fences[open_i];
        std::size_t close = open_i + 1 < fences.size() ? fences[open_i + 1] : text.size();
        std::size_t body = open + 3;
        std::size_t eol = text.find('\n', body);
        if (eol != std::string_view::npos && eol < close) {
            std::string_view info = text.substr(body, eol - body);
            if (is_info_string(util::trim(info))) body = eol + 1;
        }
        out.rationale = strip_trailing_marker(std::string(text.substr(0, open)));
        out.sql = clean(text.substr(body, close - body));
        return out;
    }
    std::size_t marker = text.rfind("SQL:");
    if (marker == std::string_view::npos) {
        out.rationale = util::trim(text);
        return out;
    }
    out.rationale = util::trim(text.substr(0, marker));
    out.sql = clean(text.substr(marker + 4));
    return out;
}

std::optional<std::string> extract_sql(std::string_view text) { return extract_completion(text).sql; }

}  // namespace starsql::modelio
