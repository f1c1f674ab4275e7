#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace starsql::modelio {

struct Extraction {
    std::string rationale;
    std::optional<std::string> sql;  // empty means extraction failed

    bool failed() const { return !sql.has_value(); }
};

// The last fenced code block, else the text after the last "SQL:" marker, cut
// to its first statement and trimmed. Never throws; never yields empty SQL.
Extraction extract_completion(std::string_view text);

std::optional<std::string> extract_sql(std::string_view text);

}  // namespace starsql::modelio
