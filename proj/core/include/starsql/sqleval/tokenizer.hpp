#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace starsql::sqleval {

// Token stream of the reference evaluation script: single quotes become double
// quotes, quoted literals survive as single tokens with their original case,
// everything else is split by the NLTK word tokenizer rules and lowercased,
// and "! =", "> =", "< =" are re-joined. Throws ParseError on unbalanced quotes.
std::vector<std::string> tokenize(std::string_view sql);

// The word tokenizer alone (no quote masking, no lowercasing).
std::vector<std::string> word_tokenize(std::string_view text);

}  // namespace starsql::sqleval
