#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace twem {

using TokenSeq = std::vector<std::string>;

// The four preprocessing schemes. Tokenize keeps case and words intact with
// limited sanitizing; the Replace variants swap user mentions for USER and
// entity tokens (URLs, a tweet-initial RT marker) for ENT.
enum class PreprocessScheme {
  kTokenize,
  kTokenizeLowercase,
  kTokenReplace,
  kTokenReplaceLowercase,
};

PreprocessScheme scheme_from_name(std::string_view name);
std::string_view scheme_name(PreprocessScheme scheme);

// Rule-based tweet tokenizer: split on whitespace; detach leading/trailing
// punctuation .,!?:;"() as separate tokens; split English contractions at
// the apostrophe (I 'm, It 's, do n't); keep @mentions, #hashtags, URLs and
// emoticons whole; preserve case. Total and deterministic.
TokenSeq tokenize_basic(std::string_view text);

TokenSeq apply_scheme(std::string_view text, PreprocessScheme scheme);

// Simple case mapping over UTF-8 input (ASCII, Latin-1, Latin Extended-A,
// Greek, Cyrillic; other code points pass through).
std::string utf8_lower(std::string_view s);

struct NGramBag {
  std::map<std::string, int> counts;

  int total() const {
    int n = 0;
    for (const auto& [_, c] : counts) n += c;
    return n;
  }
};

// Counts of contiguous code-point substrings of lengths n_min..n_max over
// the raw text with whitespace runs collapsed to single spaces and ends
// trimmed.
NGramBag char_ngrams(std::string_view text, int n_min, int n_max);

NGramBag word_unigrams(const TokenSeq& tokens);

}  // namespace twem
