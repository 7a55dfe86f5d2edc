#include "twem/text.hpp"

#include <algorithm>
#include <array>
#include <cstdint>

#include "twem/errors.hpp"

namespace twem {
namespace {

constexpr std::string_view kDetachable = ".,!?:;\"()";

bool is_detachable(char c) { return kDetachable.find(c) != std::string_view::npos; }

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

bool ieq_prefix(std::string_view s, std::string_view prefix) {
  if (s.size() < prefix.size()) return false;
  for (size_t i = 0; i < prefix.size(); ++i) {
    char a = s[i];
    if (a >= 'A' && a <= 'Z') a = static_cast<char>(a + 32);
    if (a != prefix[i]) return false;
  }
  return true;
}

bool is_url(std::string_view t) {
  return ieq_prefix(t, "http://") || ieq_prefix(t, "https://") ||
         ieq_prefix(t, "www.");
}

bool is_eye(char c) {
  return c == ':' || c == ';' || c == '=' || c == '8' || c == 'x' || c == 'X';
}

bool is_nose(char c) { return c == '-' || c == 'o' || c == '\'' || c == '^'; }

bool is_mouth(char c) {
  constexpr std::string_view mouths = "()[]{}dDpPbBcCoOsS/\\|*3$@";
  return mouths.find(c) != std::string_view::npos;
}

// Western-style emoticons, both orientations, plus a handful of fixed forms.
// Detection only matters for tokens that would otherwise lose punctuation
// characters, e.g. ":)" or "D:".
bool is_emoticon(std::string_view t) {
  if (t.size() < 2) return false;
  constexpr std::array<std::string_view, 10> fixed = {
      "<3", "</3", "\\o/", "^_^", "-_-", "o_O", "O_o", "^^", ":*", ";*"};
  if (std::find(fixed.begin(), fixed.end(), t) != fixed.end()) return true;

  // eyes [nose] mouth+   e.g. :-) ;D 8) x( :'(
  size_t i = 0;
  if (t[i] == '>') ++i;
  if (i < t.size() && is_eye(t[i])) {
    size_t j = i + 1;
    if (j + 1 < t.size() && is_nose(t[j])) ++j;
    if (j < t.size() &&
        std::all_of(t.begin() + static_cast<long>(j), t.end(), is_mouth)) {
      return true;
    }
  }
  // mouth+ [nose] eyes   e.g. (: D: )-:
  size_t k = t.size();
  if (t[k - 1] == '<') --k;
  if (k >= 1 && is_eye(t[k - 1])) {
    size_t j = k - 1;
    if (j >= 2 && is_nose(t[j - 1])) --j;
    if (j >= 1 && std::all_of(t.begin(), t.begin() + static_cast<long>(j),
                              is_mouth)) {
      return true;
    }
  }
  return false;
}

bool contraction_suffix(std::string_view s) {
  static constexpr std::array<std::string_view, 6> suffixes = {"s",  "m", "d",
                                                               "ll", "ve", "re"};
  std::string lower(s);
  for (char& c : lower) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
  }
  return std::find(suffixes.begin(), suffixes.end(), lower) != suffixes.end();
}

void emit(std::string_view tok, TokenSeq& out) {
  if (tok.empty()) return;
  if (is_url(tok) || is_emoticon(tok)) {
    out.emplace_back(tok);
    return;
  }
  if (is_detachable(tok.front())) {
    out.emplace_back(1, tok.front());
    emit(tok.substr(1), out);
    return;
  }
  if (is_detachable(tok.back())) {
    emit(tok.substr(0, tok.size() - 1), out);
    out.emplace_back(1, tok.back());
    return;
  }
  // Mentions and hashtags stay whole.
  if ((tok.front() == '@' || tok.front() == '#') && tok.size() > 1) {
    out.emplace_back(tok);
    return;
  }
  // n't: "don't" -> "do n't"
  if (tok.size() > 3) {
    const char n = tok[tok.size() - 3];
    const char t = tok[tok.size() - 1];
    if ((n == 'n' || n == 'N') && tok[tok.size() - 2] == '\'' &&
        (t == 't' || t == 'T')) {
      emit(tok.substr(0, tok.size() - 3), out);
      out.emplace_back(tok.substr(tok.size() - 3));
      return;
    }
  }
  // 's 'm 'd 'll 've 're: "It's" -> "It 's"
  const size_t apos = tok.rfind('\'');
  if (apos != std::string_view::npos && apos > 0 && apos + 1 < tok.size() &&
      contraction_suffix(tok.substr(apos + 1))) {
    emit(tok.substr(0, apos), out);
    out.emplace_back(tok.substr(apos));
    return;
  }
  out.emplace_back(tok);
}

// --- minimal UTF-8 machinery -------------------------------------------

// Decodes one code point starting at s[i]; advances i. Invalid bytes are
// returned as themselves so they round-trip unchanged.
uint32_t decode_utf8(std::string_view s, size_t& i, bool& valid) {
  const auto byte = [&](size_t k) { return static_cast<uint8_t>(s[k]); };
  const uint8_t b0 = byte(i);
  valid = true;
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  auto cont = [&](size_t k) {
    return k < s.size() && (byte(k) & 0xC0) == 0x80;
  };
  if ((b0 & 0xE0) == 0xC0 && cont(i + 1)) {
    const uint32_t cp = (uint32_t(b0 & 0x1F) << 6) | (byte(i + 1) & 0x3F);
    i += 2;
    return cp;
  }
  if ((b0 & 0xF0) == 0xE0 && cont(i + 1) && cont(i + 2)) {
    const uint32_t cp = (uint32_t(b0 & 0x0F) << 12) |
                        (uint32_t(byte(i + 1) & 0x3F) << 6) |
                        (byte(i + 2) & 0x3F);
    i += 3;
    return cp;
  }
  if ((b0 & 0xF8) == 0xF0 && cont(i + 1) && cont(i + 2) && cont(i + 3)) {
    const uint32_t cp = (uint32_t(b0 & 0x07) << 18) |
                        (uint32_t(byte(i + 1) & 0x3F) << 12) |
                        (uint32_t(byte(i + 2) & 0x3F) << 6) |
                        (byte(i + 3) & 0x3F);
    i += 4;
    return cp;
  }
  valid = false;
  ++i;
  return b0;
}

void encode_utf8(uint32_t cp, std::string& out) {
  if (cp < 0x80) {
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

uint32_t lower_codepoint(uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;  // Latin-1
  // Latin Extended-A: alternating upper/lower pairs.
  if ((cp >= 0x100 && cp <= 0x137) || (cp >= 0x14A && cp <= 0x177)) {
    return (cp % 2 == 0) ? cp + 1 : cp;
  }
  if (cp >= 0x139 && cp <= 0x148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp == 0x178) return 0xFF;
  if (cp == 0x179 || cp == 0x17B || cp == 0x17D) return cp + 1;
  // Greek
  if ((cp >= 0x391 && cp <= 0x3A1) || (cp >= 0x3A3 && cp <= 0x3AB)) {
    return cp + 32;
  }
  switch (cp) {
    case 0x386: return 0x3AC;
    case 0x388: return 0x3AD;
    case 0x389: return 0x3AE;
    case 0x38A: return 0x3AF;
    case 0x38C: return 0x3CC;
    case 0x38E: return 0x3CD;
    case 0x38F: return 0x3CE;
    default: break;
  }
  // Cyrillic
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  return cp;
}

std::vector<size_t> codepoint_starts(std::string_view s) {
  std::vector<size_t> starts;
  size_t i = 0;
  while (i < s.size()) {
    starts.push_back(i);
    bool valid = false;
    decode_utf8(s, i, valid);
  }
  starts.push_back(s.size());
  return starts;
}

}  // namespace

PreprocessScheme scheme_from_name(std::string_view name) {
  if (name == "tokenize") return PreprocessScheme::kTokenize;
  if (name == "tokenize-lower") return PreprocessScheme::kTokenizeLowercase;
  if (name == "replace") return PreprocessScheme::kTokenReplace;
  if (name == "replace-lower") return PreprocessScheme::kTokenReplaceLowercase;
  throw UsageError("unknown preprocessing scheme '" + std::string(name) +
                   "' (expected tokenize|tokenize-lower|replace|replace-lower)");
}

std::string_view scheme_name(PreprocessScheme scheme) {
  switch (scheme) {
    case PreprocessScheme::kTokenize: return "tokenize";
    case PreprocessScheme::kTokenizeLowercase: return "tokenize-lower";
    case PreprocessScheme::kTokenReplace: return "replace";
    case PreprocessScheme::kTokenReplaceLowercase: return "replace-lower";
  }
  throw UsageError("invalid preprocessing scheme value");
}

TokenSeq tokenize_basic(std::string_view text) {
  TokenSeq out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    size_t j = i;
    while (j < text.size() && !is_space(text[j])) ++j;
    if (j > i) emit(text.substr(i, j - i), out);
    i = j;
  }
  return out;
}

std::string utf8_lower(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  size_t i = 0;
  while (i < s.size()) {
    bool valid = false;
    const size_t at = i;
    const uint32_t cp = decode_utf8(s, i, valid);
    if (!valid) {
      out.push_back(s[at]);
    } else {
      encode_utf8(lower_codepoint(cp), out);
    }
  }
  return out;
}

TokenSeq apply_scheme(std::string_view text, PreprocessScheme scheme) {
  TokenSeq tokens = tokenize_basic(text);
  const bool replace = scheme == PreprocessScheme::kTokenReplace ||
                       scheme == PreprocessScheme::kTokenReplaceLowercase;
  if (replace) {
    for (size_t i = 0; i < tokens.size(); ++i) {
      std::string& t = tokens[i];
      if (t.size() > 1 && t.front() == '@') {
        t = "USER";
      } else if (is_url(t) || (i == 0 && t == "RT")) {
        t = "ENT";
      }
    }
  }
  if (scheme == PreprocessScheme::kTokenizeLowercase) {
    for (std::string& t : tokens) t = utf8_lower(t);
  } else if (scheme == PreprocessScheme::kTokenReplaceLowercase) {
    for (std::string& t : tokens) {
      if (t != "USER" && t != "ENT") t = utf8_lower(t);
    }
  }
  return tokens;
}

NGramBag char_ngrams(std::string_view text, int n_min, int n_max) {
  if (n_min < 1 || n_min > n_max) {
    throw UsageError("char_ngrams: need 1 <= n_min <= n_max, got [" +
                     std::to_string(n_min) + "," + std::to_string(n_max) + "]");
  }
  // Collapse whitespace runs to single spaces and trim the ends.
  std::string norm;
  norm.reserve(text.size());
  for (const char c : text) {
    if (is_space(c)) {
      if (!norm.empty() && norm.back() != ' ') norm.push_back(' ');
    } else {
      norm.push_back(c);
    }
  }
  if (!norm.empty() && norm.back() == ' ') norm.pop_back();

  NGramBag bag;
  const std::vector<size_t> starts = codepoint_starts(norm);
  const int n_cp = static_cast<int>(starts.size()) - 1;
  for (int m = n_min; m <= n_max; ++m) {
    for (int s = 0; s + m <= n_cp; ++s) {
      const size_t lo = starts[static_cast<size_t>(s)];
      const size_t hi = starts[static_cast<size_t>(s + m)];
      ++bag.counts[norm.substr(lo, hi - lo)];
    }
  }
  return bag;
}

NGramBag word_unigrams(const TokenSeq& tokens) {
  NGramBag bag;
  for (const std::string& t : tokens) ++bag.counts[t];
  return bag;
}

}  // namespace twem
