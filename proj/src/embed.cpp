#include "twem/embed.hpp"

#include <charconv>
#include <fstream>

#include "twem/errors.hpp"

namespace twem {
namespace {

// Parses "token v1 v2 ... vD". Returns false for blank lines.
bool parse_embedding_line(const std::string& line, long line_no, int dim,
                          std::string& token, std::vector<float>& vec) {
  size_t i = 0;
  while (i < line.size() && line[i] == ' ') ++i;
  if (i == line.size()) return false;
  size_t j = line.find(' ', i);
  if (j == std::string::npos) {
    throw DataError("embedding line " + std::to_string(line_no) +
                    ": no vector components");
  }
  token.assign(line, i, j - i);
  vec.clear();
  vec.reserve(static_cast<size_t>(dim));
  const char* p = line.data() + j;
  const char* end = line.data() + line.size();
  while (p < end) {
    while (p < end && (*p == ' ' || *p == '\r')) ++p;
    if (p == end) break;
    float value = 0.0f;
    const auto [next, ec] = std::from_chars(p, end, value);
    if (ec != std::errc()) {
      throw DataError("embedding line " + std::to_string(line_no) +
                      ": non-numeric component");
    }
    vec.push_back(value);
    p = next;
  }
  if (static_cast<int>(vec.size()) != dim) {
    throw DataError("embedding line " + std::to_string(line_no) + ": " +
                    std::to_string(vec.size()) + " components, expected " +
                    std::to_string(dim));
  }
  return true;
}

}  // namespace

PretrainedMap load_pretrained(const std::string& path, int dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file: " + path);
  PretrainedMap map;
  std::string line, token;
  std::vector<float> vec;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (parse_embedding_line(line, line_no, dim, token, vec)) {
      map[token] = vec;  // duplicates: last wins
    }
  }
  return map;
}

PretrainedMap load_pretrained_filtered(
    const std::string& path, int dim,
    const std::unordered_set<std::string>& wanted) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open embedding file: " + path);
  PretrainedMap map;
  std::string line, token;
  std::vector<float> vec;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (parse_embedding_line(line, line_no, dim, token, vec) &&
        wanted.count(token) > 0) {
      map[token] = vec;
    }
  }
  return map;
}

std::pair<Vocabulary, EmbeddingTable> build_vocab(
    const std::vector<TokenSeq>& corpus, const PretrainedMap& pretrained,
    uint64_t seed, int dim, bool allow_unk) {
  Vocabulary vocab;
  vocab.tokens.push_back(Vocabulary::kPadLiteral);
  if (allow_unk) {
    vocab.unk_index = 1;
    vocab.tokens.push_back(Vocabulary::kUnkLiteral);
  }
  for (const TokenSeq& seq : corpus) {
    for (const std::string& tok : seq) {
      if (vocab.index.emplace(tok, vocab.size()).second) {
        vocab.tokens.push_back(tok);
      }
    }
  }

  EmbeddingTable table;
  table.dim = dim;
  table.rows = Mat<float>(vocab.size(), dim);
  Rng rng(derive_seed(seed, "oov_init"));
  for (int i = 1; i < vocab.size(); ++i) {
    const std::string& tok = vocab.tokens[static_cast<size_t>(i)];
    const auto it =
        (allow_unk && i == vocab.unk_index) ? pretrained.end() : pretrained.find(tok);
    float* row = table.rows.row(i);
    if (it != pretrained.end()) {
      for (int j = 0; j < dim; ++j) row[j] = it->second[static_cast<size_t>(j)];
    } else {
      if (!(allow_unk && i == vocab.unk_index)) vocab.oov.insert(tok);
      for (int j = 0; j < dim; ++j) {
        row[j] = static_cast<float>(rng.uniform(-0.05, 0.05));
      }
    }
  }
  return {std::move(vocab), std::move(table)};
}

EncodedExample encode(const TokenSeq& tokens, const Vocabulary& vocab,
                      int max_len) {
  if (max_len < 1) throw UsageError("encode: max_len must be >= 1");
  if (tokens.empty()) {
    throw DataError("encode: empty token sequence");
  }
  EncodedExample out;
  out.ids.assign(static_cast<size_t>(max_len), Vocabulary::kPad);
  out.mask.assign(static_cast<size_t>(max_len), 0);
  const int take = std::min<int>(max_len, static_cast<int>(tokens.size()));
  for (int t = 0; t < take; ++t) {
    const int idx = vocab.lookup(tokens[static_cast<size_t>(t)]);
    if (idx < 0) {
      throw DataError("encode: token '" + tokens[static_cast<size_t>(t)] +
                      "' not in vocabulary");
    }
    out.ids[static_cast<size_t>(t)] = idx;
    out.mask[static_cast<size_t>(t)] = 1;
  }
  out.length = take;
  return out;
}

}  // namespace twem
