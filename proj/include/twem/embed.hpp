#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "twem/nn.hpp"
#include "twem/text.hpp"

namespace twem {

// Index 0 is reserved for PAD (never produced by tokenization). When the CV
// harness enables unknown-token mapping, index 1 is the shared UNK row.
struct Vocabulary {
  static constexpr int kPad = 0;
  static constexpr const char* kPadLiteral = "<PAD>";
  static constexpr const char* kUnkLiteral = "<UNK>";

  std::vector<std::string> tokens;              // index -> literal
  std::unordered_map<std::string, int> index;   // token -> index (no PAD)
  std::unordered_set<std::string> oov;          // absent from the pretrained file
  int unk_index = -1;                           // -1 when UNK is disabled

  int size() const { return static_cast<int>(tokens.size()); }
  bool has_unk() const { return unk_index >= 0; }

  int lookup(const std::string& token) const {
    const auto it = index.find(token);
    if (it != index.end()) return it->second;
    return unk_index;  // -1 signals unknown without UNK
  }
};

struct EmbeddingTable {
  int dim = 0;
  Mat<float> rows;  // V x dim; PAD row all-zero at initialization
};

struct EncodedExample {
  std::vector<int> ids;        // length max_len
  std::vector<uint8_t> mask;   // 1 for real token, 0 for pad; monotone
  int length = 0;              // number of real tokens
};

using PretrainedMap = std::unordered_map<std::string, std::vector<float>>;

// Reads the public text embedding layout: token, space, `dim` space-separated
// decimal reals per line. Duplicate tokens: last wins.
PretrainedMap load_pretrained(const std::string& path, int dim);

// Streaming variant that keeps only `wanted` tokens resident, for large files.
PretrainedMap load_pretrained_filtered(
    const std::string& path, int dim,
    const std::unordered_set<std::string>& wanted);

// Vocabulary over all corpus token types (first-seen order). Rows are copied
// from the pretrained mapping where present; out-of-vocabulary rows are
// initialized uniform(-0.05, 0.05) from the seed. PAD row stays zero.
std::pair<Vocabulary, EmbeddingTable> build_vocab(
    const std::vector<TokenSeq>& corpus, const PretrainedMap& pretrained,
    uint64_t seed, int dim, bool allow_unk = false);

// Fixed-length encoding: sequences longer than max_len keep the first max_len
// tokens; shorter ones are padded at the end.
EncodedExample encode(const TokenSeq& tokens, const Vocabulary& vocab,
                      int max_len);

}  // namespace twem
