#include "twem/fixture.hpp"

#include <array>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "twem/csv.hpp"
#include "twem/errors.hpp"
#include "twem/rng.hpp"
#include "twem/text.hpp"

namespace twem {
namespace {

constexpr std::array<const char*, 8> kSignal = {
    "quasar", "fjord",   "zephyr",  "obsidian",
    "krill",  "saffron", "glacier", "marzipan"};

constexpr std::array<const char*, 40> kBackground = {
    "the",    "a",      "is",     "was",   "on",    "in",    "of",
    "and",    "to",     "it",     "this",  "that",  "day",   "time",
    "home",   "work",   "team",   "game",  "coffee", "train", "road",
    "river",  "cloud",  "music",  "movie", "friend", "lunch", "garden",
    "window", "street", "light",  "night", "paper",  "phone", "table",
    "chair",  "water",  "bread",  "story", "summer"};

std::string format_value(double v) {
  std::ostringstream out;
  out.precision(6);
  out << v;
  return out.str();
}

}  // namespace

void make_fixture(const std::string& out_dir, uint64_t seed) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  Rng rng(derive_seed(seed, "fixture"));

  const std::vector<std::string> labels = {"background", "signal"};
  std::vector<std::string> texts;
  std::vector<int> golds;
  for (int i = 0; i < 200; ++i) {
    const int label = i % 2;
    const int n_background = 5 + static_cast<int>(rng.below(5));  // 5..9
    std::vector<std::string> tokens;
    for (int t = 0; t < n_background; ++t) {
      tokens.push_back(kBackground[rng.below(kBackground.size())]);
    }
    if (label == 1) {
      // 2..4 distinct signal tokens, so no example hinges on a single type
      const int n_signal = 2 + static_cast<int>(rng.below(3));
      std::vector<size_t> picks(kSignal.size());
      for (size_t s = 0; s < picks.size(); ++s) picks[s] = s;
      rng.shuffle(picks);
      for (int s = 0; s < n_signal; ++s) {
        const size_t pos = rng.below(tokens.size() + 1);
        tokens.insert(tokens.begin() + static_cast<long>(pos),
                      kSignal[picks[static_cast<size_t>(s)]]);
      }
    }
    std::string text;
    for (size_t t = 0; t < tokens.size(); ++t) {
      if (t > 0) text += ' ';
      text += tokens[t];
    }
    texts.push_back(std::move(text));
    golds.push_back(label);
  }

  // Separability self-check: predict "signal" iff any signal token occurs.
  const std::set<std::string> signal_set(kSignal.begin(), kSignal.end());
  for (size_t i = 0; i < texts.size(); ++i) {
    int rule = 0;
    for (const std::string& tok : tokenize_basic(texts[i])) {
      if (signal_set.count(tok) > 0) rule = 1;
    }
    if (rule != golds[i]) {
      throw NumericError("fixture self-check failed at example " +
                         std::to_string(i));
    }
  }

  const fs::path dir(out_dir);
  {
    std::ofstream csv(dir / "corpus.csv", std::ios::binary);
    if (!csv) throw DataError("cannot write fixture corpus under " + out_dir);
    csv << "text,label\n";
    for (size_t i = 0; i < texts.size(); ++i) {
      write_csv_row(csv, {texts[i], labels[static_cast<size_t>(golds[i])]});
    }
  }

  // Small embedding file covering the whole lexicon. Signal tokens share a
  // common direction plus noise, the way related words cluster in real
  // pretrained spaces.
  constexpr int kDim = 16;
  {
    std::ofstream emb(dir / "embeddings.txt", std::ios::binary);
    if (!emb) throw DataError("cannot write fixture embeddings under " + out_dir);
    const auto write_row = [&](const std::string& tok, double offset0) {
      emb << tok;
      for (int j = 0; j < kDim; ++j) {
        const double base = rng.uniform(-0.5, 0.5);
        emb << ' ' << format_value(j == 0 ? base + offset0 : base);
      }
      emb << '\n';
    };
    for (const char* tok : kBackground) write_row(tok, 0.0);
    for (const char* tok : kSignal) write_row(tok, 0.8);
  }

  {
    std::ofstream cfg(dir / "config.json", std::ios::binary);
    if (!cfg) throw DataError("cannot write fixture config under " + out_dir);
    const std::string data = (dir / "corpus.csv").string();
    const std::string emb = (dir / "embeddings.txt").string();
    cfg << "{\n"
        << "  \"data\": \"" << data << "\",\n"
        << "  \"text_column\": \"text\",\n"
        << "  \"label_column\": \"label\",\n"
        << "  \"labels\": [\"background\", \"signal\"],\n"
        << "  \"scheme\": \"tokenize\",\n"
        << "  \"embeddings\": \"" << emb << "\",\n"
        << "  \"dim\": " << kDim << ",\n"
        << "  \"lr\": 0.01,\n"
        << "  \"batch_size\": 32,\n"
        << "  \"max_len\": 20,\n"
        << "  \"dropout\": 0.1,\n"
        << "  \"epochs\": 15,\n"
        << "  \"hidden\": 50,\n"
        << "  \"val_fraction\": 0.1,\n"
        << "  \"seed\": " << seed << "\n"
        << "}\n";
  }
}

}  // namespace twem
