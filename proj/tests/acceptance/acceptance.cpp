// Acceptance suite: runs every release criterion at its stated tolerance and
// prints one PASS/FAIL line each. Exits nonzero if any criterion fails.

#include <fcntl.h>
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "twem/analysis.hpp"
#include "twem/baseline.hpp"
#include "twem/cli.hpp"
#include "twem/corpus.hpp"
#include "twem/embed.hpp"
#include "twem/eval.hpp"
#include "twem/fixture.hpp"
#include "twem/model.hpp"
#include "twem/pipeline.hpp"
#include "twem/text.hpp"

using namespace twem;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL",
              criterion, what.c_str(), detail.c_str());
  if (!pass) ++g_failures;
}

double seconds_since(
    const std::chrono::steady_clock::time_point& start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)),
                     std::istreambuf_iterator<char>());
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "twem_acceptance";
  fs::create_directories(dir);
  return dir;
}

template <typename S>
TwemNet<S> random_net(int v, int d, int h, int c, uint64_t seed) {
  TwemNet<S> net(v, d, h, c);
  Rng rng(seed);
  for (Param<S>* p : net.params()) {
    for (S& x : p->val.v) x = static_cast<S>(rng.uniform(-0.5, 0.5));
  }
  return net;
}

EncodedExample random_example(int v, int max_len, Rng& rng) {
  EncodedExample ex;
  ex.length = 1 + static_cast<int>(rng.below(static_cast<uint64_t>(max_len)));
  ex.ids.assign(static_cast<size_t>(max_len), 0);
  ex.mask.assign(static_cast<size_t>(max_len), 0);
  for (int t = 0; t < ex.length; ++t) {
    ex.ids[static_cast<size_t>(t)] =
        1 + static_cast<int>(rng.below(static_cast<uint64_t>(v - 1)));
    ex.mask[static_cast<size_t>(t)] = 1;
  }
  return ex;
}

// --- criterion 1: full-graph gradient correctness at desk scale -------------

void criterion_gradients() {
  const auto start = std::chrono::steady_clock::now();
  TwemNet<double> net = random_net<double>(20, 8, 10, 3, 1001);
  Rng rng(1002);
  std::vector<EncodedExample> batch;
  std::vector<int> labels;
  for (int i = 0; i < 4; ++i) {
    batch.push_back(random_example(20, 5, rng));
    labels.push_back(static_cast<int>(rng.below(3)));
  }
  const auto loss_only = [&] {
    TwemCache<double> cache = twem_forward(net, batch, true, 0.0, nullptr);
    return static_cast<double>(softmax_xent<double>(cache.logits, labels).loss);
  };
  const auto loss_and_grad = [&] {
    for (Param<double>* p : net.params()) p->zero_grad();
    TwemCache<double> cache = twem_forward(net, batch, true, 0.0, nullptr);
    return static_cast<double>(twem_loss_and_backward(net, cache, labels));
  };
  std::vector<GradCheckParam> params;
  auto ps = net.params();
  const std::vector<std::string> names = {"emb",  "proj_w", "proj_b",
                                          "h1_w", "h1_b",   "h2_w",
                                          "h2_b", "out_w",  "out_b"};
  for (size_t i = 0; i < ps.size(); ++i) {
    params.push_back({names[i], &ps[i]->val, &ps[i]->grad});
  }
  const double err = grad_check(loss_only, loss_and_grad, params, 1e-5);
  const double elapsed = seconds_since(start);
  std::ostringstream detail;
  detail << "V=20 D=8 T<=5 H=10 C=3, 64-bit, all tensors: max rel err "
         << err << ", " << elapsed << " s";
  report(1, err < 1e-4 && elapsed < 10.0, "full-graph gradient correctness",
         detail.str());
}

// --- criterion 2: pooling invariances on 1000 random inputs -----------------

void criterion_invariances() {
  TwemNet<float> net = random_net<float>(64, 12, 10, 3, 1003);
  Rng rng(1004);
  Rng shuffle_rng(1005);
  int violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    EncodedExample ex = random_example(64, 14, rng);

    EncodedExample shuffled = ex;
    std::vector<int> real(shuffled.ids.begin(),
                          shuffled.ids.begin() + shuffled.length);
    shuffle_rng.shuffle(real);
    std::copy(real.begin(), real.end(), shuffled.ids.begin());

    EncodedExample padded = ex;
    padded.ids.resize(ex.ids.size() + 9, 0);
    padded.mask.resize(ex.mask.size() + 9, 0);

    const std::vector<EncodedExample> b1 = {ex};
    const std::vector<EncodedExample> b2 = {shuffled};
    const std::vector<EncodedExample> b3 = {padded};
    const TwemCache<float> c1 = twem_forward(net, b1, false, 0.0, nullptr);
    const TwemCache<float> c2 = twem_forward(net, b2, false, 0.0, nullptr);
    const TwemCache<float> c3 = twem_forward(net, b3, false, 0.0, nullptr);

    int best1 = 0, best2 = 0;
    bool padding_identical = true;
    for (int j = 0; j < 3; ++j) {
      if (c1.probs.at(0, j) > c1.probs.at(0, best1)) best1 = j;
      if (c2.probs.at(0, j) > c2.probs.at(0, best2)) best2 = j;
      padding_identical =
          padding_identical && c1.probs.at(0, j) == c3.probs.at(0, j);
    }
    if (best1 != best2 || !padding_identical) ++violations;
  }
  report(2, violations == 0,
         "token-permutation and padding invariance of predictions",
         std::to_string(violations) + " violations over 1000 random inputs");
}

// --- criterion 3: exact parameter count --------------------------------------

void criterion_param_count() {
  const long count = param_count(300, 50, 3);
  std::ostringstream detail;
  detail << "C=3 dense count " << count
         << "; the commonly cited ~100k approximation understates the exact "
            "123,053 by about 23k";
  report(3, count == 123053, "exact dense parameter count", detail.str());
}

// --- criterion 4: fixture end-to-end quality ---------------------------------

void criterion_fixture_end_to_end() {
  const fs::path dir = scratch() / "fixture_e2e";
  fs::remove_all(dir);
  make_fixture(dir.string(), 2024);
  const Dataset ds = load_csv((dir / "corpus.csv").string(), "text", "label",
                              {"background", "signal"});
  const PretrainedMap pretrained =
      load_pretrained((dir / "embeddings.txt").string(), 16);

  TrainConfig cfg;
  cfg.lr = 0.01f;
  cfg.batch_size = 32;
  cfg.max_len = 20;
  cfg.dropout_rate = 0.1f;
  cfg.epochs = 15;
  cfg.seed = 2024;
  cfg.hidden = 50;

  const auto twem_start = std::chrono::steady_clock::now();
  const CvResult twem_cv =
      cross_validate(make_twem_trainer(pretrained, 16, cfg), ds, 10, 2024);
  const double twem_time = seconds_since(twem_start);

  const auto lr_start = std::chrono::steady_clock::now();
  const CvResult lr_cv = cross_validate(
      make_baseline_trainer(LogRegConfig{}, PreprocessScheme::kTokenize), ds,
      10, 2024);
  const double lr_time = seconds_since(lr_start);

  std::ostringstream detail;
  detail << "10-fold weighted F1: twem " << twem_cv.pooled.weighted_f1 << " in "
         << twem_time << " s, baseline " << lr_cv.pooled.weighted_f1 << " in "
         << lr_time << " s";
  report(4,
         twem_cv.pooled.weighted_f1 >= 0.95 &&
             lr_cv.pooled.weighted_f1 >= 0.90 && twem_time < 60.0 &&
             lr_time < 60.0,
         "separable-fixture cross validation", detail.str());
}

// --- criterion 5: oracle equivalence -----------------------------------------

void criterion_oracles() {
  bool pass = true;
  std::ostringstream detail;

  // TF-IDF against a direct-formula oracle
  {
    const std::vector<std::string> texts = {"the cat sat", "a cat ran",
                                            "dogs bark loud"};
    std::vector<TokenSeq> tokens;
    for (const std::string& t : texts) tokens.push_back(tokenize_basic(t));
    const TfidfIndex index = fit_index(texts, tokens);

    double worst = 0.0;
    for (size_t doc = 0; doc < texts.size(); ++doc) {
      // oracle: recompute features, df, idf and the normalized value directly
      std::map<std::string, int> tf;
      for (const auto& [g, c] : char_ngrams(texts[doc], 1, 4).counts) {
        tf["c:" + g] = c;
      }
      for (const auto& [w, c] : word_unigrams(tokens[doc]).counts) {
        tf["w:" + w] = c;
      }
      std::map<std::string, double> oracle;
      double norm_sq = 0.0;
      for (const auto& [feature, count] : tf) {
        long df = 0;
        for (size_t other = 0; other < texts.size(); ++other) {
          std::map<std::string, int> responding;
          for (const auto& [g, c] : char_ngrams(texts[other], 1, 4).counts) {
            responding["c:" + g] = c;
          }
          for (const auto& [w, c] : word_unigrams(tokens[other]).counts) {
            responding["w:" + w] = c;
          }
          df += responding.count(feature) > 0 ? 1 : 0;
        }
        const double idf = std::log(4.0 / (1.0 + df)) + 1.0;
        oracle[feature] = count * idf;
        norm_sq += oracle[feature] * oracle[feature];
      }
      for (auto& [_, v] : oracle) v /= std::sqrt(norm_sq);

      const SparseVec vec = vectorize(index, texts[doc], tokens[doc]);
      std::map<int, std::string> col_to_feature;
      for (const auto& [f, col] : index.feature_col) col_to_feature[col] = f;
      if (vec.items.size() != oracle.size()) pass = false;
      for (const auto& [col, value] : vec.items) {
        worst = std::max(worst,
                         std::abs(value - oracle.at(col_to_feature.at(col))));
      }
    }
    pass = pass && worst < 1e-12;
    detail << "tfidf max |err| " << worst;
  }

  // weighted F1 against an independent implementation
  {
    Rng rng(1006);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
      const int classes = 2 + static_cast<int>(rng.below(4));
      ConfusionMatrix cm(classes);
      bool any = false;
      for (long& cell : cm.m) {
        cell = static_cast<long>(rng.below(7));
        any = any || cell > 0;
      }
      if (!any) cm.at(0, 0) = 1;
      double weighted = 0.0;
      long total = 0;
      for (int c = 0; c < classes; ++c) {
        long tp = cm.at(c, c), row = 0, col = 0;
        for (int i = 0; i < classes; ++i) {
          row += cm.at(c, i);
          col += cm.at(i, c);
        }
        const double p = col > 0 ? static_cast<double>(tp) / col : 0.0;
        const double r = row > 0 ? static_cast<double>(tp) / row : 0.0;
        weighted += ((p + r) > 0 ? 2 * p * r / (p + r) : 0.0) * row;
        total += row;
      }
      worst = std::max(
          worst, std::abs(metrics(cm).weighted_f1 - weighted / total));
    }
    pass = pass && worst < 1e-12;
    detail << ", weighted-F1 max |err| " << worst;
  }

  // PCA on rank-2 data
  {
    Rng rng(1007);
    std::vector<double> u(10), w(10);
    for (int j = 0; j < 10; ++j) {
      u[static_cast<size_t>(j)] = rng.uniform(-1.0, 1.0);
      w[static_cast<size_t>(j)] = rng.uniform(-1.0, 1.0);
    }
    Mat<double> x(150, 10);
    for (int i = 0; i < 150; ++i) {
      const double a = rng.uniform(-2.0, 2.0);
      const double b = rng.uniform(-1.0, 1.0);
      for (int j = 0; j < 10; ++j) {
        x.at(i, j) =
            a * u[static_cast<size_t>(j)] + b * w[static_cast<size_t>(j)];
      }
    }
    const PcaResult pca = pca_fit(x, 2);
    pass = pass && pca.cumulative_ratio >= 0.999;
    detail << ", rank-2 PCA cumulative " << pca.cumulative_ratio;
  }

  // silhouette on the 3-point hand case
  {
    Mat<double> x(3, 2);
    x.at(0, 0) = 0.0;
    x.at(0, 1) = 0.0;
    x.at(1, 0) = 0.0;
    x.at(1, 1) = 1.0;
    x.at(2, 0) = 4.0;
    x.at(2, 1) = 0.0;
    const double expected =
        (0.75 + (std::sqrt(17.0) - 1.0) / std::sqrt(17.0)) / 3.0;
    const double got = silhouette(x, {0, 0, 1});
    pass = pass && std::abs(got - expected) < 1e-12;
    detail << ", silhouette |err| " << std::abs(got - expected);
  }

  report(5, pass, "independent-oracle equivalence", detail.str());
}

// --- criterion 6: AR test behavior -------------------------------------------

void criterion_ar_test() {
  bool pass = true;

  const std::vector<int> golds = {0, 1, 0, 1, 1, 0, 1, 0};
  const std::vector<int> preds = {0, 1, 1, 1, 0, 0, 1, 1};
  for (const uint64_t seed : {1ull, 42ull, 999ull}) {
    for (const int rounds : {1, 100, 10000}) {
      const SignificanceResult r = ar_test(preds, preds, golds, rounds, seed);
      pass = pass && r.p_value == 1.0;
    }
  }

  std::vector<int> big_golds, perfect, inverted;
  for (int i = 0; i < 40; ++i) {
    big_golds.push_back(i % 2);
    perfect.push_back(i % 2);
    inverted.push_back(1 - i % 2);
  }
  const SignificanceResult extreme =
      ar_test(perfect, inverted, big_golds, 10000, 7);
  pass = pass && extreme.p_value < 0.001;

  std::ostringstream detail;
  detail << "identical systems p=1 across seeds/R; extreme case p="
         << extreme.p_value << " with R=10000";
  report(6, pass, "approximate randomization test", detail.str());
}

// --- criterion 7: byte-level reproducibility of seeded commands --------------

void criterion_determinism() {
  const fs::path base = scratch() / "determinism";
  fs::remove_all(base);
  fs::create_directories(base);
  bool pass = true;
  std::ostringstream detail;

  // The commands narrate to stdout; keep the acceptance log to one line per
  // criterion by muting them.
  const auto run = [](const std::vector<std::string>& args) {
    std::fflush(stdout);
    const int saved = dup(STDOUT_FILENO);
    const int null_fd = open("/dev/null", O_WRONLY);
    dup2(null_fd, STDOUT_FILENO);
    const int code = run_cli(args);
    std::fflush(stdout);
    dup2(saved, STDOUT_FILENO);
    close(null_fd);
    close(saved);
    return code;
  };
  const auto twice_identical = [&](const std::string& name,
                                   const std::function<int(const fs::path&)>&
                                       invoke,
                                   const std::vector<std::string>& outputs) {
    const fs::path d1 = base / (name + "_1");
    const fs::path d2 = base / (name + "_2");
    if (invoke(d1) != 0 || invoke(d2) != 0) {
      pass = false;
      detail << name << " failed to run; ";
      return;
    }
    for (const std::string& file : outputs) {
      const std::string b1 = slurp(d1 / file);
      const std::string b2 = slurp(d2 / file);
      if (b1.empty() || b1 != b2) {
        pass = false;
        detail << name << "/" << file << " differs; ";
      }
    }
  };

  // make-fixture: same seed into the same path must rebuild identical bytes
  {
    const fs::path fx = base / "fixture";
    run({"make-fixture", "--out", fx.string(), "--seed", "31"});
    const std::string corpus = slurp(fx / "corpus.csv");
    const std::string emb = slurp(fx / "embeddings.txt");
    const std::string cfg = slurp(fx / "config.json");
    fs::remove_all(fx);
    run({"make-fixture", "--out", fx.string(), "--seed", "31"});
    if (corpus != slurp(fx / "corpus.csv") ||
        emb != slurp(fx / "embeddings.txt") ||
        cfg != slurp(fx / "config.json")) {
      pass = false;
      detail << "make-fixture differs; ";
    }

    const std::string config = (fx / "config.json").string();
    twice_identical(
        "train",
        [&](const fs::path& out) {
          return run({"train", "--config", config, "--out", out.string()});
        },
        {"model.twem", "history.json"});
    twice_identical(
        "eval_cv",
        [&](const fs::path& out) {
          return run({"eval-cv", "--config", config, "--folds", "5", "--out",
                      out.string()});
        },
        {"cv_metrics.json"});
    twice_identical(
        "significance",
        [&](const fs::path& out) {
          return run({"significance", "--config", config, "--system-a",
                      "baseline", "--system-b", "baseline", "--rounds", "300",
                      "--out", out.string()});
        },
        {"significance.json"});
    twice_identical(
        "analyze",
        [&](const fs::path& out) {
          return run({"analyze", "--model",
                      (base / "train_1" / "model.twem").string(),
                      "--embeddings", (fx / "embeddings.txt").string(),
                      "--out", out.string(), "--top-k", "40", "--pca-dim",
                      "8", "--seed", "31"});
        },
        {"clusters.json", "clusters.md"});
  }

  if (pass) detail << "all seeded commands byte-identical on rerun";
  report(7, pass, "seeded commands reproduce byte-identical outputs",
         detail.str());
}

// --- criterion 8: tokenizer conformance fixture -------------------------------

void criterion_conformance() {
  const std::string tweet =
      "RT @AGuyNamed_Nick Now, I'm not sexist in any way shape or form but I "
      "think women are better at gift wrapping. It's the XX chromosome thing";
  bool pass = true;
  std::ostringstream detail;

  const auto split = [](const std::string& s) {
    TokenSeq out;
    std::istringstream in(s);
    std::string tok;
    while (in >> tok) out.push_back(tok);
    return out;
  };

  const TokenSeq expected_basic = split(
      "RT @AGuyNamed_Nick Now , I 'm not sexist in any way shape or form but "
      "I think women are better at gift wrapping . It 's the XX chromosome "
      "thing");
  if (tokenize_basic(tweet) != expected_basic) {
    pass = false;
    detail << "basic tokenization differs; ";
  }

  const TokenSeq expected_lower = split(
      "rt @aguynamed_nick now , i 'm not sexist in any way shape or form but "
      "i think women are better at gift wrapping . it 's the xx chromosome "
      "thing");
  if (apply_scheme(tweet, PreprocessScheme::kTokenizeLowercase) !=
      expected_lower) {
    pass = false;
    detail << "lowercase scheme differs; ";
  }

  // Published replace variant lowercases exactly two tokens ("now", "xx")
  // despite keeping "I"/"It"; case is preserved here, so those two positions
  // are the only permitted deviations.
  const TokenSeq published_replace = split(
      "ENT USER now , I 'm not sexist in any way shape or form but I think "
      "women are better at gift wrapping . It 's the xx chromosome thing");
  const TokenSeq got_replace =
      apply_scheme(tweet, PreprocessScheme::kTokenReplace);
  if (got_replace.size() != published_replace.size()) {
    pass = false;
    detail << "replace scheme length differs; ";
  } else {
    int unexpected = 0;
    for (size_t i = 0; i < got_replace.size(); ++i) {
      if (got_replace[i] == published_replace[i]) continue;
      const bool allowed =
          (got_replace[i] == "Now" && published_replace[i] == "now") ||
          (got_replace[i] == "XX" && published_replace[i] == "xx");
      if (!allowed) ++unexpected;
    }
    if (unexpected > 0) {
      pass = false;
      detail << unexpected << " undocumented replace deviations; ";
    }
  }

  const TokenSeq expected_replace_lower = split(
      "ENT USER now , i 'm not sexist in any way shape or form but i think "
      "women are better at gift wrapping . it 's the xx chromosome thing");
  if (apply_scheme(tweet, PreprocessScheme::kTokenReplaceLowercase) !=
      expected_replace_lower) {
    pass = false;
    detail << "replace-lowercase scheme differs; ";
  }

  if (pass) {
    detail << "all four scheme outputs match the published tokenization "
              "(case-preserving deviation only at the two documented tokens)";
  }
  report(8, pass, "tokenizer conformance fixture", detail.str());
}

// --- criterion 9: optional paper-scale reproduction ---------------------------

void criterion_paper_scale() {
  std::printf(
      "[SKIP] criterion 9: paper-scale reproduction (optional; requires "
      "user-supplied SR/HATE/HAR CSV exports and the public 300-d Common "
      "Crawl embedding file; run eval-cv with a real config to attempt "
      "it)\n");
}

}  // namespace

int main() {
  criterion_gradients();
  criterion_invariances();
  criterion_param_count();
  criterion_fixture_end_to_end();
  criterion_oracles();
  criterion_ar_test();
  criterion_determinism();
  criterion_conformance();
  criterion_paper_scale();
  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
