#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "twem/corpus.hpp"
#include "twem/embed.hpp"
#include "twem/errors.hpp"
#include "twem/fixture.hpp"
#include "twem/model.hpp"
#include "twem/pipeline.hpp"

using namespace twem;
namespace fs = std::filesystem;

namespace {

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

// Simple keyword-separable in-memory training set.
void separable_set(int n, std::vector<EncodedExample>& xs,
                   std::vector<int>& ys, Vocabulary& vocab,
                   EmbeddingTable& table, uint64_t seed) {
  std::vector<TokenSeq> corpus;
  std::vector<int> labels;
  Rng rng(seed);
  const std::vector<std::string> background = {"a", "b", "c", "d", "e", "f"};
  for (int i = 0; i < n; ++i) {
    TokenSeq seq;
    const int len = 3 + static_cast<int>(rng.below(4));
    for (int t = 0; t < len; ++t) {
      seq.push_back(background[rng.below(background.size())]);
    }
    if (i % 2 == 1) {
      seq.insert(seq.begin() + static_cast<long>(rng.below(seq.size() + 1)),
                 "signalword");
    }
    corpus.push_back(seq);
    labels.push_back(i % 2);
  }
  auto built = build_vocab(corpus, {}, seed, 8);
  vocab = built.first;
  table = built.second;
  xs.clear();
  for (const TokenSeq& seq : corpus) xs.push_back(encode(seq, vocab, 12));
  ys = labels;
}

}  // namespace

TEST_SUITE_BEGIN("model");

TEST_CASE("dense parameter counts match the closed form") {
  CHECK(param_count(300, 50, 3) == 123053);
  CHECK(param_count(300, 50, 2) == 123002);
  // desk model: (64+8) + (160+10) + (100+10) + (30+3)
  CHECK(param_count(8, 10, 3) == 385);
}

TEST_CASE("forward produces probability rows") {
  TwemNet<float> net = random_net<float>(20, 8, 10, 3, 31);
  Rng rng(32);
  std::vector<EncodedExample> batch;
  for (int i = 0; i < 6; ++i) batch.push_back(random_example(20, 5, rng));
  const TwemCache<float> cache = twem_forward(net, batch, false, 0.0, nullptr);
  REQUIRE(cache.probs.rows == 6);
  for (int i = 0; i < 6; ++i) {
    double sum = 0.0;
    for (int j = 0; j < 3; ++j) {
      CHECK(cache.probs.at(i, j) > 0.0f);
      sum += cache.probs.at(i, j);
    }
    CHECK(std::abs(sum - 1.0) < 1e-6);
  }
}

TEST_CASE("duplicate examples in a batch get identical rows") {
  TwemNet<float> net = random_net<float>(20, 8, 10, 3, 33);
  Rng rng(34);
  const EncodedExample ex = random_example(20, 5, rng);
  const std::vector<EncodedExample> batch = {ex, ex};
  const TwemCache<float> cache = twem_forward(net, batch, false, 0.0, nullptr);
  for (int j = 0; j < 3; ++j) {
    CHECK(cache.probs.at(0, j) == cache.probs.at(1, j));
  }
}

TEST_CASE("single-token inputs make max and mean pooling coincide") {
  TwemNet<float> net = random_net<float>(20, 8, 10, 3, 35);
  EncodedExample ex;
  ex.ids = {7, 0, 0};
  ex.mask = {1, 0, 0};
  ex.length = 1;
  const std::vector<EncodedExample> batch = {ex};
  const TwemCache<float> cache = twem_forward(net, batch, false, 0.0, nullptr);
  for (int j = 0; j < 8; ++j) {
    CHECK(cache.doc.at(0, j) == cache.doc.at(0, 8 + j));  // mean == max
  }
}

TEST_CASE("token order never changes predictions") {
  TwemNet<float> net = random_net<float>(40, 8, 10, 3, 36);
  Rng rng(37);
  Rng shuffle_rng(38);
  for (int trial = 0; trial < 200; ++trial) {
    EncodedExample ex = random_example(40, 12, rng);
    EncodedExample shuffled = ex;
    std::vector<int> real(shuffled.ids.begin(),
                          shuffled.ids.begin() + shuffled.length);
    shuffle_rng.shuffle(real);
    std::copy(real.begin(), real.end(), shuffled.ids.begin());
    const std::vector<EncodedExample> batch = {ex, shuffled};
    const TwemCache<float> cache =
        twem_forward(net, batch, false, 0.0, nullptr);
    int best0 = 0, best1 = 0;
    for (int j = 1; j < 3; ++j) {
      if (cache.probs.at(0, j) > cache.probs.at(0, best0)) best0 = j;
      if (cache.probs.at(1, j) > cache.probs.at(1, best1)) best1 = j;
    }
    CHECK(best0 == best1);
  }
}

TEST_CASE("extra padding never changes the forward output") {
  TwemNet<float> net = random_net<float>(40, 8, 10, 3, 39);
  Rng rng(40);
  for (int trial = 0; trial < 100; ++trial) {
    EncodedExample ex = random_example(40, 6, rng);
    EncodedExample padded = ex;
    padded.ids.resize(ex.ids.size() + 7, 0);
    padded.mask.resize(ex.mask.size() + 7, 0);
    const std::vector<EncodedExample> b1 = {ex};
    const std::vector<EncodedExample> b2 = {padded};
    const TwemCache<float> c1 = twem_forward(net, b1, false, 0.0, nullptr);
    const TwemCache<float> c2 = twem_forward(net, b2, false, 0.0, nullptr);
    for (int j = 0; j < 3; ++j) {
      CHECK(c1.probs.at(0, j) == c2.probs.at(0, j));  // bitwise
    }
  }
}

TEST_CASE("desk-scale gradient check across every parameter tensor") {
  TwemNet<double> net = random_net<double>(20, 8, 10, 3, 41);
  Rng rng(42);
  std::vector<EncodedExample> batch;
  std::vector<int> labels;
  for (int i = 0; i < 4; ++i) {
    batch.push_back(random_example(20, 5, rng));
    labels.push_back(static_cast<int>(rng.below(3)));
  }

  const auto loss_only = [&] {
    TwemCache<double> cache = twem_forward(net, batch, true, 0.0, nullptr);
    return static_cast<double>(
        softmax_xent<double>(cache.logits, labels).loss);
  };
  const auto loss_and_grad = [&] {
    for (Param<double>* p : net.params()) p->zero_grad();
    TwemCache<double> cache = twem_forward(net, batch, true, 0.0, nullptr);
    return static_cast<double>(twem_loss_and_backward(net, cache, labels));
  };

  std::vector<GradCheckParam> params;
  const std::vector<std::string> names = {"emb",  "proj_w", "proj_b",
                                          "h1_w", "h1_b",   "h2_w",
                                          "h2_b", "out_w",  "out_b"};
  auto ps = net.params();
  for (size_t i = 0; i < ps.size(); ++i) {
    params.push_back({names[i], &ps[i]->val, &ps[i]->grad});
  }
  const double err = grad_check(loss_only, loss_and_grad, params, 1e-5);
  CHECK(err < 1e-4);
}

TEST_CASE("training on a separable set reaches high accuracy") {
  std::vector<EncodedExample> xs;
  std::vector<int> ys;
  Vocabulary vocab;
  EmbeddingTable table;
  separable_set(200, xs, ys, vocab, table, 43);

  TrainConfig cfg;
  cfg.lr = 0.01f;
  cfg.batch_size = 32;
  cfg.max_len = 12;
  cfg.epochs = 15;
  cfg.seed = 44;
  cfg.hidden = 16;
  TwemModel model = init_model(vocab, table, {"background", "signal"}, cfg);
  const TrainHistory history = train_model(model, xs, ys, cfg);

  REQUIRE(history.epochs.size() == 15);
  REQUIRE(history.selected_epoch >= 0);
  // selected epoch is the argmin of validation loss
  double best = history.epochs[0].val_loss;
  int best_epoch = 0;
  for (size_t e = 1; e < history.epochs.size(); ++e) {
    if (history.epochs[e].val_loss < best) {
      best = history.epochs[e].val_loss;
      best_epoch = static_cast<int>(e);
    }
  }
  CHECK(history.selected_epoch == best_epoch);
  CHECK(history.epochs[static_cast<size_t>(history.selected_epoch)]
            .val_weighted_f1 >= 0.95);

  const std::vector<int> preds = predict_encoded(model, xs);
  int correct = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    correct += preds[i] == ys[i] ? 1 : 0;
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(preds.size()) >=
        0.95);
}

TEST_CASE("training is deterministic and epochs=0 is a no-op") {
  std::vector<EncodedExample> xs;
  std::vector<int> ys;
  Vocabulary vocab;
  EmbeddingTable table;
  separable_set(80, xs, ys, vocab, table, 45);

  TrainConfig cfg;
  cfg.lr = 0.01f;
  cfg.batch_size = 16;
  cfg.max_len = 12;
  cfg.epochs = 4;
  cfg.seed = 46;
  cfg.hidden = 12;

  TwemModel m1 = init_model(vocab, table, {"x", "y"}, cfg);
  TwemModel m2 = init_model(vocab, table, {"x", "y"}, cfg);
  const TrainHistory h1 = train_model(m1, xs, ys, cfg);
  const TrainHistory h2 = train_model(m2, xs, ys, cfg);
  REQUIRE(h1.epochs.size() == h2.epochs.size());
  for (size_t e = 0; e < h1.epochs.size(); ++e) {
    CHECK(h1.epochs[e].train_loss == h2.epochs[e].train_loss);
    CHECK(h1.epochs[e].val_loss == h2.epochs[e].val_loss);
  }
  CHECK(m1.net.emb.val.v == m2.net.emb.val.v);
  CHECK(m1.net.out_w.val.v == m2.net.out_w.val.v);

  TrainConfig zero = cfg;
  zero.epochs = 0;
  TwemModel m3 = init_model(vocab, table, {"x", "y"}, zero);
  const Mat<float> before = m3.net.proj_w.val;
  const TrainHistory h3 = train_model(m3, xs, ys, zero);
  CHECK(h3.epochs.empty());
  CHECK(h3.selected_epoch == -1);
  CHECK(m3.net.proj_w.val.v == before.v);
}

TEST_CASE("argmax prediction breaks ties toward the lowest class") {
  TwemNet<float> net = random_net<float>(10, 4, 6, 3, 47);
  // force identical logits by zeroing the output layer
  net.out_w.val.fill(0.0f);
  net.out_b.val.fill(0.0f);
  TwemModel model;
  model.vocab.tokens = {"<PAD>", "a"};
  model.vocab.index = {{"a", 1}};
  model.label_names = {"c0", "c1", "c2"};
  model.max_len = 4;
  model.net = net;
  EncodedExample ex;
  ex.ids = {1, 0, 0, 0};
  ex.mask = {1, 0, 0, 0};
  ex.length = 1;
  const std::vector<EncodedExample> batch = {ex};
  const std::vector<int> preds = predict_encoded(model, batch);
  CHECK(preds == std::vector<int>{0});
}

TEST_CASE("model files round-trip bit-exactly") {
  std::vector<EncodedExample> xs;
  std::vector<int> ys;
  Vocabulary vocab;
  EmbeddingTable table;
  separable_set(60, xs, ys, vocab, table, 48);
  TrainConfig cfg;
  cfg.lr = 0.01f;
  cfg.batch_size = 16;
  cfg.max_len = 12;
  cfg.epochs = 2;
  cfg.seed = 49;
  cfg.hidden = 12;
  TwemModel model = init_model(vocab, table, {"neg", "pos"}, cfg);
  train_model(model, xs, ys, cfg);

  const fs::path p1 = fs::temp_directory_path() / "twem_model_a.twem";
  const fs::path p2 = fs::temp_directory_path() / "twem_model_b.twem";
  save_model(model, p1.string());
  TwemModel reloaded = load_model(p1.string());
  save_model(reloaded, p2.string());

  std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
  const std::string bytes1((std::istreambuf_iterator<char>(f1)),
                           std::istreambuf_iterator<char>());
  const std::string bytes2((std::istreambuf_iterator<char>(f2)),
                           std::istreambuf_iterator<char>());
  CHECK(bytes1 == bytes2);
  CHECK(!bytes1.empty());

  CHECK(reloaded.label_names == model.label_names);
  CHECK(reloaded.max_len == model.max_len);
  CHECK(reloaded.scheme == model.scheme);
  CHECK(reloaded.net.hidden == model.net.hidden);
  CHECK(reloaded.net.emb.val.v == model.net.emb.val.v);

  // predictions agree on random inputs
  Rng rng(50);
  std::vector<EncodedExample> probes;
  for (int i = 0; i < 100; ++i) {
    probes.push_back(random_example(vocab.size(), 12, rng));
  }
  CHECK(predict_encoded(model, probes) == predict_encoded(reloaded, probes));
}

TEST_CASE("model loader rejects corrupt files") {
  const fs::path good = fs::temp_directory_path() / "twem_model_good.twem";
  {
    std::vector<EncodedExample> xs;
    std::vector<int> ys;
    Vocabulary vocab;
    EmbeddingTable table;
    separable_set(40, xs, ys, vocab, table, 51);
    TrainConfig cfg;
    cfg.batch_size = 8;
    cfg.max_len = 12;
    cfg.epochs = 1;
    cfg.seed = 52;
    cfg.hidden = 8;
    cfg.lr = 0.01f;
    TwemModel model = init_model(vocab, table, {"neg", "pos"}, cfg);
    save_model(model, good.string());
  }

  SUBCASE("bad magic") {
    const fs::path bad = fs::temp_directory_path() / "twem_model_magic.twem";
    std::ifstream in(good, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    bytes[4] = '2';  // TWEM1 -> TWEM2
    std::ofstream out(bad, std::ios::binary);
    out << bytes;
    out.close();
    CHECK_THROWS_AS(load_model(bad.string()), DataError);
  }

  SUBCASE("truncated tensor names the tensor") {
    const fs::path bad = fs::temp_directory_path() / "twem_model_trunc.twem";
    std::ifstream in(good, std::ios::binary);
    std::string bytes((std::istreambuf_iterator<char>(in)),
                      std::istreambuf_iterator<char>());
    bytes.resize(bytes.size() - 6);  // cut into the final tensor
    std::ofstream out(bad, std::ios::binary);
    out << bytes;
    out.close();
    try {
      load_model(bad.string());
      FAIL("expected DataError");
    } catch (const DataError& e) {
      CHECK(std::string(e.what()).find("out b") != std::string::npos);
    }
  }

  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_model("/nonexistent/x.twem"), DataError);
  }
}

TEST_CASE("the generated fixture trains to the target quality") {
  const fs::path dir = fs::temp_directory_path() / "twem_fixture_model_test";
  fs::remove_all(dir);
  make_fixture(dir.string(), 7);
  const Dataset ds = load_csv((dir / "corpus.csv").string(), "text", "label",
                              {"background", "signal"});
  REQUIRE(ds.examples.size() == 200);
  const auto counts = class_counts(ds);
  CHECK(counts.at("background") == 100);
  CHECK(counts.at("signal") == 100);

  const PretrainedMap pretrained =
      load_pretrained((dir / "embeddings.txt").string(), 16);
  TrainConfig cfg;
  cfg.lr = 0.01f;
  cfg.batch_size = 32;
  cfg.max_len = 20;
  cfg.epochs = 15;
  cfg.seed = 7;
  cfg.hidden = 50;
  TrainedTwem trained = train_twem_on(ds, {}, pretrained, 16, cfg, false);
  CHECK(trained.history.epochs.size() == 15);
  double best_val_f1 = 0.0;
  for (const EpochStats& e : trained.history.epochs) {
    best_val_f1 = std::max(best_val_f1, e.val_weighted_f1);
  }
  CHECK(best_val_f1 >= 0.95);  // reached within the epoch budget

  std::vector<TokenSeq> tokens;
  std::vector<int> golds;
  for (const LabeledExample& ex : ds.examples) {
    tokens.push_back(apply_scheme(ex.text, cfg.scheme));
    golds.push_back(ex.label);
  }
  const std::vector<int> preds = predict_tokens(trained.model, tokens);
  int correct = 0;
  for (size_t i = 0; i < preds.size(); ++i) {
    correct += preds[i] == golds[i] ? 1 : 0;
  }
  CHECK(static_cast<double>(correct) / static_cast<double>(preds.size()) >=
        0.95);
}

TEST_SUITE_END();
