#include "twem/model.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>

#include "twem/errors.hpp"
#include "twem/eval.hpp"

namespace twem {
namespace {

void write_u64_le(std::ostream& out, uint64_t x) {
  unsigned char buf[8];
  for (int i = 0; i < 8; ++i) buf[i] = static_cast<unsigned char>(x >> (8 * i));
  out.write(reinterpret_cast<const char*>(buf), 8);
}

uint64_t read_u64_le(std::istream& in, const std::string& what) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), 8);
  if (in.gcount() != 8) throw DataError("model file truncated at " + what);
  uint64_t x = 0;
  for (int i = 0; i < 8; ++i) x |= static_cast<uint64_t>(buf[i]) << (8 * i);
  return x;
}

void write_tensor(std::ostream& out, const Mat<float>& m) {
  write_u64_le(out, m.size());
  std::vector<unsigned char> buf(m.size() * 4);
  for (size_t i = 0; i < m.size(); ++i) {
    uint32_t bits = 0;
    std::memcpy(&bits, &m.v[i], 4);
    buf[4 * i + 0] = static_cast<unsigned char>(bits);
    buf[4 * i + 1] = static_cast<unsigned char>(bits >> 8);
    buf[4 * i + 2] = static_cast<unsigned char>(bits >> 16);
    buf[4 * i + 3] = static_cast<unsigned char>(bits >> 24);
  }
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
}

void read_tensor(std::istream& in, Mat<float>& m, const std::string& name) {
  const uint64_t count = read_u64_le(in, name);
  if (count != m.size()) {
    throw DataError("model file: tensor '" + name + "' has " +
                    std::to_string(count) + " elements, expected " +
                    std::to_string(m.size()));
  }
  std::vector<unsigned char> buf(count * 4);
  in.read(reinterpret_cast<char*>(buf.data()),
          static_cast<std::streamsize>(buf.size()));
  if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
    throw DataError("model file: tensor '" + name + "' truncated");
  }
  for (size_t i = 0; i < count; ++i) {
    const uint32_t bits = static_cast<uint32_t>(buf[4 * i]) |
                          (static_cast<uint32_t>(buf[4 * i + 1]) << 8) |
                          (static_cast<uint32_t>(buf[4 * i + 2]) << 16) |
                          (static_cast<uint32_t>(buf[4 * i + 3]) << 24);
    std::memcpy(&m.v[i], &bits, 4);
  }
}

struct NetSnapshot {
  std::vector<Mat<float>> vals;
};

NetSnapshot take_snapshot(TwemNet<float>& net) {
  NetSnapshot s;
  for (Param<float>* p : net.params()) s.vals.push_back(p->val);
  return s;
}

void restore_snapshot(TwemNet<float>& net, const NetSnapshot& s) {
  auto params = net.params();
  for (size_t i = 0; i < params.size(); ++i) params[i]->val = s.vals[i];
}

// Per-class holdout of floor(frac * n) examples, deterministic in the rng.
std::vector<uint8_t> stratified_holdout(std::span<const int> labels,
                                        int classes, double frac, Rng& rng) {
  std::vector<std::vector<size_t>> by_class(static_cast<size_t>(classes));
  for (size_t i = 0; i < labels.size(); ++i) {
    by_class[static_cast<size_t>(labels[i])].push_back(i);
  }
  std::vector<uint8_t> is_val(labels.size(), 0);
  for (std::vector<size_t>& ids : by_class) {
    rng.shuffle(ids);
    const size_t take = static_cast<size_t>(
        static_cast<double>(ids.size()) * frac);
    for (size_t j = 0; j < take; ++j) is_val[ids[j]] = 1;
  }
  return is_val;
}

double batched_inference_loss(TwemModel& model,
                              const std::vector<const EncodedExample*>& xs,
                              const std::vector<int>& ys,
                              std::vector<int>* preds) {
  constexpr size_t kChunk = 512;
  double total = 0.0;
  for (size_t start = 0; start < xs.size(); start += kChunk) {
    const size_t n = std::min(kChunk, xs.size() - start);
    std::vector<EncodedExample> chunk(n);
    for (size_t i = 0; i < n; ++i) chunk[i] = *xs[start + i];
    std::span<const int> labels(ys.data() + start, n);
    TwemCache<float> cache =
        twem_forward(model.net, std::span<const EncodedExample>(chunk), false,
                     0.0, nullptr);
    const SoftmaxXent<float> sx = softmax_xent(cache.logits, labels);
    total += static_cast<double>(sx.loss) * static_cast<double>(n);
    if (preds != nullptr) {
      for (int i = 0; i < sx.probs.rows; ++i) {
        const float* row = sx.probs.row(i);
        int best = 0;
        for (int j = 1; j < sx.probs.cols; ++j) {
          if (row[j] > row[best]) best = j;
        }
        preds->push_back(best);
      }
    }
  }
  return total / static_cast<double>(xs.size());
}

}  // namespace

void TrainConfig::validate() const {
  if (!(lr > 0)) throw UsageError("train config: lr must be positive");
  if (batch_size < 1) throw UsageError("train config: batch_size must be >= 1");
  if (max_len < 1) throw UsageError("train config: max_len must be >= 1");
  if (epochs < 0) throw UsageError("train config: epochs must be >= 0");
  if (hidden < 1) throw UsageError("train config: hidden must be >= 1");
  if (dropout_rate < 0.0f || dropout_rate >= 1.0f) {
    throw UsageError("train config: dropout must be in [0,1)");
  }
  if (val_fraction < 0.0 || val_fraction > 0.5) {
    throw UsageError("train config: val_fraction must be in [0,0.5]");
  }
}

TwemModel init_model(Vocabulary vocab, const EmbeddingTable& table,
                     std::vector<std::string> label_names,
                     const TrainConfig& cfg) {
  cfg.validate();
  if (label_names.size() < 2) {
    throw UsageError("init_model: need at least 2 classes");
  }
  if (table.rows.rows != vocab.size()) {
    throw NumericError("init_model: table rows " +
                       std::to_string(table.rows.rows) + " != vocabulary " +
                       std::to_string(vocab.size()));
  }
  TwemModel model;
  model.vocab = std::move(vocab);
  model.label_names = std::move(label_names);
  model.max_len = cfg.max_len;
  model.scheme = cfg.scheme;
  model.net = TwemNet<float>(model.vocab.size(), table.dim, cfg.hidden,
                             static_cast<int>(model.label_names.size()));
  model.net.emb.val = table.rows;
  Rng rng(derive_seed(cfg.seed, "init"));
  model.net.init_dense_weights(rng);
  return model;
}

TrainHistory train_model(TwemModel& model,
                         std::span<const EncodedExample> examples,
                         std::span<const int> labels, const TrainConfig& cfg) {
  cfg.validate();
  if (examples.size() != labels.size() || examples.empty()) {
    throw UsageError("train: need matching, non-empty examples and labels");
  }
  TrainHistory history;
  if (cfg.epochs == 0) return history;

  Rng val_rng(derive_seed(cfg.seed, "val_split"));
  Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));
  Rng dropout_rng(derive_seed(cfg.seed, "dropout"));

  const int classes = model.net.classes;
  const std::vector<uint8_t> is_val =
      cfg.val_fraction > 0.0
          ? stratified_holdout(labels, classes, cfg.val_fraction, val_rng)
          : std::vector<uint8_t>(labels.size(), 0);

  std::vector<size_t> train_idx;
  std::vector<const EncodedExample*> val_xs;
  std::vector<int> val_ys;
  for (size_t i = 0; i < examples.size(); ++i) {
    if (is_val[i]) {
      val_xs.push_back(&examples[i]);
      val_ys.push_back(labels[i]);
    } else {
      train_idx.push_back(i);
    }
  }
  if (train_idx.empty()) throw UsageError("train: empty training split");
  history.val_from_train = val_xs.empty();

  double best_val = std::numeric_limits<double>::infinity();
  NetSnapshot best = take_snapshot(model.net);
  const auto params = model.net.params();

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle_rng.shuffle(train_idx);
    double epoch_loss = 0.0;
    size_t seen = 0;
    const size_t bs = static_cast<size_t>(cfg.batch_size);
    for (size_t start = 0; start < train_idx.size(); start += bs) {
      const size_t n = std::min(bs, train_idx.size() - start);
      std::vector<EncodedExample> batch(n);
      std::vector<int> batch_labels(n);
      for (size_t i = 0; i < n; ++i) {
        batch[i] = examples[train_idx[start + i]];
        batch_labels[i] = labels[train_idx[start + i]];
      }
      TwemCache<float> cache = twem_forward(
          model.net, std::span<const EncodedExample>(batch), true,
          static_cast<double>(cfg.dropout_rate), &dropout_rng);
      const float loss =
          twem_loss_and_backward(model.net, cache, batch_labels);
      if (!std::isfinite(loss)) {
        throw NumericError("train: non-finite loss at epoch " +
                           std::to_string(epoch) + ", batch " +
                           std::to_string(start / bs));
      }
      for (Param<float>* p : params) {
        rmsprop_step(*p, cfg.lr, cfg.rho, cfg.eps);
      }
      epoch_loss += static_cast<double>(loss) * static_cast<double>(n);
      seen += n;
    }

    EpochStats stats;
    stats.train_loss = epoch_loss / static_cast<double>(seen);
    if (!val_xs.empty()) {
      std::vector<int> val_preds;
      stats.val_loss = batched_inference_loss(model, val_xs, val_ys, &val_preds);
      const ConfusionMatrix cm = confusion(val_ys, val_preds, classes);
      stats.val_weighted_f1 = metrics(cm).weighted_f1;
    } else {
      stats.val_loss = stats.train_loss;
      stats.val_weighted_f1 = 0.0;
    }
    history.epochs.push_back(stats);
    if (stats.val_loss < best_val) {
      best_val = stats.val_loss;
      best = take_snapshot(model.net);
      history.selected_epoch = epoch;
    }
  }

  restore_snapshot(model.net, best);
  return history;
}

std::vector<int> predict_encoded(TwemModel& model,
                                 std::span<const EncodedExample> examples,
                                 Mat<float>* probs_out) {
  constexpr size_t kChunk = 512;
  std::vector<int> preds;
  preds.reserve(examples.size());
  if (probs_out != nullptr) {
    *probs_out =
        Mat<float>(static_cast<int>(examples.size()), model.net.classes);
  }
  for (size_t start = 0; start < examples.size(); start += kChunk) {
    const size_t n = std::min(kChunk, examples.size() - start);
    TwemCache<float> cache =
        twem_forward(model.net, examples.subspan(start, n), false, 0.0,
                     nullptr);
    for (int i = 0; i < cache.probs.rows; ++i) {
      const float* row = cache.probs.row(i);
      int best = 0;
      for (int j = 1; j < cache.probs.cols; ++j) {
        if (row[j] > row[best]) best = j;  // ties keep the lowest index
      }
      preds.push_back(best);
      if (probs_out != nullptr) {
        float* out = probs_out->row(static_cast<int>(start + static_cast<size_t>(i)));
        for (int j = 0; j < cache.probs.cols; ++j) out[j] = row[j];
      }
    }
  }
  return preds;
}

std::vector<int> predict_tokens(TwemModel& model,
                                const std::vector<TokenSeq>& token_seqs,
                                Mat<float>* probs_out) {
  std::vector<EncodedExample> encoded;
  encoded.reserve(token_seqs.size());
  for (const TokenSeq& seq : token_seqs) {
    encoded.push_back(encode(seq, model.vocab, model.max_len));
  }
  return predict_encoded(model, encoded, probs_out);
}

void save_model(const TwemModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write model file: " + path);
  out << "TWEM1\n";
  out << model.net.vocab_size << ' ' << model.net.dim << ' '
      << model.net.classes << ' ' << model.max_len << ' '
      << scheme_name(model.scheme) << '\n';
  for (size_t i = 0; i < model.label_names.size(); ++i) {
    if (i > 0) out << '\t';
    out << model.label_names[i];
  }
  out << '\n';
  for (const std::string& tok : model.vocab.tokens) out << tok << '\n';

  const TwemNet<float>& net = model.net;
  write_tensor(out, net.emb.val);
  write_tensor(out, net.proj_w.val);
  write_tensor(out, net.proj_b.val);
  write_tensor(out, net.h1_w.val);
  write_tensor(out, net.h1_b.val);
  write_tensor(out, net.h2_w.val);
  write_tensor(out, net.h2_b.val);
  write_tensor(out, net.out_w.val);
  write_tensor(out, net.out_b.val);
  if (!out) throw DataError("failed writing model file: " + path);
}

TwemModel load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file: " + path);
  std::string line;
  if (!std::getline(in, line) || line != "TWEM1") {
    throw DataError("model file: bad magic (expected TWEM1)");
  }
  if (!std::getline(in, line)) throw DataError("model file: missing header");
  std::istringstream header(line);
  int v = 0, d = 0, c = 0, max_len = 0;
  std::string scheme_str;
  if (!(header >> v >> d >> c >> max_len >> scheme_str) || v < 1 || d < 1 ||
      c < 2 || max_len < 1) {
    throw DataError("model file: malformed header line");
  }

  TwemModel model;
  model.max_len = max_len;
  model.scheme = scheme_from_name(scheme_str);
  if (!std::getline(in, line)) throw DataError("model file: missing labels");
  size_t pos = 0;
  while (true) {
    const size_t tab = line.find('\t', pos);
    model.label_names.push_back(line.substr(pos, tab - pos));
    if (tab == std::string::npos) break;
    pos = tab + 1;
  }
  if (static_cast<int>(model.label_names.size()) != c) {
    throw DataError("model file: " +
                    std::to_string(model.label_names.size()) +
                    " label names for C=" + std::to_string(c));
  }

  model.vocab.tokens.reserve(static_cast<size_t>(v));
  for (int i = 0; i < v; ++i) {
    if (!std::getline(in, line)) {
      throw DataError("model file: vocabulary truncated at entry " +
                      std::to_string(i));
    }
    model.vocab.tokens.push_back(line);
    if (i > 0) model.vocab.index.emplace(line, i);
  }
  if (v > 1 && model.vocab.tokens[1] == Vocabulary::kUnkLiteral) {
    model.vocab.unk_index = 1;
    model.vocab.index.erase(Vocabulary::kUnkLiteral);
  }

  // Hidden width is not in the header; derive it from the first hidden
  // weight tensor (2D x H).
  model.net = TwemNet<float>();
  model.net.vocab_size = v;
  model.net.dim = d;
  model.net.classes = c;
  model.net.emb = Param<float>(v, d);
  read_tensor(in, model.net.emb.val, "embeddings");
  model.net.proj_w = Param<float>(d, d);
  model.net.proj_b = Param<float>(1, d);
  read_tensor(in, model.net.proj_w.val, "proj W");
  read_tensor(in, model.net.proj_b.val, "proj b");

  const uint64_t h1_count = read_u64_le(in, "hidden1 W");
  if (h1_count == 0 || h1_count % (2 * static_cast<uint64_t>(d)) != 0) {
    throw DataError("model file: tensor 'hidden1 W' has " +
                    std::to_string(h1_count) +
                    " elements, not a multiple of 2*D");
  }
  const int h = static_cast<int>(h1_count / (2 * static_cast<uint64_t>(d)));
  model.net.hidden = h;
  model.net.h1_w = Param<float>(2 * d, h);
  {
    // Re-frame the already-consumed length prefix.
    std::vector<unsigned char> buf(h1_count * 4);
    in.read(reinterpret_cast<char*>(buf.data()),
            static_cast<std::streamsize>(buf.size()));
    if (in.gcount() != static_cast<std::streamsize>(buf.size())) {
      throw DataError("model file: tensor 'hidden1 W' truncated");
    }
    for (size_t i = 0; i < h1_count; ++i) {
      const uint32_t bits = static_cast<uint32_t>(buf[4 * i]) |
                            (static_cast<uint32_t>(buf[4 * i + 1]) << 8) |
                            (static_cast<uint32_t>(buf[4 * i + 2]) << 16) |
                            (static_cast<uint32_t>(buf[4 * i + 3]) << 24);
      std::memcpy(&model.net.h1_w.val.v[i], &bits, 4);
    }
  }
  model.net.h1_b = Param<float>(1, h);
  model.net.h2_w = Param<float>(h, h);
  model.net.h2_b = Param<float>(1, h);
  model.net.out_w = Param<float>(h, c);
  model.net.out_b = Param<float>(1, c);
  read_tensor(in, model.net.h1_b.val, "hidden1 b");
  read_tensor(in, model.net.h2_w.val, "hidden2 W");
  read_tensor(in, model.net.h2_b.val, "hidden2 b");
  read_tensor(in, model.net.out_w.val, "out W");
  read_tensor(in, model.net.out_b.val, "out b");
  return model;
}

}  // namespace twem
