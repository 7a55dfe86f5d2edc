#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "twem/embed.hpp"
#include "twem/nn.hpp"
#include "twem/text.hpp"

namespace twem {

// The trainable graph. Dimension chain:
//   D -(shared projection + ReLU, per position)-> D
//     -(max pool || mean pool, concatenated)-> 2D -> H -> H -> C
// Templated on the scalar so training runs in float and gradient
// verification in double through the same code path.
template <typename S>
struct TwemNet {
  int vocab_size = 0;
  int dim = 0;
  int hidden = 0;
  int classes = 0;

  Param<S> emb;                 // V x D, fine-tuned with the rest
  Param<S> proj_w, proj_b;      // D x D, 1 x D
  Param<S> h1_w, h1_b;          // 2D x H, 1 x H
  Param<S> h2_w, h2_b;          // H x H, 1 x H
  Param<S> out_w, out_b;        // H x C, 1 x C

  TwemNet() = default;
  TwemNet(int v, int d, int h, int c)
      : vocab_size(v),
        dim(d),
        hidden(h),
        classes(c),
        emb(v, d),
        proj_w(d, d),
        proj_b(1, d),
        h1_w(2 * d, h),
        h1_b(1, h),
        h2_w(h, h),
        h2_b(1, h),
        out_w(h, c),
        out_b(1, c) {}

  std::vector<Param<S>*> params() {
    return {&emb,  &proj_w, &proj_b, &h1_w, &h1_b,
            &h2_w, &h2_b,   &out_w,  &out_b};
  }

  void init_dense_weights(Rng& rng) {
    init_dense(proj_w.val, rng);
    init_dense(h1_w.val, rng);
    init_dense(h2_w.val, rng);
    init_dense(out_w.val, rng);
  }
};

// Dense parameter count; the embedding table is excluded.
inline long param_count(int dim, int hidden, int classes) {
  const long d = dim, h = hidden, c = classes;
  return (d * d + d) + (2 * d * h + h) + (h * h + h) + (h * c + c);
}

template <typename S>
long param_count(const TwemNet<S>& net) {
  return param_count(net.dim, net.hidden, net.classes);
}

// Forward activations. Real tokens are packed contiguously (pads are never
// gathered), which makes padded and unpadded encodings of the same tokens
// bit-identical through the graph.
template <typename S>
struct TwemCache {
  std::vector<int> ids;       // packed token ids, sum of lengths
  std::vector<int> offsets;   // B+1 block boundaries into the packed rows
  Mat<S> x;                   // packed embeddings
  Mat<S> z_pre, z;            // projection pre/post ReLU
  std::vector<std::vector<int>> argmax;  // per example, per column
  Mat<S> doc;                 // B x 2D, [mean | max]
  Mat<S> h1_pre, h1, h2_pre, h2;
  Dropout<S> drop;
  Mat<S> logits;
  Mat<S> probs;               // filled by loss or by inference softmax
};

template <typename S>
TwemCache<S> twem_forward(TwemNet<S>& net,
                          std::span<const EncodedExample> batch, bool training,
                          double dropout_rate, Rng* rng) {
  TwemCache<S> c;
  c.offsets.reserve(batch.size() + 1);
  c.offsets.push_back(0);
  for (const EncodedExample& ex : batch) {
    if (ex.length < 1) throw NumericError("forward: example with no tokens");
    for (int t = 0; t < ex.length; ++t) {
      const int id = ex.ids[static_cast<size_t>(t)];
      if (id < 0 || id >= net.vocab_size) {
        throw NumericError("forward: token index " + std::to_string(id) +
                           " out of range for V=" +
                           std::to_string(net.vocab_size));
      }
      c.ids.push_back(id);
    }
    c.offsets.push_back(static_cast<int>(c.ids.size()));
  }

  const int total = static_cast<int>(c.ids.size());
  const int d = net.dim;
  c.x = Mat<S>(total, d);
  for (int r = 0; r < total; ++r) {
    const S* src = net.emb.val.row(c.ids[static_cast<size_t>(r)]);
    S* dst = c.x.row(r);
    for (int j = 0; j < d; ++j) dst[j] = src[j];
  }

  c.z_pre = linear_forward(c.x, net.proj_w.val, net.proj_b.val);
  c.z = relu(c.z_pre);

  const int b = static_cast<int>(batch.size());
  c.doc = Mat<S>(b, 2 * d);
  c.argmax.resize(static_cast<size_t>(b));
  for (int i = 0; i < b; ++i) {
    const int lo = c.offsets[static_cast<size_t>(i)];
    const int hi = c.offsets[static_cast<size_t>(i) + 1];
    S* drow = c.doc.row(i);
    // mean over the block, accumulated in double so row order cannot
    // perturb the result at float precision
    std::vector<double> acc(static_cast<size_t>(d), 0.0);
    for (int r = lo; r < hi; ++r) {
      const S* zrow = c.z.row(r);
      for (int j = 0; j < d; ++j) acc[static_cast<size_t>(j)] += static_cast<double>(zrow[j]);
    }
    for (int j = 0; j < d; ++j) {
      drow[j] = static_cast<S>(acc[static_cast<size_t>(j)] / (hi - lo));
    }
    // max with lowest-row tie break
    std::vector<int>& am = c.argmax[static_cast<size_t>(i)];
    am.assign(static_cast<size_t>(d), lo);
    for (int j = 0; j < d; ++j) drow[d + j] = c.z.at(lo, j);
    for (int r = lo + 1; r < hi; ++r) {
      const S* zrow = c.z.row(r);
      for (int j = 0; j < d; ++j) {
        if (zrow[j] > drow[d + j]) {
          drow[d + j] = zrow[j];
          am[static_cast<size_t>(j)] = r;
        }
      }
    }
  }

  c.h1_pre = linear_forward(c.doc, net.h1_w.val, net.h1_b.val);
  c.h1 = relu(c.h1_pre);
  c.h2_pre = linear_forward(c.h1, net.h2_w.val, net.h2_b.val);
  c.h2 = relu(c.h2_pre);
  if (training && dropout_rate > 0.0 && rng == nullptr) {
    throw UsageError("forward: dropout in training mode needs an rng");
  }
  Rng unused(0);  // never drawn from: inference and rate 0 are identities
  c.drop = dropout_forward(c.h2, dropout_rate, training,
                           rng != nullptr ? *rng : unused);
  c.logits = linear_forward(c.drop.y, net.out_w.val, net.out_b.val);
  if (!training) c.probs = softmax(c.logits);
  return c;
}

// Cross-entropy loss plus full backward pass; gradients accumulate into the
// net's Param.grad buffers. Returns the mean batch loss.
template <typename S>
S twem_loss_and_backward(TwemNet<S>& net, TwemCache<S>& c,
                         std::span<const int> labels) {
  const SoftmaxXent<S> sx = softmax_xent(c.logits, labels);
  c.probs = sx.probs;
  const Mat<S> dlogits = softmax_xent_backward(sx.probs, labels);

  Mat<S> dh2d;
  linear_backward(c.drop.y, net.out_w.val, dlogits, net.out_w.grad,
                  net.out_b.grad, &dh2d);
  const Mat<S> dh2 = dropout_backward(c.drop, dh2d);
  const Mat<S> dh2_pre = relu_backward(c.h2_pre, dh2);
  Mat<S> dh1;
  linear_backward(c.h1, net.h2_w.val, dh2_pre, net.h2_w.grad, net.h2_b.grad,
                  &dh1);
  const Mat<S> dh1_pre = relu_backward(c.h1_pre, dh1);
  Mat<S> ddoc;
  linear_backward(c.doc, net.h1_w.val, dh1_pre, net.h1_w.grad, net.h1_b.grad,
                  &ddoc);

  const int d = net.dim;
  Mat<S> dz(c.z.rows, d);
  for (int i = 0; i + 1 < static_cast<int>(c.offsets.size()); ++i) {
    const int lo = c.offsets[static_cast<size_t>(i)];
    const int hi = c.offsets[static_cast<size_t>(i) + 1];
    const S* grow = ddoc.row(i);
    const S inv_t = S(1) / static_cast<S>(hi - lo);
    for (int r = lo; r < hi; ++r) {
      S* drow = dz.row(r);
      for (int j = 0; j < d; ++j) drow[j] += grow[j] * inv_t;
    }
    const std::vector<int>& am = c.argmax[static_cast<size_t>(i)];
    for (int j = 0; j < d; ++j) {
      dz.at(am[static_cast<size_t>(j)], j) += grow[d + j];
    }
  }

  const Mat<S> dz_pre = relu_backward(c.z_pre, dz);
  Mat<S> dx;
  linear_backward(c.x, net.proj_w.val, dz_pre, net.proj_w.grad,
                  net.proj_b.grad, &dx);
  for (int r = 0; r < dx.rows; ++r) {
    S* erow = net.emb.grad.row(c.ids[static_cast<size_t>(r)]);
    const S* xrow = dx.row(r);
    for (int j = 0; j < d; ++j) erow[j] += xrow[j];
  }
  return sx.loss;
}

// ---- full model bundle -----------------------------------------------------

struct TrainConfig {
  float lr = 0.001f;
  int batch_size = 512;
  int max_len = 50;
  float dropout_rate = 0.1f;
  int epochs = 15;
  uint64_t seed = 0;
  double val_fraction = 0.1;
  PreprocessScheme scheme = PreprocessScheme::kTokenize;
  int hidden = 50;

  // RMSprop constants; only the learning rate is exposed as a headline
  // hyperparameter.
  float rho = 0.9f;
  float eps = 1e-8f;

  void validate() const;
};

struct EpochStats {
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_weighted_f1 = 0.0;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  int selected_epoch = -1;  // argmin validation loss; -1 when no epochs ran
  bool val_from_train = false;  // holdout was empty; train loss stood in
};

struct TwemModel {
  Vocabulary vocab;
  std::vector<std::string> label_names;
  int max_len = 50;
  PreprocessScheme scheme = PreprocessScheme::kTokenize;
  TwemNet<float> net;
};

// Builds an initialized model: embeddings copied from the table, dense
// layers uniform(-sqrt(6/(I+O)), +...), biases zero.
TwemModel init_model(Vocabulary vocab, const EmbeddingTable& table,
                     std::vector<std::string> label_names,
                     const TrainConfig& cfg);

// RMSprop training with a stratified validation holdout. Parameters from the
// epoch with minimum validation loss are kept. Deterministic for a fixed
// config and seed (single-threaded).
TrainHistory train_model(TwemModel& model,
                         std::span<const EncodedExample> examples,
                         std::span<const int> labels, const TrainConfig& cfg);

std::vector<int> predict_encoded(TwemModel& model,
                                 std::span<const EncodedExample> examples,
                                 Mat<float>* probs_out = nullptr);

std::vector<int> predict_tokens(TwemModel& model,
                                const std::vector<TokenSeq>& token_seqs,
                                Mat<float>* probs_out = nullptr);

// Bit-exact model persistence (magic "TWEM1\n"; header, labels, vocabulary,
// then the nine parameter tensors as length-prefixed little-endian float32).
void save_model(const TwemModel& model, const std::string& path);
TwemModel load_model(const std::string& path);

}  // namespace twem
