#include "twem/baseline.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "twem/errors.hpp"

namespace twem {
namespace {

// Combined, namespaced feature counts for one document.
std::map<std::string, int> document_features(const std::string& text,
                                             const TokenSeq& tokens) {
  std::map<std::string, int> feats;
  for (const auto& [gram, count] : char_ngrams(text, 1, 4).counts) {
    feats["c:" + gram] = count;
  }
  for (const auto& [word, count] : word_unigrams(tokens).counts) {
    feats["w:" + word] = count;
  }
  return feats;
}

}  // namespace

TfidfIndex fit_index(const std::vector<std::string>& texts,
                     const std::vector<TokenSeq>& token_seqs) {
  if (texts.empty() || texts.size() != token_seqs.size()) {
    throw UsageError("fit_index: need matching, non-empty texts and tokens");
  }
  TfidfIndex index;
  index.doc_count = static_cast<long>(texts.size());
  std::vector<long> df;
  for (size_t i = 0; i < texts.size(); ++i) {
    for (const auto& [feat, _] : document_features(texts[i], token_seqs[i])) {
      const auto [it, inserted] =
          index.feature_col.emplace(feat, static_cast<int>(df.size()));
      if (inserted) df.push_back(0);
      ++df[static_cast<size_t>(it->second)];
    }
  }
  index.idf.resize(df.size());
  for (size_t f = 0; f < df.size(); ++f) {
    index.idf[f] = std::log((1.0 + static_cast<double>(index.doc_count)) /
                            (1.0 + static_cast<double>(df[f]))) +
                   1.0;
  }
  return index;
}

SparseVec vectorize(const TfidfIndex& index, const std::string& text,
                    const TokenSeq& tokens) {
  SparseVec vec;
  for (const auto& [feat, count] : document_features(text, tokens)) {
    const auto it = index.feature_col.find(feat);
    if (it == index.feature_col.end()) continue;
    vec.items.emplace_back(it->second,
                           static_cast<double>(count) *
                               index.idf[static_cast<size_t>(it->second)]);
  }
  std::sort(vec.items.begin(), vec.items.end());
  double norm_sq = 0.0;
  for (const auto& [_, v] : vec.items) norm_sq += v * v;
  if (norm_sq > 0.0) {
    const double inv = 1.0 / std::sqrt(norm_sq);
    for (auto& [_, v] : vec.items) v *= inv;
  }
  return vec;
}

double logreg_loss(const LogRegModel& model, const std::vector<SparseVec>& xs,
                   std::span<const int> ys) {
  double total = 0.0;
  std::vector<double> logits(static_cast<size_t>(model.classes));
  for (size_t i = 0; i < xs.size(); ++i) {
    for (int c = 0; c < model.classes; ++c) {
      logits[static_cast<size_t>(c)] = model.b[static_cast<size_t>(c)];
    }
    for (const auto& [f, v] : xs[i].items) {
      for (int c = 0; c < model.classes; ++c) {
        logits[static_cast<size_t>(c)] += v * model.weight(f, c);
      }
    }
    const double m = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (const double l : logits) sum += std::exp(l - m);
    total += std::log(sum) - (logits[static_cast<size_t>(ys[i])] - m);
  }
  double reg = 0.0;
  for (const double w : model.w) reg += w * w;
  return total / static_cast<double>(xs.size()) + 0.5 * model.l2 * reg;
}

LogRegModel train_logreg(const std::vector<SparseVec>& xs,
                         std::span<const int> ys, int classes,
                         const LogRegConfig& cfg) {
  if (classes < 2) throw UsageError("train_logreg: need >= 2 classes");
  if (xs.empty() || xs.size() != ys.size()) {
    throw UsageError("train_logreg: need matching, non-empty data");
  }
  int features = 0;
  for (const SparseVec& x : xs) {
    for (const auto& [f, _] : x.items) features = std::max(features, f + 1);
  }

  LogRegModel model;
  model.features = features;
  model.classes = classes;
  model.l2 = cfg.l2;
  model.w.assign(static_cast<size_t>(features) * static_cast<size_t>(classes),
                 0.0);
  model.b.assign(static_cast<size_t>(classes), 0.0);

  const double inv_n = 1.0 / static_cast<double>(xs.size());
  std::vector<double> gw(model.w.size());
  std::vector<double> gb(model.b.size());
  std::vector<double> probs(static_cast<size_t>(classes));

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::fill(gw.begin(), gw.end(), 0.0);
    std::fill(gb.begin(), gb.end(), 0.0);
    double loss = 0.0;
    for (size_t i = 0; i < xs.size(); ++i) {
      for (int c = 0; c < classes; ++c) {
        probs[static_cast<size_t>(c)] = model.b[static_cast<size_t>(c)];
      }
      for (const auto& [f, v] : xs[i].items) {
        for (int c = 0; c < classes; ++c) {
          probs[static_cast<size_t>(c)] += v * model.weight(f, c);
        }
      }
      const double m = *std::max_element(probs.begin(), probs.end());
      double sum = 0.0;
      for (double& p : probs) {
        p = std::exp(p - m);
        sum += p;
      }
      loss += std::log(sum) - std::log(probs[static_cast<size_t>(ys[i])]);
      for (double& p : probs) p /= sum;
      probs[static_cast<size_t>(ys[i])] -= 1.0;
      for (const auto& [f, v] : xs[i].items) {
        for (int c = 0; c < classes; ++c) {
          gw[static_cast<size_t>(f) * classes + static_cast<size_t>(c)] +=
              v * probs[static_cast<size_t>(c)] * inv_n;
        }
      }
      for (int c = 0; c < classes; ++c) {
        gb[static_cast<size_t>(c)] += probs[static_cast<size_t>(c)] * inv_n;
      }
    }
    if (!std::isfinite(loss)) {
      throw NumericError("train_logreg: non-finite loss at epoch " +
                         std::to_string(epoch));
    }
    for (size_t j = 0; j < model.w.size(); ++j) {
      model.w[j] -= cfg.lr * (gw[j] + cfg.l2 * model.w[j]);
    }
    for (size_t j = 0; j < model.b.size(); ++j) {
      model.b[j] -= cfg.lr * gb[j];
    }
  }
  return model;
}

std::vector<double> logreg_probs(const LogRegModel& model, const SparseVec& x) {
  std::vector<double> logits(static_cast<size_t>(model.classes));
  for (int c = 0; c < model.classes; ++c) {
    logits[static_cast<size_t>(c)] = model.b[static_cast<size_t>(c)];
  }
  for (const auto& [f, v] : x.items) {
    if (f >= model.features) continue;  // feature unseen at training time
    for (int c = 0; c < model.classes; ++c) {
      logits[static_cast<size_t>(c)] += v * model.weight(f, c);
    }
  }
  const double m = *std::max_element(logits.begin(), logits.end());
  double sum = 0.0;
  for (double& l : logits) {
    l = std::exp(l - m);
    sum += l;
  }
  for (double& l : logits) l /= sum;
  return logits;
}

int predict_logreg(const LogRegModel& model, const SparseVec& x) {
  const std::vector<double> probs = logreg_probs(model, x);
  int best = 0;
  for (int c = 1; c < model.classes; ++c) {
    if (probs[static_cast<size_t>(c)] > probs[static_cast<size_t>(best)]) {
      best = c;
    }
  }
  return best;
}

}  // namespace twem
