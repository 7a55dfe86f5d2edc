#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "twem/text.hpp"

namespace twem {

// TF-IDF feature space over character 1..4-grams of the raw text ("c:"
// namespace) and word unigrams of the tokenized text ("w:" namespace).
struct TfidfIndex {
  std::unordered_map<std::string, int> feature_col;
  std::vector<double> idf;  // smoothed: ln((1+N)/(1+df)) + 1
  long doc_count = 0;

  int features() const { return static_cast<int>(idf.size()); }
};

struct SparseVec {
  std::vector<std::pair<int, double>> items;  // strictly increasing columns
};

struct LogRegModel {
  int features = 0;
  int classes = 0;
  std::vector<double> w;  // F x C row-major
  std::vector<double> b;  // C
  double l2 = 0.0;

  double& weight(int f, int c) { return w[static_cast<size_t>(f) * classes + c]; }
  double weight(int f, int c) const { return w[static_cast<size_t>(f) * classes + c]; }
};

struct LogRegConfig {
  double lr = 0.5;
  int epochs = 200;
  double l2 = 1e-4;
};

TfidfIndex fit_index(const std::vector<std::string>& texts,
                     const std::vector<TokenSeq>& token_seqs);

// tf * idf over known features, L2-normalized; unknown features dropped.
SparseVec vectorize(const TfidfIndex& index, const std::string& text,
                    const TokenSeq& tokens);

// Multinomial logistic regression, full-batch gradient descent on mean
// cross entropy + (l2/2)*||W||^2 (bias unregularized). Deterministic.
LogRegModel train_logreg(const std::vector<SparseVec>& xs,
                         std::span<const int> ys, int classes,
                         const LogRegConfig& cfg);

std::vector<double> logreg_probs(const LogRegModel& model, const SparseVec& x);
int predict_logreg(const LogRegModel& model, const SparseVec& x);

// Loss at the current parameters; exposed for gradient and monotonicity
// checks.
double logreg_loss(const LogRegModel& model, const std::vector<SparseVec>& xs,
                   std::span<const int> ys);

}  // namespace twem
