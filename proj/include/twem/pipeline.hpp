#pragma once

#include <cstdint>
#include <vector>

#include "twem/baseline.hpp"
#include "twem/corpus.hpp"
#include "twem/embed.hpp"
#include "twem/eval.hpp"
#include "twem/model.hpp"

namespace twem {

// Fold-level TWEM trainer for the CV and significance harnesses: builds a
// fresh vocabulary over the fold's training texts (with a shared UNK row so
// unseen test tokens stay encodable), trains and predicts. The pretrained
// map must cover `cfg` dimensions.
Trainer make_twem_trainer(const PretrainedMap& pretrained, int dim,
                          const TrainConfig& cfg);

// Fold-level TF-IDF + logistic regression trainer under the same folds.
Trainer make_baseline_trainer(const LogRegConfig& cfg,
                              PreprocessScheme scheme);

// Convenience: tokenize every example of a dataset under one scheme.
std::vector<TokenSeq> tokenize_dataset(const Dataset& ds,
                                       PreprocessScheme scheme);

// End-to-end single training run over an id subset (or all ids when empty):
// tokenize, build vocabulary, encode, train.
struct TrainedTwem {
  TwemModel model;
  TrainHistory history;
};

TrainedTwem train_twem_on(const Dataset& ds, const std::vector<int>& ids,
                          const PretrainedMap& pretrained, int dim,
                          const TrainConfig& cfg, bool allow_unk);

}  // namespace twem
