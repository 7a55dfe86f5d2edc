#include "twem/pipeline.hpp"

namespace twem {

std::vector<TokenSeq> tokenize_dataset(const Dataset& ds,
                                       PreprocessScheme scheme) {
  std::vector<TokenSeq> out;
  out.reserve(ds.examples.size());
  for (const LabeledExample& ex : ds.examples) {
    out.push_back(apply_scheme(ex.text, scheme));
  }
  return out;
}

TrainedTwem train_twem_on(const Dataset& ds, const std::vector<int>& ids,
                          const PretrainedMap& pretrained, int dim,
                          const TrainConfig& cfg, bool allow_unk) {
  std::vector<int> use = ids;
  if (use.empty()) {
    use.reserve(ds.examples.size());
    for (const LabeledExample& ex : ds.examples) use.push_back(ex.id);
  }

  std::vector<TokenSeq> token_seqs;
  std::vector<int> labels;
  token_seqs.reserve(use.size());
  labels.reserve(use.size());
  for (const int id : use) {
    const LabeledExample& ex = ds.examples[static_cast<size_t>(id)];
    token_seqs.push_back(apply_scheme(ex.text, cfg.scheme));
    labels.push_back(ex.label);
  }

  auto [vocab, table] =
      build_vocab(token_seqs, pretrained, cfg.seed, dim, allow_unk);

  std::vector<EncodedExample> encoded;
  encoded.reserve(token_seqs.size());
  for (const TokenSeq& seq : token_seqs) {
    encoded.push_back(encode(seq, vocab, cfg.max_len));
  }

  TrainedTwem result;
  result.model = init_model(std::move(vocab), table, ds.label_names, cfg);
  result.history = train_model(result.model, encoded, labels, cfg);
  return result;
}

Trainer make_twem_trainer(const PretrainedMap& pretrained, int dim,
                          const TrainConfig& cfg) {
  return [&pretrained, dim, cfg](const Dataset& ds,
                                 const std::vector<int>& train_ids,
                                 const std::vector<int>& test_ids,
                                 uint64_t fold_seed) {
    TrainConfig fold_cfg = cfg;
    fold_cfg.seed = fold_seed;
    TrainedTwem trained =
        train_twem_on(ds, train_ids, pretrained, dim, fold_cfg, true);
    std::vector<TokenSeq> test_tokens;
    test_tokens.reserve(test_ids.size());
    for (const int id : test_ids) {
      test_tokens.push_back(
          apply_scheme(ds.examples[static_cast<size_t>(id)].text, cfg.scheme));
    }
    return predict_tokens(trained.model, test_tokens);
  };
}

Trainer make_baseline_trainer(const LogRegConfig& cfg,
                              PreprocessScheme scheme) {
  return [cfg, scheme](const Dataset& ds, const std::vector<int>& train_ids,
                       const std::vector<int>& test_ids, uint64_t) {
    std::vector<std::string> train_texts;
    std::vector<TokenSeq> train_tokens;
    std::vector<int> train_labels;
    for (const int id : train_ids) {
      const LabeledExample& ex = ds.examples[static_cast<size_t>(id)];
      train_texts.push_back(ex.text);
      train_tokens.push_back(apply_scheme(ex.text, scheme));
      train_labels.push_back(ex.label);
    }
    const TfidfIndex index = fit_index(train_texts, train_tokens);
    std::vector<SparseVec> xs;
    xs.reserve(train_texts.size());
    for (size_t i = 0; i < train_texts.size(); ++i) {
      xs.push_back(vectorize(index, train_texts[i], train_tokens[i]));
    }
    const LogRegModel model =
        train_logreg(xs, train_labels, ds.classes(), cfg);

    std::vector<int> preds;
    preds.reserve(test_ids.size());
    for (const int id : test_ids) {
      const LabeledExample& ex = ds.examples[static_cast<size_t>(id)];
      preds.push_back(predict_logreg(
          model, vectorize(index, ex.text, apply_scheme(ex.text, scheme))));
    }
    return preds;
  };
}

}  // namespace twem
