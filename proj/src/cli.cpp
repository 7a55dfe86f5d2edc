#include "twem/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <unordered_set>

#include "twem/analysis.hpp"
#include "twem/baseline.hpp"
#include "twem/corpus.hpp"
#include "twem/csv.hpp"
#include "twem/embed.hpp"
#include "twem/errors.hpp"
#include "twem/eval.hpp"
#include "twem/fixture.hpp"
#include "twem/model.hpp"
#include "twem/pipeline.hpp"

namespace twem {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Flat run configuration: JSON config file first, flags override.
struct RunConfig {
  std::string data;
  std::string text_column = "text";
  std::string label_column = "label";
  std::vector<std::string> labels;
  std::string scheme = "tokenize";
  std::string embeddings;
  int dim = 300;
  double lr = 0.001;
  int batch_size = 512;
  int max_len = 50;
  double dropout = 0.1;
  int epochs = 15;
  int hidden = 50;
  double val_fraction = 0.1;
  std::optional<uint64_t> seed;  // mandatory: no wall-clock default
  std::string out = ".";

  uint64_t require_seed() const {
    if (!seed.has_value()) {
      throw UsageError("a seed is required (config key \"seed\" or --seed)");
    }
    return *seed;
  }

  TrainConfig train_config() const {
    TrainConfig cfg;
    cfg.lr = static_cast<float>(lr);
    cfg.batch_size = batch_size;
    cfg.max_len = max_len;
    cfg.dropout_rate = static_cast<float>(dropout);
    cfg.epochs = epochs;
    cfg.seed = require_seed();
    cfg.val_fraction = val_fraction;
    cfg.scheme = scheme_from_name(scheme);
    cfg.hidden = hidden;
    return cfg;
  }
};

void apply_config_file(RunConfig& rc, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open config file: " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw DataError("config file " + path + ": " + e.what());
  }
  if (!doc.is_object()) throw DataError("config file must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    try {
      if (key == "data") rc.data = value.get<std::string>();
      else if (key == "text_column") rc.text_column = value.get<std::string>();
      else if (key == "label_column") rc.label_column = value.get<std::string>();
      else if (key == "labels") rc.labels = value.get<std::vector<std::string>>();
      else if (key == "scheme") rc.scheme = value.get<std::string>();
      else if (key == "embeddings") rc.embeddings = value.get<std::string>();
      else if (key == "dim") rc.dim = value.get<int>();
      else if (key == "lr") rc.lr = value.get<double>();
      else if (key == "batch_size") rc.batch_size = value.get<int>();
      else if (key == "max_len") rc.max_len = value.get<int>();
      else if (key == "dropout") rc.dropout = value.get<double>();
      else if (key == "epochs") rc.epochs = value.get<int>();
      else if (key == "hidden") rc.hidden = value.get<int>();
      else if (key == "val_fraction") rc.val_fraction = value.get<double>();
      else if (key == "seed") rc.seed = value.get<uint64_t>();
      else if (key == "out") rc.out = value.get<std::string>();
      else throw UsageError("config file: unknown key \"" + key + "\"");
    } catch (const json::exception& e) {
      throw DataError("config key \"" + key + "\": " + e.what());
    }
  }
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) {
    throw UsageError(std::string(what) + " path is required");
  }
  if (!fs::exists(path)) {
    throw DataError(std::string(what) + " not found: " + path);
  }
}

Dataset load_dataset(const RunConfig& rc) {
  require_file(rc.data, "dataset");
  if (rc.labels.empty()) {
    throw UsageError("label set is required (config key \"labels\" or --labels)");
  }
  return load_csv(rc.data, rc.text_column, rc.label_column, rc.labels);
}

PretrainedMap load_embeddings_for(const Dataset& ds, const RunConfig& rc,
                                  PreprocessScheme scheme) {
  require_file(rc.embeddings, "embedding file");
  std::unordered_set<std::string> wanted;
  for (const LabeledExample& ex : ds.examples) {
    for (const std::string& tok : apply_scheme(ex.text, scheme)) {
      wanted.insert(tok);
    }
  }
  return load_pretrained_filtered(rc.embeddings, rc.dim, wanted);
}

json metrics_to_json(const MetricsReport& report,
                     const std::vector<std::string>& label_names) {
  json per_class = json::array();
  for (size_t c = 0; c < report.per_class.size(); ++c) {
    const ClassMetrics& m = report.per_class[c];
    per_class.push_back({{"label", label_names[c]},
                         {"precision", m.precision},
                         {"recall", m.recall},
                         {"f1", m.f1},
                         {"support", m.support}});
  }
  return json{{"per_class", per_class},
              {"weighted_f1", report.weighted_f1},
              {"accuracy", report.accuracy},
              {"total", report.total}};
}

void print_metrics_table(const MetricsReport& report,
                         const std::vector<std::string>& label_names) {
  size_t width = 8;
  for (const std::string& l : label_names) width = std::max(width, l.size());
  std::printf("%-*s  %9s  %9s  %9s  %9s\n", static_cast<int>(width), "class",
              "precision", "recall", "f1", "support");
  for (size_t c = 0; c < report.per_class.size(); ++c) {
    const ClassMetrics& m = report.per_class[c];
    std::printf("%-*s  %9.4f  %9.4f  %9.4f  %9ld\n", static_cast<int>(width),
                label_names[c].c_str(), m.precision, m.recall, m.f1,
                m.support);
  }
  std::printf("weighted F1 %.4f  accuracy %.4f  total %ld\n",
              report.weighted_f1, report.accuracy, report.total);
}

void write_text_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write " + path.string());
  out << content;
}

// Stratified train/test split: per class, floor((1-train_frac)*n) examples
// go to the test side, chosen by a seeded shuffle.
void stratified_split(const Dataset& ds, double train_frac, uint64_t seed,
                      std::vector<int>& train_ids, std::vector<int>& test_ids) {
  if (train_frac <= 0.0 || train_frac >= 1.0) {
    throw UsageError("split fraction must be in (0,1)");
  }
  std::vector<std::vector<int>> by_class(static_cast<size_t>(ds.classes()));
  for (const LabeledExample& ex : ds.examples) {
    by_class[static_cast<size_t>(ex.label)].push_back(ex.id);
  }
  Rng rng(derive_seed(seed, "split"));
  for (std::vector<int>& ids : by_class) {
    rng.shuffle(ids);
    const size_t take = static_cast<size_t>(
        static_cast<double>(ids.size()) * (1.0 - train_frac));
    for (size_t i = 0; i < ids.size(); ++i) {
      (i < take ? test_ids : train_ids).push_back(ids[i]);
    }
  }
  std::sort(train_ids.begin(), train_ids.end());
  std::sort(test_ids.begin(), test_ids.end());
  if (test_ids.empty() || train_ids.empty()) {
    throw UsageError("split produced an empty side; adjust the fraction");
  }
}

// ---- subcommands -----------------------------------------------------------

int cmd_prep(const std::string& input, const std::string& scheme_str,
             const std::string& output, const std::string& text_column) {
  const PreprocessScheme scheme = scheme_from_name(scheme_str);
  require_file(input, "input csv");
  std::ifstream in(input, std::ios::binary);
  if (!in) throw DataError("cannot open " + input);
  std::ofstream out(output, std::ios::binary);
  if (!out) throw DataError("cannot write " + output);

  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw DataError("empty input file: " + input);
  const auto it = std::find(row.begin(), row.end(), text_column);
  if (it == row.end()) {
    throw DataError("schema error: column '" + text_column + "' not found in " +
                    input);
  }
  const size_t text_col = static_cast<size_t>(it - row.begin());
  write_csv_row(out, row);
  while (reader.next(row)) {
    if (row.size() == 1 && row[0].empty()) continue;  // stray blank line
    if (row.size() <= text_col) {
      throw DataError("row " + std::to_string(reader.record_number()) +
                      " of " + input + " has too few fields");
    }
    const TokenSeq tokens = apply_scheme(row[text_col], scheme);
    std::string joined;
    for (size_t i = 0; i < tokens.size(); ++i) {
      if (i > 0) joined += ' ';
      joined += tokens[i];
    }
    row[text_col] = joined;
    write_csv_row(out, row);
  }
  return 0;
}

int cmd_train(const RunConfig& rc) {
  const TrainConfig cfg = rc.train_config();
  const Dataset ds = load_dataset(rc);
  require_file(rc.embeddings, "embedding file");
  const PretrainedMap pretrained = load_embeddings_for(ds, rc, cfg.scheme);

  TrainedTwem trained =
      train_twem_on(ds, {}, pretrained, rc.dim, cfg, false);

  fs::create_directories(rc.out);
  const fs::path out_dir(rc.out);
  save_model(trained.model, (out_dir / "model.twem").string());

  json history = json::array();
  for (const EpochStats& e : trained.history.epochs) {
    history.push_back({{"train_loss", e.train_loss},
                       {"val_loss", e.val_loss},
                       {"val_weighted_f1", e.val_weighted_f1}});
  }
  const json doc{{"epochs", history},
                 {"selected_epoch", trained.history.selected_epoch},
                 {"val_from_train", trained.history.val_from_train},
                 {"dense_param_count", param_count(trained.model.net)},
                 {"seed", cfg.seed}};
  write_text_file(out_dir / "history.json", doc.dump(2) + "\n");

  std::printf("trained on %zu examples, V=%d D=%d H=%d C=%d\n",
              ds.examples.size(), trained.model.net.vocab_size,
              trained.model.net.dim, trained.model.net.hidden,
              trained.model.net.classes);
  std::printf("dense parameters (embeddings excluded): %ld\n",
              param_count(trained.model.net));
  if (!trained.history.epochs.empty()) {
    const int sel = trained.history.selected_epoch;
    std::printf("selected epoch %d (val loss %.6f)\n", sel,
                trained.history.epochs[static_cast<size_t>(sel)].val_loss);
  }
  std::printf("wrote %s and history.json\n",
              (out_dir / "model.twem").string().c_str());
  return 0;
}

int cmd_eval_cv(const RunConfig& rc, int k, const std::string& model_kind) {
  const uint64_t seed = rc.require_seed();
  const Dataset ds = load_dataset(rc);

  CvResult result;
  if (model_kind == "twem") {
    const TrainConfig cfg = rc.train_config();
    const PretrainedMap pretrained = load_embeddings_for(ds, rc, cfg.scheme);
    result = cross_validate(make_twem_trainer(pretrained, rc.dim, cfg), ds, k,
                            seed);
  } else if (model_kind == "baseline") {
    result = cross_validate(
        make_baseline_trainer(LogRegConfig{}, scheme_from_name(rc.scheme)),
        ds, k, seed);
  } else {
    throw UsageError("unknown model '" + model_kind +
                     "' (expected twem|baseline)");
  }

  json folds = json::array();
  for (const MetricsReport& fold : result.per_fold) {
    folds.push_back(metrics_to_json(fold, ds.label_names));
  }
  // top level carries the pooled metrics; per-fold reports sit under "folds"
  json doc = metrics_to_json(result.pooled, ds.label_names);
  doc["model"] = model_kind;
  doc["k"] = k;
  doc["seed"] = seed;
  doc["folds"] = folds;
  fs::create_directories(rc.out);
  write_text_file(fs::path(rc.out) / "cv_metrics.json", doc.dump(2) + "\n");

  std::printf("%d-fold cross validation, model=%s, dataset=%s\n", k,
              model_kind.c_str(), ds.name.c_str());
  print_metrics_table(result.pooled, ds.label_names);
  std::printf("wrote %s\n",
              (fs::path(rc.out) / "cv_metrics.json").string().c_str());
  return 0;
}

std::vector<int> train_and_predict_system(const std::string& kind,
                                          const RunConfig& rc,
                                          const Dataset& ds,
                                          const PretrainedMap* pretrained,
                                          const std::vector<int>& train_ids,
                                          const std::vector<int>& test_ids,
                                          uint64_t seed) {
  if (kind == "twem") {
    TrainConfig cfg = rc.train_config();
    return make_twem_trainer(*pretrained, rc.dim, cfg)(ds, train_ids,
                                                       test_ids, seed);
  }
  if (kind == "baseline") {
    return make_baseline_trainer(LogRegConfig{}, scheme_from_name(rc.scheme))(
        ds, train_ids, test_ids, seed);
  }
  throw UsageError("unknown system '" + kind + "' (expected twem|baseline)");
}

int cmd_significance(const RunConfig& rc, const std::string& system_a,
                     const std::string& system_b, double split, int rounds) {
  const uint64_t seed = rc.require_seed();
  const Dataset ds = load_dataset(rc);

  std::optional<PretrainedMap> pretrained;
  if (system_a == "twem" || system_b == "twem") {
    pretrained = load_embeddings_for(ds, rc, scheme_from_name(rc.scheme));
  }

  std::vector<int> train_ids, test_ids;
  stratified_split(ds, split, seed, train_ids, test_ids);

  const PretrainedMap* map = pretrained ? &*pretrained : nullptr;
  const std::vector<int> preds_a = train_and_predict_system(
      system_a, rc, ds, map, train_ids, test_ids, derive_seed(seed, "sys_a"));
  const std::vector<int> preds_b = train_and_predict_system(
      system_b, rc, ds, map, train_ids, test_ids, derive_seed(seed, "sys_b"));

  std::vector<int> golds;
  golds.reserve(test_ids.size());
  for (const int id : test_ids) {
    golds.push_back(ds.examples[static_cast<size_t>(id)].label);
  }
  const SignificanceResult result =
      ar_test(preds_a, preds_b, golds, rounds, seed);

  const double f1_a =
      metrics(confusion(golds, preds_a, ds.classes())).weighted_f1;
  const double f1_b =
      metrics(confusion(golds, preds_b, ds.classes())).weighted_f1;

  const json doc{{"system_a", system_a},
                 {"system_b", system_b},
                 {"train_fraction", split},
                 {"rounds", result.rounds},
                 {"seed", result.seed},
                 {"weighted_f1_a", f1_a},
                 {"weighted_f1_b", f1_b},
                 {"observed_difference", result.observed},
                 {"p_value", result.p_value}};
  fs::create_directories(rc.out);
  write_text_file(fs::path(rc.out) / "significance.json", doc.dump(2) + "\n");

  std::printf("%s weighted F1 %.4f vs %s weighted F1 %.4f on %zu test examples\n",
              system_a.c_str(), f1_a, system_b.c_str(), f1_b, golds.size());
  std::printf("observed |difference| %.4f, p = %.6g (R=%d)\n", result.observed,
              result.p_value, result.rounds);
  return 0;
}

int cmd_analyze(const std::string& model_path, const std::string& embeddings,
                const std::string& out_dir, int top_k, int pca_dim, int k,
                std::optional<uint64_t> seed_opt) {
  require_file(model_path, "model file");
  if (!seed_opt.has_value()) {
    throw UsageError("a seed is required (--seed)");
  }
  TwemModel model = load_model(model_path);

  std::optional<PretrainedMap> original;
  if (!embeddings.empty()) {
    require_file(embeddings, "embedding file");
    std::unordered_set<std::string> wanted(model.vocab.tokens.begin(),
                                           model.vocab.tokens.end());
    original = load_pretrained_filtered(embeddings, model.net.dim, wanted);
  }

  const ClusterReport report = cluster_report(
      model, top_k, pca_dim, k, *seed_opt, original ? &*original : nullptr);

  json clusters = json::array();
  for (size_t c = 0; c < report.cluster_tokens.size(); ++c) {
    clusters.push_back({{"cluster", c}, {"tokens", report.cluster_tokens[c]}});
  }
  const json doc{{"k", report.k},
                 {"top_k", report.top_k},
                 {"pca_dim", report.pca_dim},
                 {"pca_cumulative_variance", report.pca_cumulative_ratio},
                 {"inertia", report.inertia},
                 {"silhouette_projected", report.silhouette_projected},
                 {"silhouette_original", report.silhouette_original},
                 {"silhouette_ratio",
                  report.silhouette_original != 0.0
                      ? report.silhouette_projected / report.silhouette_original
                      : 0.0},
                 {"seed", *seed_opt},
                 {"tokens", report.tokens},
                 {"assignments", report.assignments},
                 {"clusters", clusters}};

  fs::create_directories(out_dir);
  write_text_file(fs::path(out_dir) / "clusters.json", doc.dump(2) + "\n");

  std::string md = "| Cluster | Tokens |\n|---|---|\n";
  for (size_t c = 0; c < report.cluster_tokens.size(); ++c) {
    md += "| cluster " + std::to_string(c) + " | ";
    for (size_t i = 0; i < report.cluster_tokens[c].size(); ++i) {
      if (i > 0) md += ", ";
      md += report.cluster_tokens[c][i];
    }
    md += " |\n";
  }
  md += "\nsilhouette (projected) " +
        std::to_string(report.silhouette_projected) +
        " vs (original) " + std::to_string(report.silhouette_original) + "\n";
  write_text_file(fs::path(out_dir) / "clusters.md", md);

  std::printf("clustered %d tokens into %d clusters (PCA %d dims, %.1f%% variance)\n",
              report.top_k, report.k, report.pca_dim,
              100.0 * report.pca_cumulative_ratio);
  std::printf("silhouette projected %.4f vs original %.4f\n",
              report.silhouette_projected, report.silhouette_original);
  return 0;
}

}  // namespace

int run_cli(const std::vector<std::string>& args) {
  CLI::App app{"TWEM text classification toolkit", "twem"};
  app.require_subcommand(1);

  RunConfig rc;
  std::string config_path;

  // prep
  auto* prep = app.add_subcommand("prep", "tokenize a CSV under a scheme");
  std::string prep_input, prep_output, prep_scheme = "tokenize";
  std::string prep_text_column = "text";
  prep->add_option("--input", prep_input, "input CSV")->required();
  prep->add_option("--output", prep_output, "output CSV")->required();
  prep->add_option("--scheme", prep_scheme,
                   "tokenize|tokenize-lower|replace|replace-lower");
  prep->add_option("--text-column", prep_text_column, "text column name");

  // shared config/flag plumbing for train-like commands
  const auto add_run_options = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--data", rc.data, "dataset CSV");
    cmd->add_option("--text-column", rc.text_column, "text column name");
    cmd->add_option("--label-column", rc.label_column, "label column name");
    cmd->add_option("--labels", rc.labels, "ordered label names")
        ->delimiter(',');
    cmd->add_option("--scheme", rc.scheme, "preprocessing scheme");
    cmd->add_option("--embeddings", rc.embeddings, "pretrained embedding file");
    cmd->add_option("--dim", rc.dim, "embedding dimension");
    cmd->add_option("--lr", rc.lr, "learning rate");
    cmd->add_option("--batch-size", rc.batch_size, "batch size");
    cmd->add_option("--max-len", rc.max_len, "padded sequence length");
    cmd->add_option("--dropout", rc.dropout, "dropout rate");
    cmd->add_option("--epochs", rc.epochs, "epoch budget");
    cmd->add_option("--hidden", rc.hidden, "hidden layer width");
    cmd->add_option("--val-fraction", rc.val_fraction, "validation holdout");
    cmd->add_option("--seed", rc.seed, "run seed (required)");
    cmd->add_option("--out", rc.out, "output directory");
  };

  auto* train = app.add_subcommand("train", "train a model on a dataset");
  add_run_options(train);

  auto* eval_cv =
      app.add_subcommand("eval-cv", "k-fold cross-validated evaluation");
  int cv_folds = 10;
  std::string cv_model = "twem";
  add_run_options(eval_cv);
  eval_cv->add_option("--folds", cv_folds, "number of folds");
  eval_cv->add_option("--model", cv_model, "twem|baseline");

  auto* significance = app.add_subcommand(
      "significance", "approximate randomization test between two systems");
  std::string sig_a = "twem", sig_b = "baseline";
  double sig_split = 0.75;
  int sig_rounds = 10000;
  add_run_options(significance);
  significance->add_option("--system-a", sig_a, "twem|baseline");
  significance->add_option("--system-b", sig_b, "twem|baseline");
  significance->add_option("--split", sig_split, "train fraction");
  significance->add_option("--rounds", sig_rounds, "permutation rounds");

  auto* analyze =
      app.add_subcommand("analyze", "embedding-space cluster analysis");
  std::string an_model, an_embeddings, an_out = ".";
  int an_top_k = 1000, an_pca = 75, an_k = 5;
  std::optional<uint64_t> an_seed;
  analyze->add_option("--model", an_model, "trained model file")->required();
  analyze->add_option("--embeddings", an_embeddings,
                      "pretrained file for the original-space comparison");
  analyze->add_option("--out", an_out, "output directory");
  analyze->add_option("--top-k", an_top_k, "most salient tokens to keep");
  analyze->add_option("--pca-dim", an_pca, "PCA output dimension");
  analyze->add_option("--clusters", an_k, "number of k-means clusters");
  analyze->add_option("--seed", an_seed, "run seed (required)");

  auto* fixture = app.add_subcommand(
      "make-fixture", "generate the synthetic separable corpus");
  std::string fx_out;
  std::optional<uint64_t> fx_seed;
  fixture->add_option("--out", fx_out, "output directory")->required();
  fixture->add_option("--seed", fx_seed, "generator seed (required)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  }

  try {
    // Config file first, then re-apply flags so they win.
    if (!config_path.empty()) {
      RunConfig from_file;
      apply_config_file(from_file, config_path);
      const RunConfig from_flags = rc;
      rc = from_file;
      CLI::App* active = app.get_subcommands().front();
      const auto flag_given = [&](const std::string& name) {
        return active->count(name) > 0;
      };
      if (flag_given("--data")) rc.data = from_flags.data;
      if (flag_given("--text-column")) rc.text_column = from_flags.text_column;
      if (flag_given("--label-column")) rc.label_column = from_flags.label_column;
      if (flag_given("--labels")) rc.labels = from_flags.labels;
      if (flag_given("--scheme")) rc.scheme = from_flags.scheme;
      if (flag_given("--embeddings")) rc.embeddings = from_flags.embeddings;
      if (flag_given("--dim")) rc.dim = from_flags.dim;
      if (flag_given("--lr")) rc.lr = from_flags.lr;
      if (flag_given("--batch-size")) rc.batch_size = from_flags.batch_size;
      if (flag_given("--max-len")) rc.max_len = from_flags.max_len;
      if (flag_given("--dropout")) rc.dropout = from_flags.dropout;
      if (flag_given("--epochs")) rc.epochs = from_flags.epochs;
      if (flag_given("--hidden")) rc.hidden = from_flags.hidden;
      if (flag_given("--val-fraction")) rc.val_fraction = from_flags.val_fraction;
      if (flag_given("--seed")) rc.seed = from_flags.seed;
      if (flag_given("--out")) rc.out = from_flags.out;
    }

    if (prep->parsed()) {
      return cmd_prep(prep_input, prep_scheme, prep_output, prep_text_column);
    }
    if (train->parsed()) return cmd_train(rc);
    if (eval_cv->parsed()) return cmd_eval_cv(rc, cv_folds, cv_model);
    if (significance->parsed()) {
      return cmd_significance(rc, sig_a, sig_b, sig_split, sig_rounds);
    }
    if (analyze->parsed()) {
      return cmd_analyze(an_model, an_embeddings, an_out, an_top_k, an_pca,
                         an_k, an_seed);
    }
    if (fixture->parsed()) {
      if (!fx_seed.has_value()) {
        throw UsageError("a seed is required (--seed)");
      }
      make_fixture(fx_out, *fx_seed);
      std::printf("wrote corpus.csv, embeddings.txt, config.json under %s\n",
                  fx_out.c_str());
      return 0;
    }
    throw UsageError("no subcommand given");
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const DataError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 3;
  }
}

}  // namespace twem
