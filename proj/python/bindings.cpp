#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

#include "twem/analysis.hpp"
#include "twem/baseline.hpp"
#include "twem/cli.hpp"
#include "twem/corpus.hpp"
#include "twem/embed.hpp"
#include "twem/eval.hpp"
#include "twem/fixture.hpp"
#include "twem/model.hpp"
#include "twem/pipeline.hpp"

namespace py = pybind11;
using namespace twem;

namespace {

Mat<double> to_mat(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw UsageError("matrix input must be non-empty");
  Mat<double> m(static_cast<int>(rows.size()),
                static_cast<int>(rows[0].size()));
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) {
      throw UsageError("matrix rows must have equal length");
    }
    for (size_t j = 0; j < rows[i].size(); ++j) {
      m.at(static_cast<int>(i), static_cast<int>(j)) = rows[i][j];
    }
  }
  return m;
}

PretrainedMap to_pretrained(const std::map<std::string, std::vector<double>>& d) {
  PretrainedMap map;
  for (const auto& [tok, vec] : d) {
    std::vector<float> row(vec.begin(), vec.end());
    map.emplace(tok, std::move(row));
  }
  return map;
}

py::dict metrics_dict(const MetricsReport& report,
                      const std::vector<std::string>& label_names) {
  py::list per_class;
  for (size_t c = 0; c < report.per_class.size(); ++c) {
    const ClassMetrics& cm = report.per_class[c];
    py::dict row;
    row["label"] = c < label_names.size() ? label_names[c] : std::to_string(c);
    row["precision"] = cm.precision;
    row["recall"] = cm.recall;
    row["f1"] = cm.f1;
    row["support"] = cm.support;
    per_class.append(row);
  }
  py::dict out;
  out["per_class"] = per_class;
  out["weighted_f1"] = report.weighted_f1;
  out["accuracy"] = report.accuracy;
  out["total"] = report.total;
  return out;
}

TrainConfig config_from_args(double lr, int batch_size, int max_len,
                             double dropout, int epochs, uint64_t seed,
                             double val_fraction, const std::string& scheme,
                             int hidden) {
  TrainConfig cfg;
  cfg.lr = static_cast<float>(lr);
  cfg.batch_size = batch_size;
  cfg.max_len = max_len;
  cfg.dropout_rate = static_cast<float>(dropout);
  cfg.epochs = epochs;
  cfg.seed = seed;
  cfg.val_fraction = val_fraction;
  cfg.scheme = scheme_from_name(scheme);
  cfg.hidden = hidden;
  return cfg;
}

py::dict history_dict(const TrainHistory& history) {
  py::list epochs;
  for (const EpochStats& e : history.epochs) {
    py::dict row;
    row["train_loss"] = e.train_loss;
    row["val_loss"] = e.val_loss;
    row["val_weighted_f1"] = e.val_weighted_f1;
    epochs.append(row);
  }
  py::dict out;
  out["epochs"] = epochs;
  out["selected_epoch"] = history.selected_epoch;
  return out;
}

}  // namespace

PYBIND11_MODULE(_twem, m) {
  m.doc() = "TWEM text classification toolkit";

  py::register_exception<UsageError>(m, "UsageError");
  py::register_exception<DataError>(m, "DataError");
  py::register_exception<NumericError>(m, "NumericError");

  // text
  m.def("tokenize", [](const std::string& text) { return tokenize_basic(text); },
        py::arg("text"));
  m.def(
      "apply_scheme",
      [](const std::string& text, const std::string& scheme) {
        return apply_scheme(text, scheme_from_name(scheme));
      },
      py::arg("text"), py::arg("scheme") = "tokenize");
  m.def(
      "char_ngrams",
      [](const std::string& text, int n_min, int n_max) {
        return char_ngrams(text, n_min, n_max).counts;
      },
      py::arg("text"), py::arg("n_min") = 1, py::arg("n_max") = 4);
  m.def(
      "word_unigrams",
      [](const TokenSeq& tokens) { return word_unigrams(tokens).counts; },
      py::arg("tokens"));

  // corpus
  py::class_<Dataset>(m, "Dataset")
      .def_readonly("name", &Dataset::name)
      .def_readonly("label_names", &Dataset::label_names)
      .def("__len__", [](const Dataset& ds) { return ds.examples.size(); })
      .def("texts",
           [](const Dataset& ds) {
             std::vector<std::string> out;
             for (const auto& ex : ds.examples) out.push_back(ex.text);
             return out;
           })
      .def("labels",
           [](const Dataset& ds) {
             std::vector<int> out;
             for (const auto& ex : ds.examples) out.push_back(ex.label);
             return out;
           })
      .def("class_counts", [](const Dataset& ds) { return class_counts(ds); });

  m.def("load_csv", &load_csv, py::arg("path"), py::arg("text_column"),
        py::arg("label_column"), py::arg("label_names"), py::arg("name") = "");
  m.def(
      "make_dataset",
      [](const std::vector<std::string>& texts, const std::vector<int>& labels,
         const std::vector<std::string>& label_names, const std::string& name) {
        if (texts.size() != labels.size()) {
          throw UsageError("texts and labels must have equal length");
        }
        Dataset ds;
        ds.name = name;
        ds.label_names = label_names;
        for (size_t i = 0; i < texts.size(); ++i) {
          if (labels[i] < 0 || labels[i] >= ds.classes()) {
            throw UsageError("label index out of range at " + std::to_string(i));
          }
          ds.examples.push_back(
              {static_cast<int>(i), texts[i], labels[i]});
        }
        return ds;
      },
      py::arg("texts"), py::arg("labels"), py::arg("label_names"),
      py::arg("name") = "inline");
  m.def(
      "stratified_folds",
      [](const Dataset& ds, int k, uint64_t seed) {
        std::vector<std::pair<std::vector<int>, std::vector<int>>> out;
        for (const FoldSplit& f : stratified_folds(ds, k, seed)) {
          out.emplace_back(f.train_ids, f.test_ids);
        }
        return out;
      },
      py::arg("dataset"), py::arg("k"), py::arg("seed"));

  // model
  py::class_<TwemModel, std::shared_ptr<TwemModel>>(m, "Model")
      .def_property_readonly("label_names",
                             [](const TwemModel& mdl) { return mdl.label_names; })
      .def_property_readonly("vocab_size",
                             [](const TwemModel& mdl) { return mdl.net.vocab_size; })
      .def_property_readonly("dim",
                             [](const TwemModel& mdl) { return mdl.net.dim; })
      .def_property_readonly(
          "dense_param_count",
          [](const TwemModel& mdl) { return param_count(mdl.net); })
      .def("predict",
           [](TwemModel& mdl, const std::vector<std::string>& texts) {
             std::vector<TokenSeq> tokens;
             for (const std::string& t : texts) {
               tokens.push_back(apply_scheme(t, mdl.scheme));
             }
             return predict_tokens(mdl, tokens);
           },
           py::arg("texts"))
      .def("predict_proba",
           [](TwemModel& mdl, const std::vector<std::string>& texts) {
             std::vector<TokenSeq> tokens;
             for (const std::string& t : texts) {
               tokens.push_back(apply_scheme(t, mdl.scheme));
             }
             Mat<float> probs;
             predict_tokens(mdl, tokens, &probs);
             std::vector<std::vector<double>> out(
                 static_cast<size_t>(probs.rows));
             for (int i = 0; i < probs.rows; ++i) {
               for (int j = 0; j < probs.cols; ++j) {
                 out[static_cast<size_t>(i)].push_back(
                     static_cast<double>(probs.at(i, j)));
               }
             }
             return out;
           },
           py::arg("texts"))
      .def("save", [](const TwemModel& mdl, const std::string& path) {
        save_model(mdl, path);
      });

  m.def(
      "train",
      [](const Dataset& ds, const std::map<std::string, std::vector<double>>&
                                pretrained,
         int dim, double lr, int batch_size, int max_len, double dropout,
         int epochs, uint64_t seed, double val_fraction,
         const std::string& scheme, int hidden, bool allow_unk) {
        const TrainConfig cfg =
            config_from_args(lr, batch_size, max_len, dropout, epochs, seed,
                             val_fraction, scheme, hidden);
        const PretrainedMap map = to_pretrained(pretrained);
        TrainedTwem trained = train_twem_on(ds, {}, map, dim, cfg, allow_unk);
        return py::make_tuple(
            std::make_shared<TwemModel>(std::move(trained.model)),
            history_dict(trained.history));
      },
      py::arg("dataset"), py::arg("pretrained"), py::arg("dim"),
      py::arg("lr") = 0.001, py::arg("batch_size") = 512,
      py::arg("max_len") = 50, py::arg("dropout") = 0.1,
      py::arg("epochs") = 15, py::arg("seed") = 0,
      py::arg("val_fraction") = 0.1, py::arg("scheme") = "tokenize",
      py::arg("hidden") = 50, py::arg("allow_unk") = false);

  m.def("load_model", [](const std::string& path) {
    return std::make_shared<TwemModel>(load_model(path));
  });

  m.def(
      "load_pretrained",
      [](const std::string& path, int dim) {
        std::map<std::string, std::vector<double>> out;
        for (const auto& [tok, vec] : load_pretrained(path, dim)) {
          out[tok] = std::vector<double>(vec.begin(), vec.end());
        }
        return out;
      },
      py::arg("path"), py::arg("dim"));

  // eval
  m.def(
      "metrics",
      [](const std::vector<int>& golds, const std::vector<int>& preds,
         int classes, const std::vector<std::string>& label_names) {
        return metrics_dict(metrics(confusion(golds, preds, classes)),
                            label_names);
      },
      py::arg("golds"), py::arg("preds"), py::arg("classes"),
      py::arg("label_names") = std::vector<std::string>{});
  m.def(
      "ar_test",
      [](const std::vector<int>& preds_a, const std::vector<int>& preds_b,
         const std::vector<int>& golds, int rounds, uint64_t seed) {
        const SignificanceResult r =
            ar_test(preds_a, preds_b, golds, rounds, seed);
        py::dict out;
        out["observed"] = r.observed;
        out["p_value"] = r.p_value;
        out["rounds"] = r.rounds;
        out["seed"] = r.seed;
        return out;
      },
      py::arg("preds_a"), py::arg("preds_b"), py::arg("golds"),
      py::arg("rounds") = 10000, py::arg("seed") = 0);

  m.def(
      "cross_validate",
      [](const Dataset& ds, const std::string& model_kind,
         const std::map<std::string, std::vector<double>>& pretrained, int dim,
         int k, uint64_t seed, double lr, int batch_size, int max_len,
         double dropout, int epochs, double val_fraction,
         const std::string& scheme, int hidden) {
        CvResult result;
        if (model_kind == "twem") {
          const TrainConfig cfg =
              config_from_args(lr, batch_size, max_len, dropout, epochs, seed,
                               val_fraction, scheme, hidden);
          const PretrainedMap map = to_pretrained(pretrained);
          result = cross_validate(make_twem_trainer(map, dim, cfg), ds, k, seed);
        } else if (model_kind == "baseline") {
          result = cross_validate(
              make_baseline_trainer(LogRegConfig{}, scheme_from_name(scheme)),
              ds, k, seed);
        } else {
          throw UsageError("model must be twem|baseline");
        }
        py::dict out;
        out["pooled"] = metrics_dict(result.pooled, ds.label_names);
        py::list folds;
        for (const MetricsReport& fold : result.per_fold) {
          folds.append(metrics_dict(fold, ds.label_names));
        }
        out["folds"] = folds;
        return out;
      },
      py::arg("dataset"), py::arg("model") = "twem",
      py::arg("pretrained") = std::map<std::string, std::vector<double>>{},
      py::arg("dim") = 300, py::arg("k") = 10, py::arg("seed") = 0,
      py::arg("lr") = 0.001, py::arg("batch_size") = 512,
      py::arg("max_len") = 50, py::arg("dropout") = 0.1,
      py::arg("epochs") = 15, py::arg("val_fraction") = 0.1,
      py::arg("scheme") = "tokenize", py::arg("hidden") = 50);

  // analysis
  m.def(
      "pca_fit",
      [](const std::vector<std::vector<double>>& rows, int out_dim) {
        const PcaResult r = pca_fit(to_mat(rows), out_dim);
        py::dict out;
        out["explained_ratio"] = r.model.explained_ratio;
        out["cumulative_ratio"] = r.cumulative_ratio;
        std::vector<std::vector<double>> transformed(
            static_cast<size_t>(r.transformed.rows));
        for (int i = 0; i < r.transformed.rows; ++i) {
          for (int j = 0; j < r.transformed.cols; ++j) {
            transformed[static_cast<size_t>(i)].push_back(r.transformed.at(i, j));
          }
        }
        out["transformed"] = transformed;
        return out;
      },
      py::arg("rows"), py::arg("out_dim"));
  m.def(
      "kmeans",
      [](const std::vector<std::vector<double>>& rows, int k, uint64_t seed) {
        const KmeansResult r = kmeans(to_mat(rows), k, seed);
        py::dict out;
        out["assignments"] = r.assignments;
        out["inertia"] = r.inertia;
        return out;
      },
      py::arg("rows"), py::arg("k"), py::arg("seed") = 0);
  m.def(
      "silhouette",
      [](const std::vector<std::vector<double>>& rows,
         const std::vector<int>& assignments) {
        return silhouette(to_mat(rows), assignments);
      },
      py::arg("rows"), py::arg("assignments"));

  // plumbing
  m.def("make_fixture", &make_fixture, py::arg("out_dir"), py::arg("seed"));
  m.def("run_cli", &run_cli, py::arg("args"),
        "Run a toolkit subcommand in-process; returns the exit code.");
}
