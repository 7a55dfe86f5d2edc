#include "twem/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>

#include "twem/csv.hpp"
#include "twem/errors.hpp"
#include "twem/rng.hpp"

namespace twem {
namespace {

bool blank(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  });
}

size_t column_index(const std::vector<std::string>& header,
                    const std::string& column, const std::string& path) {
  const auto it = std::find(header.begin(), header.end(), column);
  if (it == header.end()) {
    throw DataError("schema error: column '" + column + "' not found in " +
                    path);
  }
  return static_cast<size_t>(it - header.begin());
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& text_column,
                 const std::string& label_column,
                 const std::vector<std::string>& label_names,
                 const std::string& name) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open dataset file: " + path);

  CsvReader reader(in);
  std::vector<std::string> row;
  if (!reader.next(row)) throw DataError("empty dataset file: " + path);
  const size_t text_col = column_index(row, text_column, path);
  const size_t label_col = column_index(row, label_column, path);

  std::unordered_map<std::string, int> label_index;
  for (size_t i = 0; i < label_names.size(); ++i) {
    const auto [_, inserted] =
        label_index.emplace(label_names[i], static_cast<int>(i));
    if (!inserted) {
      throw UsageError("duplicate label name '" + label_names[i] + "'");
    }
  }

  Dataset ds;
  ds.name = name.empty() ? path : name;
  ds.label_names = label_names;
  while (reader.next(row)) {
    const long record = reader.record_number();
    if (row.size() == 1 && row[0].empty()) continue;  // stray blank line
    if (row.size() <= std::max(text_col, label_col)) {
      throw DataError("row " + std::to_string(record) + " of " + path +
                      " has " + std::to_string(row.size()) + " fields");
    }
    const std::string& text = row[text_col];
    if (blank(text)) {
      throw DataError("row " + std::to_string(record) + " of " + path +
                      " has empty text");
    }
    const auto it = label_index.find(row[label_col]);
    if (it == label_index.end()) {
      throw DataError("row " + std::to_string(record) + " of " + path +
                      ": unknown label '" + row[label_col] + "'");
    }
    LabeledExample ex;
    ex.id = static_cast<int>(ds.examples.size());
    ex.text = text;
    ex.label = it->second;
    ds.examples.push_back(std::move(ex));
  }
  return ds;
}

std::map<std::string, long> class_counts(const Dataset& ds) {
  std::map<std::string, long> counts;
  for (const std::string& label : ds.label_names) counts[label] = 0;
  for (const LabeledExample& ex : ds.examples) {
    ++counts[ds.label_names[static_cast<size_t>(ex.label)]];
  }
  return counts;
}

std::vector<FoldSplit> stratified_folds(const Dataset& ds, int k,
                                        uint64_t seed) {
  if (k < 2) throw UsageError("stratified_folds: k must be >= 2");

  std::vector<std::vector<int>> by_class(ds.label_names.size());
  for (const LabeledExample& ex : ds.examples) {
    by_class[static_cast<size_t>(ex.label)].push_back(ex.id);
  }
  for (size_t c = 0; c < by_class.size(); ++c) {
    if (by_class[c].size() < static_cast<size_t>(k)) {
      throw UsageError("stratified_folds: class '" + ds.label_names[c] +
                       "' has " + std::to_string(by_class[c].size()) +
                       " examples, fewer than k=" + std::to_string(k));
    }
  }

  Rng rng(derive_seed(seed, "folds"));
  std::vector<std::vector<int>> test_ids(static_cast<size_t>(k));
  for (std::vector<int>& ids : by_class) {
    rng.shuffle(ids);
    for (size_t j = 0; j < ids.size(); ++j) {
      test_ids[j % static_cast<size_t>(k)].push_back(ids[j]);
    }
  }

  std::vector<FoldSplit> folds(static_cast<size_t>(k));
  for (int f = 0; f < k; ++f) {
    FoldSplit& fold = folds[static_cast<size_t>(f)];
    fold.fold_index = f;
    fold.test_ids = test_ids[static_cast<size_t>(f)];
    std::sort(fold.test_ids.begin(), fold.test_ids.end());
    fold.train_ids.reserve(ds.examples.size() - fold.test_ids.size());
    size_t t = 0;
    for (const LabeledExample& ex : ds.examples) {
      if (t < fold.test_ids.size() && fold.test_ids[t] == ex.id) {
        ++t;
      } else {
        fold.train_ids.push_back(ex.id);
      }
    }
  }
  return folds;
}

}  // namespace twem
