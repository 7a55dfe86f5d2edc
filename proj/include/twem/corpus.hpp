#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace twem {

struct LabeledExample {
  int id = 0;
  std::string text;
  int label = 0;
};

// Immutable after load; safe to share read-only across fold workers.
struct Dataset {
  std::string name;
  std::vector<std::string> label_names;
  std::vector<LabeledExample> examples;

  int classes() const { return static_cast<int>(label_names.size()); }
  size_t size() const { return examples.size(); }
};

struct FoldSplit {
  int fold_index = 0;
  std::vector<int> train_ids;
  std::vector<int> test_ids;
};

// Loads an RFC 4180 CSV export with a header row. Labels are mapped to
// indices by position in label_names; matching is case-sensitive and exact.
// Rows with empty text (after trim) are data errors, as are unknown labels.
Dataset load_csv(const std::string& path, const std::string& text_column,
                 const std::string& label_column,
                 const std::vector<std::string>& label_names,
                 const std::string& name = "");

// Per-label example counts, keyed by label name; absent classes count 0.
std::map<std::string, long> class_counts(const Dataset& ds);

// Stratified k-fold assignment: per class, test-fold counts differ by at
// most 1 across folds; deterministic for a fixed seed. Every id appears in
// exactly one test fold.
std::vector<FoldSplit> stratified_folds(const Dataset& ds, int k,
                                        uint64_t seed);

}  // namespace twem
