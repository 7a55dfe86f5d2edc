#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "twem/embed.hpp"
#include "twem/model.hpp"
#include "twem/nn.hpp"

namespace twem {

// Vocabulary rows passed through the learned projection + ReLU. Analysis
// runs in double so reports do not depend on accumulation order at float
// precision.
struct ProjectedVocab {
  std::vector<std::string> tokens;
  Mat<double> original;   // V x D inputs to the projection
  Mat<double> projected;  // V x D, elementwise >= 0 after ReLU
};

ProjectedVocab project_vocab(const TwemModel& model);

struct SalientToken {
  std::string token;
  double score = 0.0;  // sum of projected components
  int row = 0;         // row into ProjectedVocab
};

// Descending by score; ties by token lexicographic order.
std::vector<SalientToken> salience_rank(const ProjectedVocab& pv, int top_k);

struct PcaModel {
  std::vector<double> mean;
  Mat<double> components;               // out_dim x in_dim, orthonormal rows
  std::vector<double> explained_ratio;  // descending, each >= 0, sum <= 1
};

struct PcaResult {
  PcaModel model;
  Mat<double> transformed;  // N x out_dim
  double cumulative_ratio = 0.0;
};

// Covariance PCA via cyclic Jacobi eigendecomposition of the mean-centered
// data. No variance scaling.
PcaResult pca_fit(const Mat<double>& x, int out_dim);

struct KmeansResult {
  std::vector<int> assignments;
  Mat<double> centroids;
  double inertia = 0.0;
};

// k-means++ seeding, Lloyd iterations, empty clusters reseeded to the
// farthest point. Inertia is non-increasing across iterations.
KmeansResult kmeans(const Mat<double>& x, int k, uint64_t seed,
                    int max_iter = 100, double tol = 1e-6);

// Mean silhouette coefficient, Euclidean metric; singleton clusters score 0.
double silhouette(const Mat<double>& x, const std::vector<int>& assignments);

struct ClusterReport {
  int k = 0;
  int top_k = 0;
  int pca_dim = 0;
  double pca_cumulative_ratio = 0.0;
  std::vector<std::string> tokens;        // the analyzed (salient) tokens
  std::vector<double> scores;             // their salience scores
  std::vector<int> assignments;
  double inertia = 0.0;
  double silhouette_projected = 0.0;
  double silhouette_original = 0.0;
  std::vector<std::vector<std::string>> cluster_tokens;  // samples per cluster
};

// Full pipeline: project -> salience top_k -> PCA(pca_dim) -> kmeans(k) ->
// silhouette, plus an independent clustering of the same tokens in the
// original embedding space (same seed) for the comparison ratio. When
// `original_override` is given, tokens found there use those vectors as the
// original space (e.g. the pretrained file), others fall back to the model
// rows.
ClusterReport cluster_report(const TwemModel& model, int top_k, int pca_dim,
                             int k, uint64_t seed,
                             const PretrainedMap* original_override = nullptr);

}  // namespace twem
