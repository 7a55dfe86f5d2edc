#include "twem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "twem/errors.hpp"

namespace twem {
namespace {

double sq_dist(const double* a, const double* b, int d) {
  double s = 0.0;
  for (int j = 0; j < d; ++j) {
    const double diff = a[j] - b[j];
    s += diff * diff;
  }
  return s;
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
// eigenvalues (descending) and matching eigenvectors as rows.
void jacobi_eigen(Mat<double> a, std::vector<double>& values,
                  Mat<double>& vectors) {
  const int n = a.rows;
  vectors = Mat<double>(n, n);
  for (int i = 0; i < n; ++i) vectors.at(i, i) = 1.0;

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double scale = 0.0;
    for (int p = 0; p < n; ++p) {
      scale += a.at(p, p) * a.at(p, p);
      for (int q = p + 1; q < n; ++q) off += a.at(p, q) * a.at(p, q);
    }
    if (off <= 1e-26 * std::max(scale, 1e-300)) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a.at(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double theta = (a.at(q, q) - a.at(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int i = 0; i < n; ++i) {
          const double aip = a.at(i, p);
          const double aiq = a.at(i, q);
          a.at(i, p) = c * aip - s * aiq;
          a.at(i, q) = s * aip + c * aiq;
        }
        for (int i = 0; i < n; ++i) {
          const double api = a.at(p, i);
          const double aqi = a.at(q, i);
          a.at(p, i) = c * api - s * aqi;
          a.at(q, i) = s * api + c * aqi;
        }
        for (int i = 0; i < n; ++i) {
          const double vip = vectors.at(p, i);
          const double viq = vectors.at(q, i);
          vectors.at(p, i) = c * vip - s * viq;
          vectors.at(q, i) = s * vip + c * viq;
        }
      }
    }
  }

  values.resize(static_cast<size_t>(n));
  std::vector<int> order(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    values[static_cast<size_t>(i)] = a.at(i, i);
    order[static_cast<size_t>(i)] = i;
  }
  std::stable_sort(order.begin(), order.end(), [&](int x, int y) {
    return values[static_cast<size_t>(x)] > values[static_cast<size_t>(y)];
  });
  std::vector<double> sorted_values(static_cast<size_t>(n));
  Mat<double> sorted_vectors(n, n);
  for (int i = 0; i < n; ++i) {
    sorted_values[static_cast<size_t>(i)] = values[static_cast<size_t>(order[static_cast<size_t>(i)])];
    for (int j = 0; j < n; ++j) {
      sorted_vectors.at(i, j) = vectors.at(order[static_cast<size_t>(i)], j);
    }
  }
  values = std::move(sorted_values);
  vectors = std::move(sorted_vectors);
}

}  // namespace

ProjectedVocab project_vocab(const TwemModel& model) {
  const Vocabulary& vocab = model.vocab;
  ProjectedVocab pv;
  for (int i = 0; i < vocab.size(); ++i) {
    if (i == Vocabulary::kPad || i == vocab.unk_index) continue;
    pv.tokens.push_back(vocab.tokens[static_cast<size_t>(i)]);
  }
  const int d = model.net.dim;
  const int n = static_cast<int>(pv.tokens.size());
  pv.original = Mat<double>(n, d);
  int row = 0;
  for (int i = 0; i < vocab.size(); ++i) {
    if (i == Vocabulary::kPad || i == vocab.unk_index) continue;
    const float* src = model.net.emb.val.row(i);
    for (int j = 0; j < d; ++j) {
      pv.original.at(row, j) = static_cast<double>(src[j]);
    }
    ++row;
  }
  // relu(x W + b) per token, in double.
  Mat<double> w(d, d);
  for (size_t i = 0; i < w.size(); ++i) {
    w.v[i] = static_cast<double>(model.net.proj_w.val.v[i]);
  }
  Mat<double> b(1, d);
  for (int j = 0; j < d; ++j) {
    b.at(0, j) = static_cast<double>(model.net.proj_b.val.at(0, j));
  }
  pv.projected = relu(linear_forward(pv.original, w, b));
  return pv;
}

std::vector<SalientToken> salience_rank(const ProjectedVocab& pv, int top_k) {
  const int n = pv.projected.rows;
  if (top_k < 0 || top_k > n) {
    throw UsageError("salience_rank: top_k must be in [0, V]");
  }
  std::vector<SalientToken> ranked(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    SalientToken& t = ranked[static_cast<size_t>(i)];
    t.token = pv.tokens[static_cast<size_t>(i)];
    t.row = i;
    const double* row = pv.projected.row(i);
    double sum = 0.0;
    for (int j = 0; j < pv.projected.cols; ++j) sum += row[j];
    t.score = sum;
  }
  std::sort(ranked.begin(), ranked.end(),
            [](const SalientToken& a, const SalientToken& b) {
              if (a.score != b.score) return a.score > b.score;
              return a.token < b.token;
            });
  ranked.resize(static_cast<size_t>(top_k));
  return ranked;
}

PcaResult pca_fit(const Mat<double>& x, int out_dim) {
  const int n = x.rows;
  const int d = x.cols;
  if (out_dim < 1) throw UsageError("pca_fit: out_dim must be >= 1");
  if (out_dim > d) throw UsageError("pca_fit: out_dim exceeds input dim");
  if (n <= out_dim) {
    throw NumericError("pca_fit: need more rows than out_dim, got " +
                       std::to_string(n));
  }

  PcaResult result;
  result.model.mean.assign(static_cast<size_t>(d), 0.0);
  for (int i = 0; i < n; ++i) {
    const double* row = x.row(i);
    for (int j = 0; j < d; ++j) result.model.mean[static_cast<size_t>(j)] += row[j];
  }
  for (double& m : result.model.mean) m /= static_cast<double>(n);

  Mat<double> centered(n, d);
  for (int i = 0; i < n; ++i) {
    const double* src = x.row(i);
    double* dst = centered.row(i);
    for (int j = 0; j < d; ++j) dst[j] = src[j] - result.model.mean[static_cast<size_t>(j)];
  }

  Mat<double> cov(d, d);
  for (int i = 0; i < n; ++i) {
    const double* row = centered.row(i);
    for (int a = 0; a < d; ++a) {
      const double ra = row[a];
      if (ra == 0.0) continue;
      double* crow = cov.row(a);
      for (int bcol = a; bcol < d; ++bcol) crow[bcol] += ra * row[bcol];
    }
  }
  const double inv = 1.0 / static_cast<double>(n - 1);
  for (int a = 0; a < d; ++a) {
    for (int bcol = a; bcol < d; ++bcol) {
      cov.at(a, bcol) *= inv;
      cov.at(bcol, a) = cov.at(a, bcol);
    }
  }

  std::vector<double> eigenvalues;
  Mat<double> eigenvectors;
  jacobi_eigen(cov, eigenvalues, eigenvectors);

  double total_var = 0.0;
  for (double& v : eigenvalues) {
    if (v < 0.0) v = 0.0;  // numerical noise on rank-deficient input
    total_var += v;
  }

  result.model.components = Mat<double>(out_dim, d);
  result.model.explained_ratio.resize(static_cast<size_t>(out_dim));
  for (int i = 0; i < out_dim; ++i) {
    // Deterministic sign: largest-magnitude entry positive.
    int peak = 0;
    for (int j = 1; j < d; ++j) {
      if (std::abs(eigenvectors.at(i, j)) >
          std::abs(eigenvectors.at(i, peak))) {
        peak = j;
      }
    }
    const double sign = eigenvectors.at(i, peak) < 0.0 ? -1.0 : 1.0;
    for (int j = 0; j < d; ++j) {
      result.model.components.at(i, j) = sign * eigenvectors.at(i, j);
    }
    result.model.explained_ratio[static_cast<size_t>(i)] =
        total_var > 0.0 ? eigenvalues[static_cast<size_t>(i)] / total_var : 0.0;
  }

  result.transformed = Mat<double>(n, out_dim);
  for (int i = 0; i < n; ++i) {
    const double* row = centered.row(i);
    for (int cpt = 0; cpt < out_dim; ++cpt) {
      double s = 0.0;
      const double* comp = result.model.components.row(cpt);
      for (int j = 0; j < d; ++j) s += row[j] * comp[j];
      result.transformed.at(i, cpt) = s;
    }
  }
  for (const double r : result.model.explained_ratio) {
    result.cumulative_ratio += r;
  }
  return result;
}

KmeansResult kmeans(const Mat<double>& x, int k, uint64_t seed, int max_iter,
                    double tol) {
  const int n = x.rows;
  const int d = x.cols;
  if (k < 1) throw UsageError("kmeans: k must be >= 1");
  if (n < k) {
    throw NumericError("kmeans: " + std::to_string(n) + " points for k=" +
                       std::to_string(k));
  }

  Rng rng(derive_seed(seed, "kmeans"));
  KmeansResult result;
  result.centroids = Mat<double>(k, d);

  // k-means++ seeding
  std::vector<int> chosen;
  chosen.push_back(static_cast<int>(rng.below(static_cast<uint64_t>(n))));
  std::vector<double> dist_sq(static_cast<size_t>(n),
                              std::numeric_limits<double>::infinity());
  while (static_cast<int>(chosen.size()) < k) {
    const double* last = x.row(chosen.back());
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      dist_sq[static_cast<size_t>(i)] = std::min(
          dist_sq[static_cast<size_t>(i)], sq_dist(x.row(i), last, d));
      total += dist_sq[static_cast<size_t>(i)];
    }
    int pick = -1;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (int i = 0; i < n; ++i) {
        acc += dist_sq[static_cast<size_t>(i)];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    }
    if (pick < 0) pick = static_cast<int>(rng.below(static_cast<uint64_t>(n)));
    chosen.push_back(pick);
  }
  for (int c = 0; c < k; ++c) {
    const double* src = x.row(chosen[static_cast<size_t>(c)]);
    double* dst = result.centroids.row(c);
    for (int j = 0; j < d; ++j) dst[j] = src[j];
  }

  result.assignments.assign(static_cast<size_t>(n), 0);
  double prev_inertia = std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < max_iter; ++iter) {
    // assign
    double inertia = 0.0;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = sq_dist(x.row(i), result.centroids.row(0), d);
      for (int c = 1; c < k; ++c) {
        const double dc = sq_dist(x.row(i), result.centroids.row(c), d);
        if (dc < best_d) {
          best_d = dc;
          best = c;
        }
      }
      result.assignments[static_cast<size_t>(i)] = best;
      inertia += best_d;
    }
    // empty clusters take the point farthest from its centroid
    std::vector<int> counts(static_cast<size_t>(k), 0);
    for (const int a : result.assignments) ++counts[static_cast<size_t>(a)];
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] > 0) continue;
      int farthest = 0;
      double far_d = -1.0;
      for (int i = 0; i < n; ++i) {
        const double di = sq_dist(
            x.row(i),
            result.centroids.row(result.assignments[static_cast<size_t>(i)]),
            d);
        if (di > far_d &&
            counts[static_cast<size_t>(
                result.assignments[static_cast<size_t>(i)])] > 1) {
          far_d = di;
          farthest = i;
        }
      }
      --counts[static_cast<size_t>(
          result.assignments[static_cast<size_t>(farthest)])];
      result.assignments[static_cast<size_t>(farthest)] = c;
      ++counts[static_cast<size_t>(c)];
    }
    // update
    result.centroids.fill(0.0);
    for (int i = 0; i < n; ++i) {
      const double* src = x.row(i);
      double* dst =
          result.centroids.row(result.assignments[static_cast<size_t>(i)]);
      for (int j = 0; j < d; ++j) dst[j] += src[j];
    }
    for (int c = 0; c < k; ++c) {
      double* row = result.centroids.row(c);
      for (int j = 0; j < d; ++j) row[j] /= counts[static_cast<size_t>(c)];
    }
    result.inertia = inertia;
    if (std::isfinite(prev_inertia) &&
        prev_inertia - inertia <= tol * std::max(prev_inertia, 1e-12)) {
      break;
    }
    prev_inertia = inertia;
  }

  // final inertia against the final centroids
  double inertia = 0.0;
  for (int i = 0; i < n; ++i) {
    int best = 0;
    double best_d = sq_dist(x.row(i), result.centroids.row(0), d);
    for (int c = 1; c < k; ++c) {
      const double dc = sq_dist(x.row(i), result.centroids.row(c), d);
      if (dc < best_d) {
        best_d = dc;
        best = c;
      }
    }
    result.assignments[static_cast<size_t>(i)] = best;
    inertia += best_d;
  }
  result.inertia = inertia;
  return result;
}

double silhouette(const Mat<double>& x, const std::vector<int>& assignments) {
  const int n = x.rows;
  if (static_cast<int>(assignments.size()) != n) {
    throw UsageError("silhouette: assignment length mismatch");
  }
  int k = 0;
  for (const int a : assignments) k = std::max(k, a + 1);
  std::vector<int> counts(static_cast<size_t>(k), 0);
  for (const int a : assignments) ++counts[static_cast<size_t>(a)];
  int populated = 0;
  for (const int c : counts) populated += c > 0 ? 1 : 0;
  if (populated < 2) {
    throw NumericError("silhouette: need at least 2 populated clusters");
  }

  double total = 0.0;
  std::vector<double> mean_dist(static_cast<size_t>(k));
  for (int i = 0; i < n; ++i) {
    const int own = assignments[static_cast<size_t>(i)];
    if (counts[static_cast<size_t>(own)] == 1) {
      continue;  // singleton: coefficient 0
    }
    std::fill(mean_dist.begin(), mean_dist.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      mean_dist[static_cast<size_t>(assignments[static_cast<size_t>(j)])] +=
          std::sqrt(sq_dist(x.row(i), x.row(j), x.cols));
    }
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<size_t>(c)] == 0) continue;
      if (c == own) {
        a = mean_dist[static_cast<size_t>(c)] /
            static_cast<double>(counts[static_cast<size_t>(c)] - 1);
      } else {
        b = std::min(b, mean_dist[static_cast<size_t>(c)] /
                            static_cast<double>(counts[static_cast<size_t>(c)]));
      }
    }
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

ClusterReport cluster_report(const TwemModel& model, int top_k, int pca_dim,
                             int k, uint64_t seed,
                             const PretrainedMap* original_override) {
  const ProjectedVocab pv = project_vocab(model);
  const int v = pv.projected.rows;
  top_k = std::min(top_k, v);
  if (top_k < 2 || k < 2) {
    throw NumericError("cluster_report: need at least 2 tokens and 2 clusters");
  }
  const std::vector<SalientToken> salient = salience_rank(pv, top_k);

  ClusterReport report;
  report.k = k;
  report.top_k = top_k;

  const int d = pv.projected.cols;
  Mat<double> proj_x(top_k, d);
  Mat<double> orig_x(top_k, d);
  for (int i = 0; i < top_k; ++i) {
    const SalientToken& t = salient[static_cast<size_t>(i)];
    report.tokens.push_back(t.token);
    report.scores.push_back(t.score);
    for (int j = 0; j < d; ++j) {
      proj_x.at(i, j) = pv.projected.at(t.row, j);
      orig_x.at(i, j) = pv.original.at(t.row, j);
    }
    if (original_override != nullptr) {
      const auto it = original_override->find(t.token);
      if (it != original_override->end() &&
          static_cast<int>(it->second.size()) == d) {
        for (int j = 0; j < d; ++j) {
          orig_x.at(i, j) = static_cast<double>(it->second[static_cast<size_t>(j)]);
        }
      }
    }
  }

  // pca_fit needs strictly more rows than components
  report.pca_dim = std::min(pca_dim, std::min(top_k - 1, d));
  const PcaResult proj_pca = pca_fit(proj_x, report.pca_dim);
  report.pca_cumulative_ratio = proj_pca.cumulative_ratio;
  const KmeansResult proj_km = kmeans(proj_pca.transformed, k, seed);
  report.assignments = proj_km.assignments;
  report.inertia = proj_km.inertia;
  report.silhouette_projected =
      silhouette(proj_pca.transformed, proj_km.assignments);

  const PcaResult orig_pca = pca_fit(orig_x, report.pca_dim);
  const KmeansResult orig_km = kmeans(orig_pca.transformed, k, seed);
  report.silhouette_original =
      silhouette(orig_pca.transformed, orig_km.assignments);

  report.cluster_tokens.resize(static_cast<size_t>(k));
  for (int i = 0; i < top_k; ++i) {
    std::vector<std::string>& bucket =
        report.cluster_tokens[static_cast<size_t>(report.assignments[static_cast<size_t>(i)])];
    if (bucket.size() < 15) bucket.push_back(report.tokens[static_cast<size_t>(i)]);
  }
  return report;
}

}  // namespace twem
