#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "twem/errors.hpp"
#include "twem/rng.hpp"

namespace twem {

// Row-major dense matrix. One code path serves both precisions: float for
// training, double for gradient verification.
template <typename S>
struct Mat {
  int rows = 0;
  int cols = 0;
  std::vector<S> v;

  Mat() = default;
  Mat(int r, int c) : rows(r), cols(c), v(static_cast<size_t>(r) * static_cast<size_t>(c), S(0)) {}

  S& at(int r, int c) { return v[static_cast<size_t>(r) * cols + c]; }
  const S& at(int r, int c) const { return v[static_cast<size_t>(r) * cols + c]; }
  S* row(int r) { return v.data() + static_cast<size_t>(r) * cols; }
  const S* row(int r) const { return v.data() + static_cast<size_t>(r) * cols; }
  size_t size() const { return v.size(); }

  void fill(S x) { std::fill(v.begin(), v.end(), x); }

  std::string shape() const {
    return std::to_string(rows) + "x" + std::to_string(cols);
  }

  bool all_finite() const {
    for (const S x : v) {
      if (!std::isfinite(static_cast<double>(x))) return false;
    }
    return true;
  }
};

template <typename S>
struct Param {
  Mat<S> val;
  Mat<S> grad;
  Mat<S> rms;  // RMSprop second-moment cache, elementwise >= 0

  Param() = default;
  Param(int r, int c) : val(r, c), grad(r, c), rms(r, c) {}

  void zero_grad() { grad.fill(S(0)); }
};

// ---- shape checks -------------------------------------------------------

template <typename S>
void require_same_shape(const Mat<S>& a, const Mat<S>& b, const char* what) {
  if (a.rows != b.rows || a.cols != b.cols) {
    throw NumericError(std::string(what) + ": shape " + a.shape() +
                       " vs " + b.shape());
  }
}

// ---- dense primitives ---------------------------------------------------

template <typename S>
Mat<S> matmul(const Mat<S>& a, const Mat<S>& b) {
  if (a.cols != b.rows) {
    throw NumericError("matmul: " + a.shape() + " incompatible with " +
                       b.shape());
  }
  Mat<S> out(a.rows, b.cols);
  for (int i = 0; i < a.rows; ++i) {
    const S* arow = a.row(i);
    S* orow = out.row(i);
    for (int k = 0; k < a.cols; ++k) {
      const S aik = arow[k];
      if (aik == S(0)) continue;
      const S* brow = b.row(k);
      for (int j = 0; j < b.cols; ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

// y = x W + b, bias broadcast over rows.
template <typename S>
Mat<S> linear_forward(const Mat<S>& x, const Mat<S>& w, const Mat<S>& b) {
  if (x.cols != w.rows) {
    throw NumericError("linear: input " + x.shape() +
                       " incompatible with weights " + w.shape());
  }
  if (b.rows != 1 || b.cols != w.cols) {
    throw NumericError("linear: bias " + b.shape() + " incompatible with " +
                       w.shape());
  }
  Mat<S> y = matmul(x, w);
  for (int i = 0; i < y.rows; ++i) {
    S* yrow = y.row(i);
    for (int j = 0; j < y.cols; ++j) yrow[j] += b.at(0, j);
  }
  return y;
}

// Accumulates dW += x^T dy and db += column sums of dy; writes dx = dy W^T
// when dx is non-null.
template <typename S>
void linear_backward(const Mat<S>& x, const Mat<S>& w, const Mat<S>& dy,
                     Mat<S>& dw, Mat<S>& db, Mat<S>* dx) {
  require_same_shape(dw, w, "linear_backward dW");
  for (int i = 0; i < x.rows; ++i) {
    const S* xrow = x.row(i);
    const S* gyrow = dy.row(i);
    for (int k = 0; k < x.cols; ++k) {
      const S xik = xrow[k];
      if (xik == S(0)) continue;
      S* dwrow = dw.row(k);
      for (int j = 0; j < dy.cols; ++j) dwrow[j] += xik * gyrow[j];
    }
    for (int j = 0; j < dy.cols; ++j) db.at(0, j) += gyrow[j];
  }
  if (dx != nullptr) {
    *dx = Mat<S>(x.rows, x.cols);
    for (int i = 0; i < dy.rows; ++i) {
      const S* gyrow = dy.row(i);
      S* dxrow = dx->row(i);
      for (int j = 0; j < dy.cols; ++j) {
        const S g = gyrow[j];
        if (g == S(0)) continue;
        for (int k = 0; k < w.rows; ++k) dxrow[k] += g * w.at(k, j);
      }
    }
  }
}

template <typename S>
Mat<S> relu(const Mat<S>& x) {
  Mat<S> y = x;
  for (S& e : y.v) {
    if (e < S(0)) e = S(0);
  }
  return y;
}

// dx = dy gated by the pre-activation sign (x > 0).
template <typename S>
Mat<S> relu_backward(const Mat<S>& x, const Mat<S>& dy) {
  require_same_shape(x, dy, "relu_backward");
  Mat<S> dx(x.rows, x.cols);
  for (size_t i = 0; i < x.size(); ++i) {
    dx.v[i] = x.v[i] > S(0) ? dy.v[i] : S(0);
  }
  return dx;
}

// ---- masked pooling over one example's T x D block ----------------------

template <typename S>
struct MaxPool {
  std::vector<S> out;        // D
  std::vector<int> argmax;   // D, row index receiving the gradient
};

template <typename S>
MaxPool<S> masked_max_pool(const Mat<S>& z, std::span<const uint8_t> mask) {
  if (static_cast<int>(mask.size()) != z.rows) {
    throw NumericError("max_pool: mask length " + std::to_string(mask.size()) +
                       " vs " + std::to_string(z.rows) + " rows");
  }
  bool any = false;
  for (const uint8_t m : mask) any = any || (m != 0);
  if (!any) throw NumericError("max_pool: all-zero mask");
  MaxPool<S> r;
  r.out.assign(static_cast<size_t>(z.cols), S(0));
  r.argmax.assign(static_cast<size_t>(z.cols), -1);
  for (int t = 0; t < z.rows; ++t) {
    if (!mask[static_cast<size_t>(t)]) continue;
    const S* zrow = z.row(t);
    for (int j = 0; j < z.cols; ++j) {
      // Ties break to the lowest row index.
      if (r.argmax[static_cast<size_t>(j)] < 0 ||
          zrow[j] > r.out[static_cast<size_t>(j)]) {
        r.out[static_cast<size_t>(j)] = zrow[j];
        r.argmax[static_cast<size_t>(j)] = t;
      }
    }
  }
  return r;
}

template <typename S>
void masked_max_pool_backward(const MaxPool<S>& pool, std::span<const S> dy,
                              Mat<S>& dz) {
  for (int j = 0; j < dz.cols; ++j) {
    dz.at(pool.argmax[static_cast<size_t>(j)], j) += dy[static_cast<size_t>(j)];
  }
}

// Mean over masked rows. Sums accumulate in double so the result does not
// depend on row order at float precision.
template <typename S>
std::vector<S> masked_mean_pool(const Mat<S>& z, std::span<const uint8_t> mask) {
  if (static_cast<int>(mask.size()) != z.rows) {
    throw NumericError("mean_pool: mask length " + std::to_string(mask.size()) +
                       " vs " + std::to_string(z.rows) + " rows");
  }
  int n = 0;
  std::vector<double> acc(static_cast<size_t>(z.cols), 0.0);
  for (int t = 0; t < z.rows; ++t) {
    if (!mask[static_cast<size_t>(t)]) continue;
    ++n;
    const S* zrow = z.row(t);
    for (int j = 0; j < z.cols; ++j) acc[static_cast<size_t>(j)] += static_cast<double>(zrow[j]);
  }
  if (n == 0) throw NumericError("mean_pool: all-zero mask");
  std::vector<S> out(static_cast<size_t>(z.cols));
  for (int j = 0; j < z.cols; ++j) {
    out[static_cast<size_t>(j)] = static_cast<S>(acc[static_cast<size_t>(j)] / n);
  }
  return out;
}

template <typename S>
void masked_mean_pool_backward(std::span<const uint8_t> mask,
                               std::span<const S> dy, Mat<S>& dz) {
  int n = 0;
  for (const uint8_t m : mask) n += m ? 1 : 0;
  const S inv = S(1) / static_cast<S>(n);
  for (int t = 0; t < dz.rows; ++t) {
    if (!mask[static_cast<size_t>(t)]) continue;
    S* drow = dz.row(t);
    for (int j = 0; j < dz.cols; ++j) drow[j] += dy[static_cast<size_t>(j)] * inv;
  }
}

// ---- softmax cross entropy ----------------------------------------------

template <typename S>
struct SoftmaxXent {
  Mat<S> probs;  // rows positive, each summing to 1
  S loss;        // mean negative log likelihood
};

template <typename S>
Mat<S> softmax(const Mat<S>& logits) {
  Mat<S> probs(logits.rows, logits.cols);
  for (int i = 0; i < logits.rows; ++i) {
    const S* lrow = logits.row(i);
    S* prow = probs.row(i);
    S m = lrow[0];
    for (int j = 1; j < logits.cols; ++j) m = std::max(m, lrow[j]);
    double sum = 0.0;
    for (int j = 0; j < logits.cols; ++j) {
      const double e = std::exp(static_cast<double>(lrow[j] - m));
      prow[j] = static_cast<S>(e);
      sum += e;
    }
    for (int j = 0; j < logits.cols; ++j) {
      prow[j] = static_cast<S>(static_cast<double>(prow[j]) / sum);
    }
  }
  return probs;
}

template <typename S>
SoftmaxXent<S> softmax_xent(const Mat<S>& logits, std::span<const int> labels) {
  if (logits.cols < 2) throw NumericError("softmax_xent: need >= 2 classes");
  if (static_cast<int>(labels.size()) != logits.rows) {
    throw NumericError("softmax_xent: " + std::to_string(labels.size()) +
                       " labels for " + std::to_string(logits.rows) + " rows");
  }
  SoftmaxXent<S> r;
  r.probs = Mat<S>(logits.rows, logits.cols);
  double total = 0.0;
  for (int i = 0; i < logits.rows; ++i) {
    const int y = labels[static_cast<size_t>(i)];
    if (y < 0 || y >= logits.cols) {
      throw NumericError("softmax_xent: label " + std::to_string(y) +
                         " out of range for C=" + std::to_string(logits.cols));
    }
    const S* lrow = logits.row(i);
    S* prow = r.probs.row(i);
    S m = lrow[0];
    for (int j = 1; j < logits.cols; ++j) m = std::max(m, lrow[j]);
    double sum = 0.0;
    for (int j = 0; j < logits.cols; ++j) {
      const double e = std::exp(static_cast<double>(lrow[j] - m));
      prow[j] = static_cast<S>(e);
      sum += e;
    }
    for (int j = 0; j < logits.cols; ++j) {
      prow[j] = static_cast<S>(static_cast<double>(prow[j]) / sum);
    }
    total += std::log(sum) - static_cast<double>(lrow[y] - m);
  }
  r.loss = static_cast<S>(total / logits.rows);
  return r;
}

// dlogits = (probs - onehot) / B
template <typename S>
Mat<S> softmax_xent_backward(const Mat<S>& probs, std::span<const int> labels) {
  Mat<S> dl = probs;
  const S inv_b = S(1) / static_cast<S>(probs.rows);
  for (int i = 0; i < probs.rows; ++i) {
    S* drow = dl.row(i);
    drow[labels[static_cast<size_t>(i)]] -= S(1);
    for (int j = 0; j < probs.cols; ++j) drow[j] *= inv_b;
  }
  return dl;
}

// ---- dropout -------------------------------------------------------------

template <typename S>
struct Dropout {
  Mat<S> y;
  std::vector<uint8_t> keep;  // empty when the op was an identity
  S scale = S(1);
};

// Inverted dropout: zero with probability `rate`, scale survivors by
// 1/(1-rate) so inference is a pure identity.
template <typename S>
Dropout<S> dropout_forward(const Mat<S>& x, double rate, bool training,
                           Rng& rng) {
  if (rate < 0.0 || rate >= 1.0) {
    throw UsageError("dropout: rate must be in [0,1)");
  }
  Dropout<S> r;
  if (!training || rate == 0.0) {
    r.y = x;
    return r;
  }
  r.scale = static_cast<S>(1.0 / (1.0 - rate));
  r.y = Mat<S>(x.rows, x.cols);
  r.keep.resize(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    const bool keep = rng.uniform() >= rate;
    r.keep[i] = keep ? 1 : 0;
    r.y.v[i] = keep ? x.v[i] * r.scale : S(0);
  }
  return r;
}

template <typename S>
Mat<S> dropout_backward(const Dropout<S>& d, const Mat<S>& dy) {
  if (d.keep.empty()) return dy;
  Mat<S> dx = dy;
  for (size_t i = 0; i < dx.size(); ++i) {
    dx.v[i] = d.keep[i] ? dx.v[i] * d.scale : S(0);
  }
  return dx;
}

// ---- RMSprop --------------------------------------------------------------

// cache <- rho*cache + (1-rho)*g^2 ; val <- val - lr*g/(sqrt(cache)+eps).
// The gradient is zeroed after the step.
template <typename S>
void rmsprop_step(Param<S>& p, S lr, S rho, S eps) {
  if (!(lr > S(0)) || !(rho > S(0) && rho < S(1)) || !(eps > S(0))) {
    throw UsageError("rmsprop: need lr>0, 0<rho<1, eps>0");
  }
  if (!p.grad.all_finite()) {
    throw NumericError("rmsprop: non-finite gradient for parameter of shape " +
                       p.val.shape());
  }
  for (size_t i = 0; i < p.val.size(); ++i) {
    const S g = p.grad.v[i];
    p.rms.v[i] = rho * p.rms.v[i] + (S(1) - rho) * g * g;
    p.val.v[i] -= lr * g / (std::sqrt(p.rms.v[i]) + eps);
    p.grad.v[i] = S(0);
  }
}

// ---- initialization --------------------------------------------------------

// Uniform(-sqrt(6/(I+O)), +sqrt(6/(I+O))); keeps early activations scaled.
template <typename S>
void init_dense(Mat<S>& w, Rng& rng) {
  const double limit = std::sqrt(6.0 / (w.rows + w.cols));
  for (S& e : w.v) e = static_cast<S>(rng.uniform(-limit, limit));
}

// ---- finite-difference gradient checking ----------------------------------

struct GradCheckParam {
  std::string name;
  Mat<double>* val;
  Mat<double>* grad;
};

// Compares analytic gradients from `loss_and_grad` (which must zero, run
// forward+backward and leave gradients populated) against central
// differences of `loss_only`. Checks every coordinate when
// max_coords_per_tensor <= 0, otherwise a seeded sample per tensor.
// Returns max over checked coordinates of |a-n| / max(|a|,|n|,1e-8).
inline double grad_check(const std::function<double()>& loss_only,
                         const std::function<double()>& loss_and_grad,
                         const std::vector<GradCheckParam>& params,
                         double epsilon, int max_coords_per_tensor = 0,
                         uint64_t seed = 0) {
  loss_and_grad();
  std::vector<Mat<double>> analytic;
  analytic.reserve(params.size());
  for (const GradCheckParam& p : params) analytic.push_back(*p.grad);

  Rng rng(derive_seed(seed, "grad_check"));
  double worst = 0.0;
  for (size_t pi = 0; pi < params.size(); ++pi) {
    Mat<double>& val = *params[pi].val;
    const size_t n = val.size();
    std::vector<size_t> coords;
    if (max_coords_per_tensor <= 0 ||
        n <= static_cast<size_t>(max_coords_per_tensor)) {
      coords.resize(n);
      for (size_t i = 0; i < n; ++i) coords[i] = i;
    } else {
      for (int i = 0; i < max_coords_per_tensor; ++i) {
        coords.push_back(static_cast<size_t>(rng.below(n)));
      }
    }
    for (const size_t c : coords) {
      const double saved = val.v[c];
      val.v[c] = saved + epsilon;
      const double up = loss_only();
      val.v[c] = saved - epsilon;
      const double down = loss_only();
      val.v[c] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double a = analytic[pi].v[c];
      const double rel =
          std::abs(a - numeric) /
          std::max({std::abs(a), std::abs(numeric), 1e-8});
      worst = std::max(worst, rel);
    }
  }
  return worst;
}

}  // namespace twem
