#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/evodag/functions.hpp"

namespace stacksa::evodag {

// Nearest centroid, Gaussian and multinomial naive Bayes over a dense,
// row-major feature block. Each model is a flat parameter vector so it can
// live in a node's theta block:
//   NearestCentroid  [c*F centroids]
//   GaussianNB       [c log-priors][c*F means][c*F variances]
//   MultinomialNB    [F shifts][c log-priors][c*F log-probabilities]
// Scores are one value per class, larger meaning more likely.

struct FeatureBlock {
  std::span<const double> X;  // n x F, row-major
  std::size_t features = 0;
  std::span<const int> y;  // class index of each of the first y.size() rows
  std::size_t classes = 0;

  const double* row(std::size_t r) const { return X.data() + r * features; }
};

namespace detail {

inline std::vector<double> class_counts(const FeatureBlock& b) {
  std::vector<double> n(b.classes, 0.0);
  for (int k : b.y) n[static_cast<std::size_t>(k)] += 1.0;
  return n;
}

inline std::vector<double> class_means(const FeatureBlock& b, const std::vector<double>& counts) {
  const std::size_t F = b.features;
  std::vector<double> mu(b.classes * F, 0.0);
  for (std::size_t r = 0; r < b.y.size(); ++r) {
    const double* x = b.row(r);
    double* m = mu.data() + static_cast<std::size_t>(b.y[r]) * F;
    for (std::size_t f = 0; f < F; ++f) m[f] += x[f];
  }
  for (std::size_t k = 0; k < b.classes; ++k)
    for (std::size_t f = 0; f < F; ++f) mu[k * F + f] /= counts[k];
  return mu;
}

}  // namespace detail

inline std::vector<double> fit_nearest_centroid(const FeatureBlock& b) {
  return detail::class_means(b, detail::class_counts(b));
}

// Negative Euclidean distance to each centroid.
inline void nearest_centroid_scores(std::span<const double> theta, std::size_t F, std::size_t c, const double* x,
                                    double* out) {
  for (std::size_t k = 0; k < c; ++k) {
    double d = 0.0;
    for (std::size_t f = 0; f < F; ++f) {
      const double diff = x[f] - theta[k * F + f];
      d += diff * diff;
    }
    out[k] = -std::sqrt(d);
  }
}

// Per-class variances get 1e-9 times the largest feature variance added.
inline std::vector<double> fit_gaussian_nb(const FeatureBlock& b) {
  const std::size_t F = b.features, c = b.classes, n = b.y.size();
  const auto counts = detail::class_counts(b);
  const auto mu = detail::class_means(b, counts);
  std::vector<double> var(c * F, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = b.row(r);
    const std::size_t k = static_cast<std::size_t>(b.y[r]);
    for (std::size_t f = 0; f < F; ++f) {
      const double d = x[f] - mu[k * F + f];
      var[k * F + f] += d * d;
    }
  }
  for (std::size_t k = 0; k < c; ++k)
    for (std::size_t f = 0; f < F; ++f) var[k * F + f] /= counts[k];
  double max_var = 0.0;
  for (std::size_t f = 0; f < F; ++f) {
    double mean = 0.0, sq = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += b.row(r)[f];
    mean /= static_cast<double>(n);
    for (std::size_t r = 0; r < n; ++r) sq += (b.row(r)[f] - mean) * (b.row(r)[f] - mean);
    max_var = std::max(max_var, sq / static_cast<double>(n));
  }
  const double eps = 1e-9 * (max_var > 0.0 ? max_var : 1.0);
  for (auto& v : var) v += eps;
  std::vector<double> theta;
  theta.reserve(c + 2 * c * F);
  for (std::size_t k = 0; k < c; ++k) theta.push_back(std::log(counts[k] / static_cast<double>(n)));
  theta.insert(theta.end(), mu.begin(), mu.end());
  theta.insert(theta.end(), var.begin(), var.end());
  return theta;
}

// Joint log-likelihood log P(k) + sum_f log N(x_f | mu_kf, var_kf).
inline void gaussian_nb_scores(std::span<const double> theta, std::size_t F, std::size_t c, const double* x,
                               double* out) {
  const double* prior = theta.data();
  const double* mu = prior + c;
  const double* var = mu + c * F;
  for (std::size_t k = 0; k < c; ++k) {
    double s = prior[k];
    for (std::size_t f = 0; f < F; ++f) {
      const double v = var[k * F + f];
      const double d = x[f] - mu[k * F + f];
      s -= 0.5 * std::log(2.0 * std::numbers::pi * v) + d * d / (2.0 * v);
    }
    out[k] = s;
  }
}

// Features are shifted by their training minimum so that they are
// nonnegative; Laplace smoothing with alpha = 1.
inline std::vector<double> fit_multinomial_nb(const FeatureBlock& b) {
  const std::size_t F = b.features, c = b.classes, n = b.y.size();
  std::vector<double> shift(F, 0.0);
  for (std::size_t f = 0; f < F; ++f) {
    double lo = b.row(0)[f];
    for (std::size_t r = 1; r < n; ++r) lo = std::min(lo, b.row(r)[f]);
    shift[f] = lo;
  }
  const auto counts = detail::class_counts(b);
  std::vector<double> mass(c * F, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* x = b.row(r);
    double* m = mass.data() + static_cast<std::size_t>(b.y[r]) * F;
    for (std::size_t f = 0; f < F; ++f) m[f] += x[f] - shift[f];
  }
  std::vector<double> theta(shift);
  for (std::size_t k = 0; k < c; ++k) theta.push_back(std::log(counts[k] / static_cast<double>(n)));
  for (std::size_t k = 0; k < c; ++k) {
    double total = 0.0;
    for (std::size_t f = 0; f < F; ++f) total += mass[k * F + f];
    for (std::size_t f = 0; f < F; ++f)
      theta.push_back(std::log((mass[k * F + f] + 1.0) / (total + static_cast<double>(F))));
  }
  return theta;
}

inline void multinomial_nb_scores(std::span<const double> theta, std::size_t F, std::size_t c, const double* x,
                                  double* out) {
  const double* shift = theta.data();
  const double* prior = shift + F;
  const double* logp = prior + c;
  for (std::size_t k = 0; k < c; ++k) {
    double s = prior[k];
    for (std::size_t f = 0; f < F; ++f) s += std::max(0.0, x[f] - shift[f]) * logp[k * F + f];
    out[k] = s;
  }
}

inline std::vector<double> fit_classifier(Func f, const FeatureBlock& b) {
  for (double n : detail::class_counts(b))
    if (n == 0.0) throw Error("every class needs at least one training row");
  switch (f) {
    case Func::NearestCentroid: return fit_nearest_centroid(b);
    case Func::GaussianNB: return fit_gaussian_nb(b);
    case Func::MultinomialNB: return fit_multinomial_nb(b);
    default: throw Error("not a classifier function");
  }
}

inline void classifier_scores(Func f, std::span<const double> theta, std::size_t F, std::size_t c, const double* x,
                              double* out) {
  switch (f) {
    case Func::NearestCentroid: return nearest_centroid_scores(theta, F, c, x, out);
    case Func::GaussianNB: return gaussian_nb_scores(theta, F, c, x, out);
    case Func::MultinomialNB: return multinomial_nb_scores(theta, F, c, x, out);
    default: throw Error("not a classifier function");
  }
}

inline std::size_t classifier_theta_size(Func f, std::size_t F, std::size_t c) {
  switch (f) {
    case Func::NearestCentroid: return c * F;
    case Func::GaussianNB: return c + 2 * c * F;
    case Func::MultinomialNB: return F + c + c * F;
    default: throw Error("not a classifier function");
  }
}

}  // namespace stacksa::evodag
