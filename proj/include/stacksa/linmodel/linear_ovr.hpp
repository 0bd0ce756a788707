#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/parallel.hpp"
#include "stacksa/common/rng.hpp"
#include "stacksa/common/types.hpp"
#include "stacksa/textproc/sparse.hpp"

namespace stacksa {

struct LinearSvmParams {
  double C = 1.0;
  int max_iter = 1000;
  double tol = 1e-4;
  std::uint64_t seed = 0;
};

// Per-class dual objective after every epoch, for diagnostics.
struct SvmTrace {
  std::vector<std::vector<double>> dual_objective;
  std::vector<int> epochs;
};

namespace detail {

inline double dot(std::span<const double> w, const SparseVector& x) {
  double s = 0.0;
  for (const auto& e : x.entries) s += w[e.index] * e.weight;
  return s;
}

inline double squared_norm(const SparseVector& x) {
  double s = 0.0;
  for (const auto& e : x.entries) s += e.weight * e.weight;
  return s;
}

struct BinarySolution {
  std::vector<double> w;
  double bias = 0.0;
  std::vector<double> objective;
  int epochs = 0;
};

// Dual coordinate descent for the L2-regularized hinge-loss SVM
//   min_w 1/2 |w|^2 + C sum_i max(0, 1 - y_i (w.x_i + b))
// with the bias folded in as a constant feature of value 1.
inline BinarySolution train_binary(std::span<const SparseVector> X, std::span<const int> y,
                                   std::size_t dim, const LinearSvmParams& p, std::uint64_t seed) {
  const std::size_t n = X.size();
  BinarySolution sol;
  sol.w.assign(dim, 0.0);
  std::vector<double> alpha(n, 0.0);
  std::vector<double> qii(n);
  for (std::size_t i = 0; i < n; ++i) qii[i] = squared_norm(X[i]) + 1.0;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  double alpha_sum = 0.0;

  for (int epoch = 0; epoch < p.max_iter; ++epoch) {
    rng.shuffle(order);
    double pg_max = -HUGE_VAL, pg_min = HUGE_VAL;
    for (std::size_t i : order) {
      const double yi = y[i];
      const double g = yi * (dot(sol.w, X[i]) + sol.bias) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0)
        pg = std::min(g, 0.0);
      else if (alpha[i] >= p.C)
        pg = std::max(g, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (std::abs(pg) > 1e-12) {
        const double old = alpha[i];
        alpha[i] = std::clamp(old - g / qii[i], 0.0, p.C);
        const double d = (alpha[i] - old) * yi;
        for (const auto& e : X[i].entries) sol.w[e.index] += d * e.weight;
        sol.bias += d;
        alpha_sum += alpha[i] - old;
      }
    }
    double wnorm = sol.bias * sol.bias;
    for (double v : sol.w) wnorm += v * v;
    sol.objective.push_back(0.5 * wnorm - alpha_sum);
    sol.epochs = epoch + 1;
    if (pg_max - pg_min < p.tol) break;
  }
  return sol;
}

}  // namespace detail

// One-vs-rest linear max-margin classifier. Decision values are raw margins,
// aligned with the sorted class order.
class LinearOvrModel {
 public:
  LinearOvrModel() = default;

  LinearOvrModel(std::vector<Label> classes, std::vector<std::vector<double>> weights,
                 std::vector<double> bias, std::size_t feature_dim)
      : classes_(std::move(classes)),
        weights_(std::move(weights)),
        bias_(std::move(bias)),
        feature_dim_(feature_dim) {
    if (weights_.size() != classes_.size() || bias_.size() != classes_.size())
      throw Error("one weight vector and bias per class required");
    if (!std::is_sorted(classes_.begin(), classes_.end()) ||
        std::adjacent_find(classes_.begin(), classes_.end()) != classes_.end())
      throw Error("class list must be sorted and duplicate-free");
    for (const auto& w : weights_) {
      if (w.size() != feature_dim_) throw Error("weight vector width differs from feature dimension");
      for (double v : w)
        if (!std::isfinite(v)) throw Error("non-finite weight");
    }
  }

  const std::vector<Label>& classes() const { return classes_; }
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<double>& bias() const { return bias_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t num_classes() const { return classes_.size(); }

  DenseVector decision_function(const SparseVector& x) const {
    if (x.dimension != feature_dim_) throw Error("feature dimension mismatch");
    DenseVector out(classes_.size());
    for (std::size_t k = 0; k < classes_.size(); ++k) out[k] = detail::dot(weights_[k], x) + bias_[k];
    return out;
  }

  DenseVector decision_function(std::span<const double> x) const {
    if (x.size() != feature_dim_) throw Error("feature dimension mismatch");
    DenseVector out(classes_.size());
    for (std::size_t k = 0; k < classes_.size(); ++k)
      out[k] = std::inner_product(x.begin(), x.end(), weights_[k].begin(), 0.0) + bias_[k];
    return out;
  }

  template <class Row>
  Label predict(const Row& x) const {
    const auto d = decision_function(x);
    return classes_[static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin())];
  }

 private:
  std::vector<Label> classes_;
  std::vector<std::vector<double>> weights_;
  std::vector<double> bias_;
  std::size_t feature_dim_ = 0;
};

inline LinearOvrModel train_ovr(std::span<const SparseVector> X, std::span<const Label> y,
                                const LinearSvmParams& params = {}, SvmTrace* trace = nullptr) {
  if (X.size() != y.size()) throw Error("feature/label count mismatch");
  if (X.size() < 2) throw Error("at least two training examples required");
  const std::size_t dim = X.front().dimension;
  for (const auto& x : X)
    if (x.dimension != dim) throw Error("feature dimension mismatch");
  auto classes = class_order(y);
  if (classes.size() < 2) throw Error("degenerate labels");

  std::vector<detail::BinarySolution> sols(classes.size());
  parallel_for(classes.size(), [&](std::size_t k) {
    std::vector<int> targets(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) targets[i] = y[i] == classes[k] ? 1 : -1;
    sols[k] = detail::train_binary(X, targets, dim, params, mix_seed(params.seed, k));
  });

  std::vector<std::vector<double>> weights;
  std::vector<double> bias;
  for (auto& s : sols) {
    weights.push_back(std::move(s.w));
    bias.push_back(s.bias);
  }
  if (trace) {
    trace->dual_objective.clear();
    trace->epochs.clear();
    for (auto& s : sols) {
      trace->dual_objective.push_back(s.objective);
      trace->epochs.push_back(s.epochs);
    }
  }
  return LinearOvrModel(std::move(classes), std::move(weights), std::move(bias), dim);
}

inline LinearOvrModel train_ovr(std::span<const DenseVector> X, std::span<const Label> y,
                                const LinearSvmParams& params = {}, SvmTrace* trace = nullptr) {
  std::vector<SparseVector> rows;
  rows.reserve(X.size());
  for (const auto& x : X) rows.push_back(SparseVector::from_dense(x));
  return train_ovr(std::span<const SparseVector>(rows), y, params, trace);
}

}  // namespace stacksa
