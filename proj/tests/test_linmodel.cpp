#include <cmath>

#include <gtest/gtest.h>

#include "stacksa/common/rng.hpp"
#include "stacksa/linmodel/linear_ovr.hpp"

using namespace stacksa;

namespace {

struct Dataset {
  std::vector<DenseVector> X;
  std::vector<Label> y;
};

// Points in [-3,3]^2 labelled by a known separator, keeping a margin of 0.5.
Dataset separable(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  const double w0 = 0.8, w1 = -0.6, b = 0.3;
  Dataset d;
  while (d.X.size() < n) {
    DenseVector x{rng.uniform(-3, 3), rng.uniform(-3, 3)};
    const double s = w0 * x[0] + w1 * x[1] + b;
    if (std::abs(s) < 0.5) continue;
    d.X.push_back(x);
    d.y.push_back(s > 0 ? "pos" : "neg");
  }
  return d;
}

double primal_objective(const std::vector<DenseVector>& X, const std::vector<int>& y,
                        const std::vector<double>& w, double b, double C) {
  double p = 0.5 * b * b;
  for (double v : w) p += 0.5 * v * v;
  for (std::size_t i = 0; i < X.size(); ++i) {
    double s = b;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * X[i][j];
    p += C * std::max(0.0, 1.0 - y[i] * s);
  }
  return p;
}

}  // namespace

TEST(LinearOvr, TwoSeparablePoints) {
  std::vector<DenseVector> X{{1, 0}, {0, 1}};
  std::vector<Label> y{"A", "B"};
  const auto m = train_ovr(std::span<const DenseVector>(X), y);
  EXPECT_GT(m.decision_function(std::span<const double>(X[0]))[0], 0);
  EXPECT_LT(m.decision_function(std::span<const double>(X[1]))[0], 0);
  EXPECT_EQ(m.predict(std::span<const double>(X[0])), "A");
  EXPECT_EQ(m.predict(std::span<const double>(X[1])), "B");
}

TEST(LinearOvr, OneHotThreeClasses) {
  std::vector<DenseVector> X{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  std::vector<Label> y{"c", "a", "b"};
  const auto m = train_ovr(std::span<const DenseVector>(X), y);
  EXPECT_EQ(m.classes(), (std::vector<Label>{"a", "b", "c"}));
  EXPECT_EQ(m.weights().size(), 3u);
  for (std::size_t i = 0; i < X.size(); ++i) EXPECT_EQ(m.predict(std::span<const double>(X[i])), y[i]);
}

TEST(LinearOvr, RandomSeparableSetIsFitExactly) {
  const auto d = separable(17, 50);
  const auto m = train_ovr(std::span<const DenseVector>(d.X), d.y);
  std::size_t correct = 0;
  for (std::size_t i = 0; i < d.X.size(); ++i) correct += m.predict(std::span<const double>(d.X[i])) == d.y[i];
  EXPECT_EQ(correct, d.X.size());
  // brute-force margin check on the positive-class separator
  const std::size_t pos = 1;  // classes {"neg", "pos"}
  for (std::size_t i = 0; i < d.X.size(); ++i) {
    const double s = m.decision_function(std::span<const double>(d.X[i]))[pos];
    EXPECT_EQ(s > 0, d.y[i] == "pos");
  }
}

TEST(LinearOvr, ReachesDualOptimum) {
  const auto d = separable(5, 60);
  SvmTrace trace;
  LinearSvmParams p;
  p.tol = 1e-6;
  const auto m = train_ovr(std::span<const DenseVector>(d.X), d.y, p, &trace);
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<int> t;
    for (auto& l : d.y) t.push_back(l == m.classes()[k] ? 1 : -1);
    const double primal = primal_objective(d.X, t, m.weights()[k], m.bias()[k], p.C);
    const double dual = -trace.dual_objective[k].back();
    EXPECT_NEAR(primal, dual, 1e-3 * std::max(1.0, primal));
  }
}

TEST(LinearOvr, DualObjectiveDecreasesEveryEpoch) {
  Rng rng(3);
  std::vector<DenseVector> X;
  std::vector<Label> y;
  for (int i = 0; i < 80; ++i) {
    X.push_back({rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)});
    y.push_back(std::to_string(rng.index(3)));  // noisy labels: not separable
  }
  SvmTrace trace;
  train_ovr(std::span<const DenseVector>(X), y, {}, &trace);
  for (const auto& obj : trace.dual_objective) {
    ASSERT_GE(obj.size(), 2u);
    for (std::size_t e = 1; e < obj.size(); ++e) EXPECT_LE(obj[e], obj[e - 1] + 1e-12);
  }
}

TEST(LinearOvr, DuplicatingDataWithHalfCIsSameOptimum) {
  const auto d = separable(9, 30);
  LinearSvmParams p;
  p.tol = 1e-7;
  p.max_iter = 5000;
  const auto a = train_ovr(std::span<const DenseVector>(d.X), d.y, p);
  auto X2 = d.X;
  auto y2 = d.y;
  X2.insert(X2.end(), d.X.begin(), d.X.end());
  y2.insert(y2.end(), d.y.begin(), d.y.end());
  p.C = 0.5;
  const auto b = train_ovr(std::span<const DenseVector>(X2), y2, p);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t j = 0; j < 2; ++j) EXPECT_NEAR(a.weights()[k][j], b.weights()[k][j], 1e-3);
    EXPECT_NEAR(a.bias()[k], b.bias()[k], 1e-3);
  }
}

TEST(LinearOvr, DecisionFunctionIsAffine) {
  const auto d = separable(21, 40);
  const auto m = train_ovr(std::span<const DenseVector>(d.X), d.y);
  const DenseVector zero{0, 0};
  EXPECT_EQ(m.decision_function(std::span<const double>(zero)), m.bias());
  Rng rng(1);
  for (int t = 0; t < 20; ++t) {
    DenseVector x{rng.uniform(-2, 2), rng.uniform(-2, 2)};
    DenseVector x2{2 * x[0], 2 * x[1]};
    const auto v1 = m.decision_function(std::span<const double>(x));
    const auto v2 = m.decision_function(std::span<const double>(x2));
    for (std::size_t k = 0; k < v1.size(); ++k)
      EXPECT_NEAR(v2[k] - m.bias()[k], 2 * (v1[k] - m.bias()[k]), 1e-12);
    const auto best = std::max_element(v1.begin(), v1.end()) - v1.begin();
    EXPECT_EQ(m.predict(std::span<const double>(x)), m.classes()[best]);
    // sparse and dense paths agree
    EXPECT_EQ(m.decision_function(SparseVector::from_dense(x)), v1);
  }
}

TEST(LinearOvr, TiesGoToFirstClassAndSignFlips) {
  LinearOvrModel m({"a", "b"}, {{1.0}, {-1.0}}, {0.0, 0.0}, 1);
  const DenseVector zero{0.0};
  EXPECT_EQ(m.predict(std::span<const double>(zero)), "a");
  const DenseVector pos{0.1}, neg{-0.1};
  EXPECT_EQ(m.predict(std::span<const double>(pos)), "a");
  EXPECT_EQ(m.predict(std::span<const double>(neg)), "b");
}

TEST(LinearOvr, Errors) {
  std::vector<DenseVector> X{{1, 0}, {0, 1}};
  std::vector<Label> same{"a", "a"};
  EXPECT_THROW(train_ovr(std::span<const DenseVector>(X), same), Error);
  std::vector<Label> one{"a"};
  EXPECT_THROW(train_ovr(std::span<const DenseVector>(X), one), Error);
  std::vector<DenseVector> ragged{{1, 0}, {0}};
  std::vector<Label> y{"a", "b"};
  EXPECT_THROW(train_ovr(std::span<const DenseVector>(ragged), y), Error);
  const auto m = train_ovr(std::span<const DenseVector>(X), y);
  const DenseVector wrong{1, 2, 3};
  EXPECT_THROW(m.decision_function(std::span<const double>(wrong)), Error);
  EXPECT_THROW(LinearOvrModel({"b", "a"}, {{1}, {1}}, {0, 0}, 1), Error);
}

TEST(LinearOvr, DeterministicGivenSeed) {
  const auto d = separable(2, 40);
  LinearSvmParams p;
  p.seed = 99;
  const auto a = train_ovr(std::span<const DenseVector>(d.X), d.y, p);
  const auto b = train_ovr(std::span<const DenseVector>(d.X), d.y, p);
  EXPECT_EQ(a.weights(), b.weights());
  EXPECT_EQ(a.bias(), b.bias());
}
