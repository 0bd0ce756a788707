#pragma once

#include <functional>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "stacksa/eval/evaluate.hpp"
#include "stacksa/evodag/classifiers.hpp"
#include "stacksa/evodag/evolve.hpp"
#include "stacksa/stacker/stacker.hpp"

namespace stacksa {

using DensePredictor = std::function<Label(std::span<const double>)>;

// A classifier over dense feature rows that can stand in for EvoDAG.
struct SecondStageClassifier {
  std::string name;
  std::function<DensePredictor(std::span<const DenseVector>, std::span<const Label>)> fit;
};

namespace detail {

inline SecondStageClassifier dense_classifier(std::string name, evodag::Func f) {
  return {std::move(name), [f](std::span<const DenseVector> X, std::span<const Label> y) -> DensePredictor {
            if (X.empty() || X.size() != y.size()) throw Error("training rows and labels differ in length");
            const auto classes = class_order(y);
            const std::size_t F = X.front().size();
            std::vector<double> flat;
            std::vector<int> idx;
            for (std::size_t i = 0; i < X.size(); ++i) {
              if (X[i].size() != F) throw Error("training rows differ in width");
              flat.insert(flat.end(), X[i].begin(), X[i].end());
              idx.push_back(static_cast<int>(std::lower_bound(classes.begin(), classes.end(), y[i]) - classes.begin()));
            }
            const evodag::FeatureBlock block{flat, F, idx, classes.size()};
            auto theta = evodag::fit_classifier(f, block);
            return [f, F, classes, theta = std::move(theta)](std::span<const double> x) {
              if (x.size() != F) throw Error("feature row has the wrong width");
              std::vector<double> scores(classes.size());
              evodag::classifier_scores(f, theta, F, classes.size(), x.data(), scores.data());
              return classes[static_cast<std::size_t>(std::max_element(scores.begin(), scores.end()) - scores.begin())];
            };
          }};
}

}  // namespace detail

inline SecondStageClassifier gaussian_nb_classifier() {
  return detail::dense_classifier("GaussianNB", evodag::Func::GaussianNB);
}
inline SecondStageClassifier multinomial_nb_classifier() {
  return detail::dense_classifier("MultinomialNB", evodag::Func::MultinomialNB);
}
inline SecondStageClassifier nearest_centroid_classifier() {
  return detail::dense_classifier("NearestCentroid", evodag::Func::NearestCentroid);
}

inline SecondStageClassifier linear_ovr_classifier(LinearSvmParams params = {}) {
  return {"LinearSVM", [params](std::span<const DenseVector> X, std::span<const Label> y) -> DensePredictor {
            auto g = std::make_shared<const LinearOvrModel>(train_ovr(X, y, params));
            return [g](std::span<const double> x) { return g->predict(x); };
          }};
}

inline SecondStageClassifier evodag_classifier(evodag::EvoDagParams params = {}) {
  return {"EvoDAG", [params](std::span<const DenseVector> X, std::span<const Label> y) -> DensePredictor {
            auto m = std::make_shared<const evodag::EvoDagModel>(evodag::evolve(X, y, params));
            return [m](std::span<const double> x) { return m->predict(x); };
          }};
}

struct FeatureDataset {
  std::string name;
  std::vector<DenseVector> X_train;
  std::vector<Label> y_train;
  std::vector<DenseVector> X_test;
  std::vector<Label> y_test;
};

// The features EvoDAG would see: out-of-fold rows for training, full-training
// outer classifiers for the test rows.
inline FeatureDataset stacked_feature_dataset(std::string name, std::span<const FirstStagePtr> members,
                                              const Corpus& train, const Corpus& test, const StackerParams& params) {
  std::vector<LinearOvrModel> outer;
  auto M = build_training_matrix(members, train, params, &outer);
  FeatureDataset d{std::move(name), std::move(M.rows), std::move(M.labels), {}, labels_of(test)};
  d.X_test.resize(test.size());
  parallel_for(test.size(), [&](std::size_t i) {
    for (std::size_t j = 0; j < members.size(); ++j) {
      const auto v = outer[j].decision_function(to_sparse(members[j]->transform(test[i].text)));
      d.X_test[i].insert(d.X_test[i].end(), v.begin(), v.end());
    }
  });
  return d;
}

struct ComparisonReport {
  std::vector<std::string> datasets;
  std::vector<std::string> classifiers;
  std::string metric;
  std::vector<std::vector<double>> scores;  // [classifier][dataset]
  std::vector<std::vector<double>> ranks;   // [classifier][dataset], midpoint ties
  std::vector<double> mean_rank;
};

inline ComparisonReport compare_second_stage(const std::vector<SecondStageClassifier>& classifiers,
                                             const std::vector<FeatureDataset>& datasets, const Metric& metric) {
  if (classifiers.empty() || datasets.empty()) throw Error("comparison needs classifiers and datasets");
  ComparisonReport r;
  r.metric = metric.name();
  for (const auto& c : classifiers) r.classifiers.push_back(c.name);
  for (const auto& d : datasets) r.datasets.push_back(d.name);
  const std::size_t C = classifiers.size(), D = datasets.size();
  r.scores.assign(C, std::vector<double>(D, 0.0));
  parallel_for(C * D, [&](std::size_t i) {
    const auto& c = classifiers[i / D];
    const auto& d = datasets[i % D];
    const auto predict = c.fit(d.X_train, d.y_train);
    std::vector<Label> pred;
    for (const auto& x : d.X_test) pred.push_back(predict(x));
    r.scores[i / D][i % D] = score(metric, d.y_test, pred);
  });
  r.ranks.assign(C, std::vector<double>(D, 0.0));
  r.mean_rank.assign(C, 0.0);
  for (std::size_t d = 0; d < D; ++d) {
    std::vector<double> col;
    for (std::size_t c = 0; c < C; ++c) col.push_back(r.scores[c][d]);
    const auto ranks = midpoint_ranks(col);
    for (std::size_t c = 0; c < C; ++c) {
      r.ranks[c][d] = ranks[c];
      r.mean_rank[c] += ranks[c] / static_cast<double>(D);
    }
  }
  return r;
}

inline std::vector<ScoreRow> score_rows(const ComparisonReport& r) {
  std::vector<ScoreRow> out;
  for (std::size_t c = 0; c < r.classifiers.size(); ++c)
    for (std::size_t d = 0; d < r.datasets.size(); ++d)
      out.push_back({r.datasets[d], r.classifiers[c], std::nullopt, r.metric, r.scores[c][d]});
  return out;
}

inline std::string format_table(const ComparisonReport& r) {
  std::ostringstream out;
  out << std::left << std::setw(18) << "classifier";
  for (const auto& d : r.datasets) out << std::setw(14) << d;
  out << "mean_rank\n";
  for (std::size_t c = 0; c < r.classifiers.size(); ++c) {
    out << std::setw(18) << r.classifiers[c] << std::fixed << std::setprecision(4);
    for (double s : r.scores[c]) out << std::setw(14) << s;
    out << std::setprecision(2) << r.mean_rank[c] << "\n";
  }
  return out.str();
}

}  // namespace stacksa
