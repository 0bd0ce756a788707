#pragma once

#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "stacksa/common/folds.hpp"
#include "stacksa/common/parallel.hpp"
#include "stacksa/eval/metrics.hpp"
#include "stacksa/io/pipeline.hpp"

namespace stacksa {

struct FoldScores {
  std::vector<double> folds;

  double mean() const {
    if (folds.empty()) return 0.0;
    return std::accumulate(folds.begin(), folds.end(), 0.0) / static_cast<double>(folds.size());
  }
};

// Fits on every fold's complement and scores the held-out rows. `fit` maps a
// training corpus to anything with predict(text) -> Label.
template <class Fit>
double evaluate_fold(const Corpus& corpus, std::span<const int> folds, int which, const Metric& metric, Fit&& fit) {
  const auto split = fold_split(folds, which);
  const Corpus train = gather(corpus, split.train);
  const auto model = fit(train);
  std::vector<Label> truth, pred;
  for (auto i : split.test) {
    truth.push_back(corpus[i].label);
    pred.push_back(model.predict(corpus[i].text));
  }
  return score(metric, truth, pred);
}

template <class Fit>
FoldScores kfold_evaluate(const Corpus& corpus, int k, const Metric& metric, std::uint64_t seed, Fit&& fit) {
  const auto folds = stratified_folds(labels_of(corpus), k, seed);
  FoldScores out;
  out.folds.resize(static_cast<std::size_t>(k));
  parallel_for(out.folds.size(), [&](std::size_t f) {
    out.folds[f] = evaluate_fold(corpus, folds, static_cast<int>(f), metric, fit);
  });
  return out;
}

// The full stacked pipeline with the given member kinds.
inline FoldScores kfold_evaluate(const PipelineSpec& spec, const PipelineResources& res, const Corpus& corpus, int k,
                                 const Metric& metric, std::uint64_t seed, std::span<const ModelKind> kinds) {
  return kfold_evaluate(corpus, k, metric, seed,
                        [&](const Corpus& train) { return train_pipeline(spec, res, train, kinds); });
}

inline FoldScores kfold_evaluate(const PipelineSpec& spec, const PipelineResources& res, const Corpus& corpus, int k,
                                 const Metric& metric, std::uint64_t seed) {
  return kfold_evaluate(spec, res, corpus, k, metric, seed, spec.kinds);
}

// Single-stage reference: the TR text model and a linear classifier on top.
class B4msaModel {
 public:
  B4msaModel(TextModel text, LinearOvrModel classifier) : text_(std::move(text)), classifier_(std::move(classifier)) {}

  DenseVector decision_function(std::string_view text) const {
    return classifier_.decision_function(text_.transform(text));
  }
  Label predict(std::string_view text) const { return classifier_.predict(text_.transform(text)); }

 private:
  TextModel text_;
  LinearOvrModel classifier_;
};

inline B4msaModel fit_b4msa(const Corpus& train, const TextModelConfig& config, const TextResources& resources = {},
                            const LinearSvmParams& svm = {}) {
  auto text = fit_tfidf(texts_of(train), config, resources);
  std::vector<SparseVector> X;
  X.reserve(train.size());
  for (const auto& d : train) X.push_back(text.transform(d.text));
  auto g = train_ovr(std::span<const SparseVector>(X), labels_of(train), svm);
  return B4msaModel(std::move(text), std::move(g));
}

// One machine-readable result: (dataset, system, fold, metric, score). A
// missing fold marks a score over a whole test set.
struct ScoreRow {
  std::string dataset;
  std::string system;
  std::optional<int> fold;
  std::string metric;
  double score = 0.0;
};

inline std::string to_jsonl(std::span<const ScoreRow> rows) {
  std::string out;
  for (const auto& r : rows) {
    nlohmann::json j{{"dataset", r.dataset}, {"system", r.system}, {"metric", r.metric}, {"score", r.score}};
    j["fold"] = r.fold ? nlohmann::json(*r.fold) : nlohmann::json(nullptr);
    out += j.dump() + "\n";
  }
  return out;
}

inline std::vector<ScoreRow> score_rows(const std::string& dataset, const std::string& system, const Metric& metric,
                                        const FoldScores& s) {
  std::vector<ScoreRow> out;
  for (std::size_t f = 0; f < s.folds.size(); ++f)
    out.push_back({dataset, system, static_cast<int>(f), metric.name(), s.folds[f]});
  return out;
}

}  // namespace stacksa
