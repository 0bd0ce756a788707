#pragma once

#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/types.hpp"
#include "stacksa/linmodel/linear_ovr.hpp"
#include "stacksa/models/first_stage.hpp"
#include "stacksa/textproc/tfidf.hpp"

namespace stacksa {

// TR: the TF-IDF space of the task's own training set (d = vocabulary size).
class TfidfSpaceModel final : public FirstStageModel {
 public:
  explicit TfidfSpaceModel(TextModel text) : text_(std::move(text)) {}

  ModelKind kind() const override { return ModelKind::TR; }
  std::size_t output_dim() const override { return text_.dimension(); }
  Features transform(std::string_view text) const override { return text_.transform(text); }

  const TextModel& text_model() const { return text_; }

 private:
  TextModel text_;
};

// HA and Emo: TF-IDF + one-vs-rest SVM trained on an external labelled corpus.
// The output is the vector of decision values, one coordinate per class.
class DecisionSpaceModel final : public FirstStageModel {
 public:
  DecisionSpaceModel(ModelKind kind, TextModel text, LinearOvrModel classifier)
      : kind_(kind), text_(std::move(text)), classifier_(std::move(classifier)) {
    if (kind_ != ModelKind::HA && kind_ != ModelKind::Emo)
      throw Error("decision-space models are HA or Emo");
    if (classifier_.feature_dim() != text_.dimension())
      throw Error("classifier width differs from vocabulary size");
  }

  ModelKind kind() const override { return kind_; }
  std::size_t output_dim() const override { return classifier_.num_classes(); }
  Features transform(std::string_view text) const override {
    return classifier_.decision_function(text_.transform(text));
  }

  const TextModel& text_model() const { return text_; }
  const LinearOvrModel& classifier() const { return classifier_; }
  const std::vector<Label>& classes() const { return classifier_.classes(); }

 private:
  ModelKind kind_;
  TextModel text_;
  LinearOvrModel classifier_;
};

inline std::shared_ptr<TfidfSpaceModel> build_tr_model(std::span<const std::string> texts,
                                                       const TextModelConfig& config,
                                                       const TextResources& resources = {}) {
  return std::make_shared<TfidfSpaceModel>(TextModel::fit(texts, config, resources));
}

inline std::shared_ptr<DecisionSpaceModel> build_decision_space(ModelKind kind, const Corpus& corpus,
                                                                const TextModelConfig& config,
                                                                const TextResources& resources,
                                                                const LinearSvmParams& svm) {
  if (corpus.empty()) throw Error("empty corpus");
  const auto labels = labels_of(corpus);
  if (class_order(labels).size() < 2) throw Error("degenerate " + to_string(kind) + " corpus: fewer than two classes");
  const auto texts = texts_of(corpus);
  auto text = TextModel::fit(texts, config, resources);
  std::vector<SparseVector> X;
  X.reserve(texts.size());
  for (const auto& t : texts) X.push_back(text.transform(t));
  auto clf = train_ovr(std::span<const SparseVector>(X), labels, svm);
  return std::make_shared<DecisionSpaceModel>(kind, std::move(text), std::move(clf));
}

inline std::shared_ptr<DecisionSpaceModel> build_ha_model(const Corpus& ha_corpus, const TextModelConfig& config,
                                                          const TextResources& resources = {},
                                                          const LinearSvmParams& svm = {}) {
  return build_decision_space(ModelKind::HA, ha_corpus, config, resources, svm);
}

}  // namespace stacksa
