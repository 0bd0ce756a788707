#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/folds.hpp"
#include "stacksa/common/parallel.hpp"
#include "stacksa/common/types.hpp"
#include "stacksa/evodag/evolve.hpp"
#include "stacksa/linmodel/linear_ovr.hpp"
#include "stacksa/models/first_stage.hpp"

namespace stacksa {

// The outer classifier g of each member; any callable with this shape can be
// substituted, which is how the leakage probe swaps in a memorizer.
struct LinearTrainer {
  LinearSvmParams params;
  LinearOvrModel operator()(std::span<const SparseVector> X, std::span<const Label> y) const {
    return train_ovr(X, y, params);
  }
};

// m(text) for every document of the corpus, as sparse rows.
inline std::vector<SparseVector> transform_all(const FirstStageModel& m, std::span<const std::string> texts) {
  std::vector<SparseVector> out(texts.size());
  parallel_for(texts.size(), [&](std::size_t i) { out[i] = to_sparse(m.transform(texts[i])); });
  return out;
}

// Decision values of each row from a g trained on the other folds, written at
// the row's original index.
template <class Trainer = LinearTrainer>
std::vector<DenseVector> out_of_fold_features(std::span<const SparseVector> X, std::span<const Label> y,
                                              std::span<const int> folds, int k, const Trainer& trainer = {}) {
  if (X.size() != y.size() || folds.size() != y.size()) throw Error("features, labels and folds differ in length");
  const auto classes = class_order(y);
  std::vector<DenseVector> out(X.size());
  parallel_for(static_cast<std::size_t>(k), [&](std::size_t f) {
    const auto split = fold_split(folds, static_cast<int>(f));
    const auto g = trainer(gather(X, split.train), gather(y, split.train));
    if (g.classes() != classes) throw Error("a training fold is missing a class");
    for (auto i : split.test) out[i] = g.decision_function(X[i]);
  });
  return out;
}

template <class Trainer = LinearTrainer>
std::vector<DenseVector> out_of_fold_features(const FirstStageModel& m, const Corpus& tr, int k, std::uint64_t seed,
                                              const Trainer& trainer = {}) {
  if (k < 2) throw Error("k must be at least 2");
  const auto labels = labels_of(tr);
  const auto folds = stratified_folds(labels, k, seed);
  const auto X = transform_all(m, texts_of(tr));
  return out_of_fold_features(std::span<const SparseVector>(X), labels, folds, k, trainer);
}

struct StackedTrainingMatrix {
  std::vector<DenseVector> rows;  // width l*c, member blocks in member order
  std::vector<Label> labels;
  std::vector<int> folds;
  std::vector<Label> classes;
};

struct StackedMember {
  FirstStagePtr model;
  LinearOvrModel outer;  // g trained on the full training set
};

struct StackerParams {
  int k = 5;
  std::uint64_t seed = 0;  // fold assignment
  LinearSvmParams svm;
  evodag::EvoDagParams evodag;
};

namespace detail {

struct MemberFit {
  std::vector<DenseVector> oof;
  LinearOvrModel outer;
};

inline MemberFit fit_member(const FirstStageModel& m, std::span<const std::string> texts, std::span<const Label> labels,
                            std::span<const int> folds, int k, const LinearSvmParams& svm) {
  const auto X = transform_all(m, texts);
  MemberFit fit;
  fit.oof = out_of_fold_features(std::span<const SparseVector>(X), labels, folds, k, LinearTrainer{svm});
  fit.outer = train_ovr(std::span<const SparseVector>(X), labels, svm);
  return fit;
}

inline void check_members(std::span<const FirstStagePtr> members) {
  if (members.empty()) throw Error("stacking needs at least one first-stage model");
  for (const auto& m : members)
    if (!m) throw Error("null first-stage model");
}

}  // namespace detail

// Out-of-fold matrix for a list of members; blocks follow member order.
inline StackedTrainingMatrix build_training_matrix(std::span<const FirstStagePtr> members, const Corpus& tr,
                                                   const StackerParams& params,
                                                   std::vector<LinearOvrModel>* outer = nullptr) {
  detail::check_members(members);
  if (params.k < 2) throw Error("k must be at least 2");
  StackedTrainingMatrix M;
  M.labels = labels_of(tr);
  M.classes = class_order(M.labels);
  if (M.classes.size() < 2) throw Error("degenerate labels: stacking needs at least two classes");
  M.folds = stratified_folds(M.labels, params.k, params.seed);
  const auto texts = texts_of(tr);
  std::vector<detail::MemberFit> fits(members.size());
  parallel_for(members.size(), [&](std::size_t j) {
    fits[j] = detail::fit_member(*members[j], texts, M.labels, M.folds, params.k, params.svm);
  });
  M.rows.assign(tr.size(), {});
  for (std::size_t i = 0; i < tr.size(); ++i)
    for (const auto& f : fits) M.rows[i].insert(M.rows[i].end(), f.oof[i].begin(), f.oof[i].end());
  if (outer) {
    outer->clear();
    for (auto& f : fits) outer->push_back(std::move(f.outer));
  }
  return M;
}

class StackedModel {
 public:
  StackedModel(std::vector<StackedMember> members, evodag::EvoDagModel second_stage, int k)
      : members_(std::move(members)), second_stage_(std::move(second_stage)), k_(k) {
    if (members_.empty()) throw Error("a stacked model needs at least one member");
    if (k_ < 2) throw Error("k must be at least 2");
    const auto& classes = second_stage_.classes();
    for (const auto& m : members_) {
      if (!m.model) throw Error("null first-stage model");
      if (m.outer.classes() != classes) throw Error("every outer classifier must share the class order");
      if (m.outer.feature_dim() != m.model->output_dim())
        throw Error("outer classifier width differs from its " + to_string(m.model->kind()) + " model");
    }
    if (second_stage_.input_dim() != width())
      throw Error("EvoDAG input width " + std::to_string(second_stage_.input_dim()) + " differs from l*c = " +
                  std::to_string(width()));
  }

  const std::vector<StackedMember>& members() const { return members_; }
  const evodag::EvoDagModel& second_stage() const { return second_stage_; }
  const std::vector<Label>& classes() const { return second_stage_.classes(); }
  int k() const { return k_; }
  std::size_t width() const { return members_.size() * classes().size(); }

  DenseVector transform(std::string_view text) const {
    DenseVector out;
    out.reserve(width());
    for (const auto& m : members_) {
      const auto d = m.outer.decision_function(to_sparse(m.model->transform(text)));
      out.insert(out.end(), d.begin(), d.end());
    }
    return out;
  }

  DenseVector decision_function(std::string_view text) const { return second_stage_.decision_function(transform(text)); }

  Label predict(std::string_view text) const { return second_stage_.predict(transform(text)); }

 private:
  std::vector<StackedMember> members_;
  evodag::EvoDagModel second_stage_;
  int k_;
};

inline StackedModel fit_stacked(std::vector<FirstStagePtr> members, const Corpus& tr, const StackerParams& params = {},
                                evodag::EvolutionStats* stats = nullptr) {
  std::vector<LinearOvrModel> outer;
  const auto M = build_training_matrix(members, tr, params, &outer);
  auto second = evodag::evolve(M.rows, M.labels, params.evodag, stats);
  std::vector<StackedMember> stacked;
  for (std::size_t j = 0; j < members.size(); ++j) stacked.push_back({members[j], std::move(outer[j])});
  return StackedModel(std::move(stacked), std::move(second), params.k);
}

}  // namespace stacksa
