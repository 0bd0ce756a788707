#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/types.hpp"
#include "stacksa/textproc/sparse.hpp"

namespace stacksa {

// The five text models of the first stage.
enum class ModelKind { TR, HA, TH, Emo, FT };

inline constexpr ModelKind kAllKinds[] = {ModelKind::TR, ModelKind::HA, ModelKind::TH, ModelKind::Emo,
                                          ModelKind::FT};

inline std::string to_string(ModelKind k) {
  switch (k) {
    case ModelKind::TR:
      return "TR";
    case ModelKind::HA:
      return "HA";
    case ModelKind::TH:
      return "TH";
    case ModelKind::Emo:
      return "Emo";
    case ModelKind::FT:
      return "FT";
  }
  return "?";
}

inline ModelKind parse_kind(std::string_view s) {
  for (auto k : kAllKinds)
    if (to_string(k) == s) return k;
  throw Error("unknown model kind '" + std::string(s) + "'");
}

// Sparse for TF-IDF spaces, dense for everything else.
using Features = std::variant<SparseVector, DenseVector>;

inline SparseVector to_sparse(const Features& f) {
  if (const auto* s = std::get_if<SparseVector>(&f)) return *s;
  return SparseVector::from_dense(std::get<DenseVector>(f));
}

inline std::size_t width(const Features& f) {
  if (const auto* s = std::get_if<SparseVector>(&f)) return s->dimension;
  return std::get<DenseVector>(f).size();
}

// A text model m: text -> R^d with d fixed per instance. Implementations are
// immutable after construction and safe to share across threads.
class FirstStageModel {
 public:
  virtual ~FirstStageModel() = default;
  virtual ModelKind kind() const = 0;
  virtual std::size_t output_dim() const = 0;
  virtual Features transform(std::string_view text) const = 0;
};

using FirstStagePtr = std::shared_ptr<const FirstStageModel>;

}  // namespace stacksa
