#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/textproc/normalize.hpp"
#include "stacksa/textproc/sparse.hpp"
#include "stacksa/textproc/tokenize.hpp"

namespace stacksa {

// Vocabulary over family-tagged token keys, ordered lexicographically, with
// smoothed inverse document frequencies idf(t) = ln((1 + N) / (1 + df(t))) + 1.
class TfidfModel {
 public:
  TfidfModel() = default;

  static TfidfModel fit(std::span<const TokenBag> docs) {
    if (docs.empty()) throw Error("empty corpus");
    std::map<std::string, std::size_t> df;
    for (const auto& bag : docs) {
      std::vector<std::string> keys;
      keys.reserve(bag.size());
      for (const auto& t : bag) keys.push_back(t.key());
      std::sort(keys.begin(), keys.end());
      keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
      for (auto& k : keys) ++df[k];
    }
    TfidfModel m;
    m.num_docs_ = docs.size();
    m.terms_.reserve(df.size());
    for (auto& [term, count] : df) {
      m.terms_.push_back(term);
      m.df_.push_back(count);
    }
    m.rebuild();
    return m;
  }

  static TfidfModel from_parts(std::vector<std::string> terms, std::vector<std::size_t> df,
                               std::size_t num_docs) {
    if (terms.size() != df.size()) throw Error("vocabulary and document-frequency sizes differ");
    if (num_docs == 0) throw Error("num_docs must be positive");
    if (!std::is_sorted(terms.begin(), terms.end()) ||
        std::adjacent_find(terms.begin(), terms.end()) != terms.end())
      throw Error("vocabulary must be sorted and duplicate-free");
    TfidfModel m;
    m.terms_ = std::move(terms);
    m.df_ = std::move(df);
    m.num_docs_ = num_docs;
    m.rebuild();
    return m;
  }

  std::size_t dimension() const { return terms_.size(); }
  std::size_t num_docs() const { return num_docs_; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::size_t>& document_frequency() const { return df_; }
  const std::vector<double>& idf() const { return idf_; }

  std::optional<std::uint32_t> lookup(const std::string& key) const {
    auto it = index_.find(key);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  // Raw term counts times idf, L2-normalized. Unknown tokens are dropped.
  SparseVector vectorize(const TokenBag& bag) const {
    std::map<std::uint32_t, double> counts;
    for (const auto& t : bag)
      if (auto idx = lookup(t.key())) counts[*idx] += 1.0;
    SparseVector v;
    v.dimension = dimension();
    v.entries.reserve(counts.size());
    double norm2 = 0.0;
    for (auto [idx, tf] : counts) {
      const double w = tf * idf_[idx];
      v.entries.push_back({idx, w});
      norm2 += w * w;
    }
    if (norm2 > 0.0) {
      const double inv = 1.0 / std::sqrt(norm2);
      for (auto& e : v.entries) e.weight *= inv;
    }
    return v;
  }

 private:
  void rebuild() {
    index_.clear();
    idf_.resize(terms_.size());
    const double n = static_cast<double>(num_docs_);
    for (std::size_t i = 0; i < terms_.size(); ++i) {
      index_.emplace(terms_[i], static_cast<std::uint32_t>(i));
      idf_[i] = std::log((1.0 + n) / (1.0 + static_cast<double>(df_[i]))) + 1.0;
    }
  }

  std::vector<std::string> terms_;
  std::vector<std::size_t> df_;
  std::vector<double> idf_;
  std::size_t num_docs_ = 0;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// Normalizer + tokenizers + TF-IDF weighting: text -> sparse vector.
class TextModel {
 public:
  static TextModel fit(std::span<const std::string> corpus, const TextModelConfig& config,
                       const TextResources& resources = {}) {
    if (corpus.empty()) throw Error("empty corpus");
    config.validate();
    TextModel m(Normalizer(config, resources));
    std::vector<TokenBag> bags;
    bags.reserve(corpus.size());
    for (const auto& text : corpus) bags.push_back(m.tokens(text));
    m.tfidf_ = TfidfModel::fit(bags);
    return m;
  }

  static TextModel from_parts(Normalizer normalizer, TfidfModel tfidf) {
    TextModel m(std::move(normalizer));
    m.tfidf_ = std::move(tfidf);
    return m;
  }

  TokenBag tokens(std::string_view text) const {
    return tokenize(normalizer_(text), normalizer_.config());
  }

  SparseVector transform(std::string_view text) const { return tfidf_.vectorize(tokens(text)); }

  std::size_t dimension() const { return tfidf_.dimension(); }
  const TfidfModel& tfidf() const { return tfidf_; }
  const Normalizer& normalizer() const { return normalizer_; }
  const TextModelConfig& config() const { return normalizer_.config(); }

 private:
  explicit TextModel(Normalizer n) : normalizer_(std::move(n)) {}

  Normalizer normalizer_;
  TfidfModel tfidf_;
};

inline TextModel fit_tfidf(std::span<const std::string> corpus, const TextModelConfig& config,
                           const TextResources& resources = {}) {
  return TextModel::fit(corpus, config, resources);
}

inline SparseVector vectorize(const TextModel& model, std::string_view text) {
  return model.transform(text);
}

}  // namespace stacksa
