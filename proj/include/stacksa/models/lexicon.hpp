#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/models/first_stage.hpp"
#include "stacksa/textproc/normalize.hpp"

namespace stacksa {

struct Lexicon {
  std::set<std::string> positive;
  std::set<std::string> negative;

  bool empty() const { return positive.empty() && negative.empty(); }
  bool operator==(const Lexicon&) const = default;
};

namespace detail {

inline void warn(std::vector<std::string>* sink, std::string message) {
  if (sink)
    sink->push_back(std::move(message));
  else
    std::cerr << "warning: " << message << '\n';
}

}  // namespace detail

// Reads "word<TAB>pos|neg" lines. Multi-word entries are skipped with a
// warning; warnings go to `warnings` when given, otherwise to stderr.
inline Lexicon load_lexicon(const std::string& path, std::vector<std::string>* warnings = nullptr) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon file '" + path + "'");
  Lexicon lex;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(path + ":" + std::to_string(lineno) + ": expected word<TAB>pos|neg");
    const std::string word = line.substr(0, tab);
    const std::string polarity = line.substr(tab + 1);
    if (split_whitespace(word).size() != 1) {
      detail::warn(warnings, path + ":" + std::to_string(lineno) + ": multi-word entry '" + word + "' ignored");
      continue;
    }
    if (polarity == "pos")
      lex.positive.insert(word);
    else if (polarity == "neg")
      lex.negative.insert(word);
    else
      throw Error(path + ":" + std::to_string(lineno) + ": polarity must be pos or neg, got '" + polarity + "'");
  }
  return lex;
}

// TH: counts positive and negative lexicon words among the normalized
// unigrams of a text. Entries pass through the same normalizer as the text.
class LexiconModel final : public FirstStageModel {
 public:
  LexiconModel(const Lexicon& lexicon, const TextModelConfig& config, const TextResources& resources = {},
               std::vector<std::string>* warnings = nullptr)
      : normalizer_(config, resources) {
    if (lexicon.empty()) throw Error("empty lexicon");
    auto add = [&](const std::set<std::string>& words, std::set<std::string>& into) {
      for (const auto& w : words) {
        const auto parts = split_whitespace(normalizer_(w));
        if (parts.size() != 1) {
          detail::warn(warnings, "lexicon entry '" + w + "' does not normalize to a single word; ignored");
          continue;
        }
        into.insert(parts.front());
      }
    };
    add(lexicon.positive, lexicon_.positive);
    add(lexicon.negative, lexicon_.negative);
    for (const auto& w : lexicon_.positive)
      if (lexicon_.negative.contains(w))
        throw Error("lexicon word '" + w + "' is both positive and negative after normalization");
    if (lexicon_.empty()) throw Error("lexicon is empty after normalization");
  }

  ModelKind kind() const override { return ModelKind::TH; }
  std::size_t output_dim() const override { return 2; }
  Features transform(std::string_view text) const override { return counts(text); }

  DenseVector counts(std::string_view text) const {
    DenseVector out{0.0, 0.0};
    for (const auto& w : split_whitespace(normalizer_(text))) {
      if (lexicon_.positive.contains(w)) out[0] += 1;
      if (lexicon_.negative.contains(w)) out[1] += 1;
    }
    return out;
  }

  // The lexicon as matched, i.e. after normalization.
  const Lexicon& normalized_lexicon() const { return lexicon_; }
  const Normalizer& normalizer() const { return normalizer_; }

  // Rebuilds a model whose entries are already normalized, as stored in archives.
  static LexiconModel from_normalized(Normalizer normalizer, Lexicon normalized) {
    if (normalized.empty()) throw Error("empty lexicon");
    return LexiconModel(std::move(normalizer), std::move(normalized));
  }

 private:
  LexiconModel(Normalizer normalizer, Lexicon normalized)
      : normalizer_(std::move(normalizer)), lexicon_(std::move(normalized)) {}

  Normalizer normalizer_;
  Lexicon lexicon_;
};

inline DenseVector score_lexicon(const Lexicon& lexicon, std::string_view text, const TextModelConfig& config,
                                 const TextResources& resources = {}) {
  std::vector<std::string> ignored;
  return LexiconModel(lexicon, config, resources, &ignored).counts(text);
}

inline std::shared_ptr<LexiconModel> build_lexicon_model(const Lexicon& lexicon, const TextModelConfig& config,
                                                         const TextResources& resources = {}) {
  return std::make_shared<LexiconModel>(lexicon, config, resources);
}

}  // namespace stacksa
