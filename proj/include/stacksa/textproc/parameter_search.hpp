#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/folds.hpp"
#include "stacksa/common/parallel.hpp"
#include "stacksa/common/types.hpp"
#include "stacksa/eval/metrics.hpp"
#include "stacksa/linmodel/linear_ovr.hpp"
#include "stacksa/textproc/tfidf.hpp"

namespace stacksa {

// Candidate tokenizers for the first step (every subset of each list is tried)
// and whether the second step toggles the remaining text options.
struct SearchGrid {
  std::vector<int> nwords{1, 2, 3};
  std::vector<SkipGram> skipgrams{{3, 1}, {2, 2}, {2, 1}};
  std::vector<int> qgrams{2, 3, 4, 5, 6};
  bool toggle_text_options = true;
  int max_loops = 20;
};

struct SearchResult {
  TextModelConfig config;
  double score = 0.0;
  std::size_t vocabulary = 0;
  int loops = 0;
  std::size_t evaluations = 0;
};

namespace detail {

struct Candidate {
  TextModelConfig config;
  double score = -HUGE_VAL;
  std::size_t vocabulary = 0;
  std::string encoding;

  // Higher score, then smaller vocabulary, then smaller encoding.
  bool better_than(const Candidate& o) const {
    if (score != o.score) return score > o.score;
    if (vocabulary != o.vocabulary) return vocabulary < o.vocabulary;
    return encoding < o.encoding;
  }
};

template <class T>
std::vector<std::set<T>> all_subsets(const std::vector<T>& items) {
  std::vector<std::set<T>> out;
  const std::size_t n = items.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::set<T> s;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (std::size_t{1} << i)) s.insert(items[i]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace detail

// Cross-validated score of TF-IDF + one-vs-rest SVM under `config`, computed on
// the pooled out-of-fold predictions.
inline double cross_validated_score(const Corpus& corpus, const TextModelConfig& config,
                                    const TextResources& resources, int k, const Metric& metric,
                                    std::uint64_t seed, const LinearSvmParams& svm = {}) {
  const auto labels = labels_of(corpus);
  const auto texts = texts_of(corpus);
  const auto folds = stratified_folds(labels, k, seed);
  std::vector<Label> predicted(corpus.size());
  for (int f = 0; f < k; ++f) {
    const auto split = fold_split(folds, f);
    const auto train_texts = gather(texts, split.train);
    const auto train_labels = gather(labels, split.train);
    const auto model = TextModel::fit(train_texts, config, resources);
    std::vector<SparseVector> X;
    X.reserve(train_texts.size());
    for (const auto& t : train_texts) X.push_back(model.transform(t));
    const auto svm_model = train_ovr(std::span<const SparseVector>(X), train_labels, svm);
    for (auto i : split.test) predicted[i] = svm_model.predict(model.transform(texts[i]));
  }
  return score(metric, labels, predicted);
}

// Two-step configuration search: (1) every tokenizer combination from the grid
// with the current text options; (2) one-at-a-time changes of the remaining
// text options, kept when they improve. The loop ends when a full iteration
// leaves the best configuration unchanged.
inline SearchResult parameter_search(const Corpus& corpus, const TextModelConfig& start,
                                     const SearchGrid& grid, int k, const Metric& metric,
                                     std::uint64_t seed, const TextResources& resources = {},
                                     const LinearSvmParams& svm = {}) {
  if (class_order(labels_of(corpus)).size() < 2) throw Error("degenerate corpus: a single class");
  std::map<std::string, detail::Candidate> cache;
  std::mutex cache_mutex;

  auto evaluate_all = [&](const std::vector<TextModelConfig>& configs) {
    std::vector<detail::Candidate> out(configs.size());
    parallel_for(configs.size(), [&](std::size_t i) {
      detail::Candidate c;
      c.config = configs[i];
      c.encoding = encode(c.config);
      {
        std::lock_guard lock(cache_mutex);
        if (auto it = cache.find(c.encoding); it != cache.end()) {
          out[i] = it->second;
          return;
        }
      }
      c.score = cross_validated_score(corpus, c.config, resources, k, metric, seed, svm);
      c.vocabulary = TextModel::fit(texts_of(corpus), c.config, resources).dimension();
      std::lock_guard lock(cache_mutex);
      cache.emplace(c.encoding, c);
      out[i] = c;
    });
    return out;
  };
  auto best_of = [](const std::vector<detail::Candidate>& cs, detail::Candidate best) {
    for (const auto& c : cs)
      if (c.better_than(best)) best = c;
    return best;
  };

  const auto nword_sets = detail::all_subsets(grid.nwords);
  const auto skip_sets = detail::all_subsets(grid.skipgrams);
  const auto qgram_sets = detail::all_subsets(grid.qgrams);

  detail::Candidate best = evaluate_all({start}).front();
  SearchResult result;
  for (int loop = 0; loop < grid.max_loops; ++loop) {
    const std::string previous = best.encoding;
    ++result.loops;

    std::vector<TextModelConfig> step1;
    for (const auto& nw : nword_sets)
      for (const auto& sg : skip_sets)
        for (const auto& qg : qgram_sets) {
          if (nw.empty() && sg.empty() && qg.empty()) continue;
          TextModelConfig c = best.config;
          c.nwords = nw;
          c.skipgrams = sg;
          c.qgrams = qg;
          step1.push_back(std::move(c));
        }
    best = best_of(evaluate_all(step1), best);

    if (grid.toggle_text_options) {
      using Mutation = std::function<std::vector<TextModelConfig>(const TextModelConfig&)>;
      auto toggle = [](bool TextModelConfig::*field) -> Mutation {
        return [field](const TextModelConfig& c) {
          TextModelConfig m = c;
          m.*field = !(c.*field);
          return std::vector<TextModelConfig>{m};
        };
      };
      auto alternatives = [](auto TextModelConfig::*field, auto values) -> Mutation {
        return [field, values](const TextModelConfig& c) {
          std::vector<TextModelConfig> out;
          for (auto v : values) {
            if (v == c.*field) continue;
            TextModelConfig m = c;
            m.*field = v;
            out.push_back(m);
          }
          return out;
        };
      };
      const std::vector<TokenAction> token_values{TokenAction::group, TokenAction::remove};
      const std::vector<ListAction> list_values{ListAction::none, ListAction::remove, ListAction::group};
      std::vector<Mutation> mutations{
          toggle(&TextModelConfig::remove_diacritics),
          toggle(&TextModelConfig::remove_duplicates),
          toggle(&TextModelConfig::remove_punctuation),
          toggle(&TextModelConfig::lowercase),
          alternatives(&TextModelConfig::emoticons, token_values),
          alternatives(&TextModelConfig::numbers, token_values),
          alternatives(&TextModelConfig::urls, token_values),
          alternatives(&TextModelConfig::users, token_values),
          alternatives(&TextModelConfig::hashtags,
                       std::vector<HashtagAction>{HashtagAction::none, HashtagAction::group,
                                                  HashtagAction::remove}),
      };
      if (!resources.entities.empty()) mutations.push_back(alternatives(&TextModelConfig::entities, list_values));
      if (!resources.stopwords.empty()) mutations.push_back(alternatives(&TextModelConfig::stopwords, list_values));
      if (!resources.negators.empty()) mutations.push_back(toggle(&TextModelConfig::negation));
      if (resources.stemmer) mutations.push_back(toggle(&TextModelConfig::stemming));
      for (const auto& mutate : mutations) best = best_of(evaluate_all(mutate(best.config)), best);
    }

    if (best.encoding == previous) break;
  }
  result.config = best.config;
  result.score = best.score;
  result.vocabulary = best.vocabulary;
  result.evaluations = cache.size();
  return result;
}

}  // namespace stacksa
