#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <memory>
#include <queue>
#include <ranges>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/rng.hpp"
#include "stacksa/common/types.hpp"
#include "stacksa/common/unicode.hpp"
#include "stacksa/models/text_models.hpp"

namespace stacksa {

struct EmojiCorpus {
  Corpus documents;
  std::map<Label, std::size_t> counts;
};

namespace emoji {

struct Span {
  std::size_t begin = 0;  // code point offsets, end exclusive
  std::size_t end = 0;
  std::string key;  // the cluster without presentation selectors
};

inline bool is_keycap_base(char32_t c) { return (c >= U'0' && c <= U'9') || c == U'#' || c == U'*'; }

// Splits out emoji clusters: a base followed by modifiers, selectors and
// ZWJ-joined bases, keycap sequences, and regional-indicator pairs.
inline std::vector<Span> find(const std::u32string& s) {
  std::vector<Span> out;
  std::size_t i = 0;
  const std::size_t n = s.size();
  auto is_ri = [](char32_t c) { return c >= 0x1F1E6 && c <= 0x1F1FF; };
  while (i < n) {
    const char32_t c = s[i];
    std::size_t j = i;
    if (is_keycap_base(c)) {
      std::size_t k = i + 1;
      if (k < n && (s[k] == 0xFE0F || s[k] == 0xFE0E)) ++k;
      if (k < n && s[k] == 0x20E3) j = k + 1;
    } else if (is_ri(c)) {
      j = (i + 1 < n && is_ri(s[i + 1])) ? i + 2 : i + 1;
    } else if (unicode::is_emoji_base(c)) {
      j = i + 1;
      while (j < n) {
        if (unicode::is_emoji_extender(s[j])) {
          ++j;
        } else if (s[j] == unicode::kZeroWidthJoiner && j + 1 < n && unicode::is_emoji_base(s[j + 1])) {
          j += 2;
        } else {
          break;
        }
      }
    }
    if (j == i) {
      ++i;
      continue;
    }
    Span sp{i, j, {}};
    for (std::size_t k = i; k < j; ++k)
      if (s[k] != 0xFE0F && s[k] != 0xFE0E) unicode::append(sp.key, s[k]);
    out.push_back(std::move(sp));
    i = j;
  }
  return out;
}

// Emoji clusters found in the text, in order of appearance.
inline std::vector<std::string> extract(std::string_view text) {
  std::vector<std::string> out;
  for (auto& sp : find(unicode::decode(text))) out.push_back(std::move(sp.key));
  return out;
}

// Removes every emoji cluster together with stray joiners and modifiers;
// all other characters, spacing included, are kept as they are.
inline std::string strip(std::string_view text) {
  const auto s = unicode::decode(text);
  const auto spans = find(s);
  std::u32string out;
  std::size_t next = 0;
  auto keep = [&](std::size_t from, std::size_t to) {
    for (std::size_t k = from; k < to; ++k) {
      const char32_t c = s[k];
      if (unicode::is_emoji_extender(c) || c == unicode::kZeroWidthJoiner) continue;
      out.push_back(c);
    }
  };
  for (const auto& sp : spans) {
    keep(next, sp.begin);
    next = sp.end;
  }
  keep(next, s.size());
  return unicode::encode(out);
}

inline bool contains_emoji(std::string_view text) {
  const auto s = unicode::decode(text);
  if (!find(s).empty()) return true;
  return std::any_of(s.begin(), s.end(), [](char32_t c) { return unicode::is_emoji_extender(c); });
}

// "RT" at the start of the text, followed by a space, ':', '@' or nothing.
inline bool is_retweet(std::string_view text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return false;
  text.remove_prefix(first);
  if (!text.starts_with("RT")) return false;
  if (text.size() == 2) return true;
  const char c = text[2];
  return c == ' ' || c == '\t' || c == ':' || c == '@';
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace emoji

// Streaming builder for the emoji corpus. Each eligible text receives a
// priority derived from (seed, text); the max_per_class smallest priorities of
// each class are kept, which is a uniform sample that does not depend on how
// the stream is split.
class EmojiCorpusBuilder {
 public:
  EmojiCorpusBuilder(std::size_t max_per_class, std::size_t class_count, std::uint64_t seed)
      : max_per_class_(max_per_class), class_count_(class_count), seed_(seed) {
    if (max_per_class == 0) throw Error("max_per_class must be positive");
    if (class_count == 0) throw Error("class_count must be positive");
  }

  // Returns true when the text was eligible (one emoji type, not a retweet).
  bool add(std::string_view text) {
    const std::uint64_t position = position_++;
    if (emoji::is_retweet(text)) return false;
    const auto s = unicode::decode(text);
    const auto spans = emoji::find(s);
    if (spans.empty()) return false;
    for (const auto& sp : spans)
      if (sp.key != spans.front().key) return false;
    std::string stripped = emoji::strip(text);
    if (split_whitespace(stripped).empty()) return false;
    const Label& klass = spans.front().key;
    ++seen_[klass];
    const Entry e{mix_seed(seed_, emoji::fnv1a(stripped)), position, std::move(stripped)};
    auto& heap = reservoir_[klass];
    if (heap.size() < max_per_class_) {
      heap.push(e);
    } else if (e < heap.top()) {
      heap.pop();
      heap.push(e);
    }
    return true;
  }

  // Eligible texts per emoji before sampling.
  const std::map<Label, std::size_t>& frequencies() const { return seen_; }

  // The class_count most frequent emojis (ties by code point order), each
  // with its sample, documents in stream order.
  EmojiCorpus finish() const {
    std::vector<std::pair<std::size_t, Label>> ranked;
    for (const auto& [klass, n] : seen_) ranked.emplace_back(n, klass);
    std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    if (ranked.size() > class_count_) ranked.resize(class_count_);
    std::vector<std::pair<std::uint64_t, LabeledDocument>> rows;
    EmojiCorpus out;
    for (const auto& [_, klass] : ranked) {
      auto heap = reservoir_.at(klass);
      out.counts[klass] = heap.size();
      for (; !heap.empty(); heap.pop()) rows.push_back({heap.top().position, {heap.top().text, klass}});
    }
    std::sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    for (auto& [_, doc] : rows) out.documents.push_back(std::move(doc));
    return out;
  }

 private:
  struct Entry {
    std::uint64_t priority;
    std::uint64_t position;
    std::string text;
    bool operator<(const Entry& o) const {
      return priority != o.priority ? priority < o.priority : position < o.position;
    }
  };

  std::size_t max_per_class_;
  std::size_t class_count_;
  std::uint64_t seed_;
  std::uint64_t position_ = 0;
  std::map<Label, std::size_t> seen_;
  std::map<Label, std::priority_queue<Entry>> reservoir_;
};

template <std::ranges::input_range Range>
EmojiCorpus prepare_emoji_corpus(const Range& raw_texts, std::size_t max_per_class, std::size_t class_count,
                                 std::uint64_t seed) {
  EmojiCorpusBuilder builder(max_per_class, class_count, seed);
  for (const auto& text : raw_texts) builder.add(text);
  return builder.finish();
}

// One raw text per line.
inline EmojiCorpus prepare_emoji_corpus(std::istream& lines, std::size_t max_per_class, std::size_t class_count,
                                        std::uint64_t seed) {
  EmojiCorpusBuilder builder(max_per_class, class_count, seed);
  std::string line;
  while (std::getline(lines, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    builder.add(line);
  }
  return builder.finish();
}

inline std::shared_ptr<DecisionSpaceModel> build_emoji_model(const EmojiCorpus& corpus, const TextModelConfig& config,
                                                             const TextResources& resources = {},
                                                             const LinearSvmParams& svm = {},
                                                             std::size_t min_per_class = 1) {
  std::map<Label, std::size_t> counts;
  for (const auto& d : corpus.documents) ++counts[d.label];
  if (counts.size() < 2) throw Error("degenerate emoji corpus: fewer than two classes");
  for (const auto& [klass, n] : counts)
    if (n < min_per_class)
      throw Error("degenerate emoji corpus: class '" + klass + "' has " + std::to_string(n) + " examples");
  return build_decision_space(ModelKind::Emo, corpus.documents, config, resources, svm);
}

}  // namespace stacksa
