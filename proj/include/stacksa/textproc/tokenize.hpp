#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "stacksa/common/unicode.hpp"
#include "stacksa/textproc/config.hpp"
#include "stacksa/textproc/normalize.hpp"

namespace stacksa {

enum class TokenFamily { word_ngram, skipgram, qgram };

struct Token {
  TokenFamily family;
  std::string text;
  int skip = 0;  // skip length for skip-grams, 0 otherwise

  // Family-tagged key; equal surface strings from different families never
  // collide in a vocabulary.
  std::string key() const {
    switch (family) {
      case TokenFamily::word_ngram:
        return "w|" + text;
      case TokenFamily::skipgram:
        return "s" + std::to_string(skip) + "|" + text;
      case TokenFamily::qgram:
        return "q|" + text;
    }
    return text;
  }

  bool operator==(const Token&) const = default;
};

using TokenBag = std::vector<Token>;

// Contiguous word n-grams.
inline void word_ngrams(const std::vector<std::string>& words, int n, TokenBag& out) {
  const auto len = static_cast<int>(words.size());
  for (int i = 0; i + n <= len; ++i) {
    std::string t = words[i];
    for (int j = 1; j < n; ++j) t += " " + words[i + j];
    out.push_back({TokenFamily::word_ngram, std::move(t)});
  }
}

// Skip-gram (a, b): positions i, i+(b+1), ..., i+(a-1)(b+1).
inline void skipgrams(const std::vector<std::string>& words, SkipGram sg, TokenBag& out) {
  const auto len = static_cast<int>(words.size());
  const int span = (sg.words - 1) * (sg.skip + 1);
  for (int i = 0; i + span < len; ++i) {
    std::string t = words[i];
    for (int j = 1; j < sg.words; ++j) t += " " + words[i + j * (sg.skip + 1)];
    out.push_back({TokenFamily::skipgram, std::move(t), sg.skip});
  }
}

// Character q-grams over code points, spaces included.
inline void qgrams(const std::u32string& chars, int q, TokenBag& out) {
  const auto len = static_cast<int>(chars.size());
  for (int i = 0; i + q <= len; ++i)
    out.push_back({TokenFamily::qgram, unicode::encode(std::u32string_view(chars).substr(i, q))});
}

// Tokenizes already-normalized text with every tokenizer enabled in config.
inline TokenBag tokenize(std::string_view text, const TextModelConfig& config) {
  TokenBag bag;
  const auto words = split_whitespace(text);
  for (int n : config.nwords) word_ngrams(words, n, bag);
  for (const auto& sg : config.skipgrams) skipgrams(words, sg, bag);
  if (!config.qgrams.empty()) {
    const std::u32string chars = unicode::decode(text);
    for (int q : config.qgrams) qgrams(chars, q, bag);
  }
  return bag;
}

}  // namespace stacksa
