#pragma once

// Independent reference implementations used only by tests.

#include <algorithm>
#include <string>
#include <vector>

namespace oracle {

// Brute-force tokenizer over code points; whitespace is ASCII space only.
inline std::vector<std::u32string> words(const std::u32string& s) {
  std::vector<std::u32string> out;
  std::u32string cur;
  for (char32_t c : s + U" ") {
    if (c == U' ') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

inline std::vector<std::u32string> qgrams(const std::u32string& s, int q) {
  std::vector<std::u32string> out;
  for (std::size_t i = 0; i + q <= s.size(); ++i) out.push_back(s.substr(i, q));
  return out;
}

// gap = 0 gives contiguous n-grams.
inline std::vector<std::u32string> word_tuples(const std::u32string& s, int n, int gap) {
  auto w = words(s);
  std::vector<std::u32string> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    std::u32string t;
    std::size_t j = i;
    int taken = 0;
    for (; taken < n && j < w.size(); ++taken, j += gap + 1) t += (taken ? U" " : U"") + w[j];
    if (taken == n) out.push_back(t);
  }
  return out;
}

}  // namespace oracle
