#pragma once

#include <map>
#include <span>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/rng.hpp"
#include "stacksa/common/types.hpp"

namespace stacksa {

// Stratified k-fold assignment. Rows of each class are shuffled with a stream
// derived from (seed, class rank) and dealt round-robin, continuing where the
// previous class stopped so fold sizes stay within one of each other.
// The assignment depends only on the labels and the seed.
inline std::vector<int> stratified_folds(std::span<const Label> labels, int k, std::uint64_t seed) {
  if (k < 2) throw Error("k must be at least 2");
  std::map<Label, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  for (const auto& [label, rows] : by_class)
    if (rows.size() < static_cast<std::size_t>(k))
      throw Error("insufficient examples for k folds (class '" + label + "' has " +
                  std::to_string(rows.size()) + ")");
  std::vector<int> fold(labels.size(), -1);
  std::size_t offset = 0;
  std::uint64_t rank = 0;
  for (auto& [label, rows] : by_class) {
    Rng rng(mix_seed(seed, rank++));
    rng.shuffle(rows);
    for (std::size_t j = 0; j < rows.size(); ++j)
      fold[rows[j]] = static_cast<int>((offset + j) % static_cast<std::size_t>(k));
    offset = (offset + rows.size()) % static_cast<std::size_t>(k);
  }
  return fold;
}

struct FoldSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

inline FoldSplit fold_split(std::span<const int> fold, int which) {
  FoldSplit s;
  for (std::size_t i = 0; i < fold.size(); ++i) (fold[i] == which ? s.test : s.train).push_back(i);
  return s;
}

template <class T>
std::vector<T> gather(std::span<const T> items, std::span<const std::size_t> idx) {
  std::vector<T> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(items[i]);
  return out;
}

template <class T>
std::vector<T> gather(const std::vector<T>& items, std::span<const std::size_t> idx) {
  return gather(std::span<const T>(items), idx);
}

}  // namespace stacksa
