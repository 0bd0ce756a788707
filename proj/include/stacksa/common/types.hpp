#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

namespace stacksa {

using Label = std::string;

struct LabeledDocument {
  std::string text;
  Label label;

  bool operator==(const LabeledDocument&) const = default;
};

using Corpus = std::vector<LabeledDocument>;

using DenseVector = std::vector<double>;

// Sorted, duplicate-free label set. This is the canonical class order used by
// every classifier in the library.
inline std::vector<Label> class_order(std::span<const Label> labels) {
  std::vector<Label> out(labels.begin(), labels.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::vector<std::string> texts_of(const Corpus& corpus) {
  std::vector<std::string> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) out.push_back(doc.text);
  return out;
}

inline std::vector<Label> labels_of(const Corpus& corpus) {
  std::vector<Label> out;
  out.reserve(corpus.size());
  for (const auto& doc : corpus) out.push_back(doc.label);
  return out;
}

}  // namespace stacksa
