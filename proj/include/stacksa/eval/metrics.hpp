#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/types.hpp"

namespace stacksa {

namespace detail {

struct ClassCounts {
  double tp = 0, fp = 0, fn = 0;
};

inline std::map<Label, ClassCounts> confusion(std::span<const Label> y_true, std::span<const Label> y_pred) {
  if (y_true.size() != y_pred.size()) throw Error("length mismatch between truth and predictions");
  if (y_true.empty()) throw Error("empty label sequence");
  std::map<Label, ClassCounts> c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    if (y_true[i] == y_pred[i]) {
      c[y_true[i]].tp += 1;
    } else {
      c[y_true[i]].fn += 1;
      c[y_pred[i]].fp += 1;
    }
  }
  return c;
}

inline double f1(const ClassCounts& c) {
  const double denom = 2 * c.tp + c.fp + c.fn;
  return denom == 0 ? 0.0 : 2 * c.tp / denom;
}

}  // namespace detail

// Unweighted mean of per-class F1 over classes seen in either sequence.
inline double macro_f1(std::span<const Label> y_true, std::span<const Label> y_pred) {
  const auto c = detail::confusion(y_true, y_pred);
  double sum = 0;
  for (const auto& [_, counts] : c) sum += detail::f1(counts);
  return sum / static_cast<double>(c.size());
}

// Unweighted mean of per-class recall over the classes present in y_true
// (balanced accuracy).
inline double macro_recall(std::span<const Label> y_true, std::span<const Label> y_pred) {
  const auto c = detail::confusion(y_true, y_pred);
  double sum = 0;
  std::size_t n = 0;
  for (const auto& [_, counts] : c) {
    if (counts.tp + counts.fn == 0) continue;
    sum += counts.tp / (counts.tp + counts.fn);
    ++n;
  }
  return sum / static_cast<double>(n);
}

inline double f1_of_class(std::span<const Label> y_true, std::span<const Label> y_pred, const Label& positive) {
  const auto c = detail::confusion(y_true, y_pred);
  auto it = c.find(positive);
  return it == c.end() ? 0.0 : detail::f1(it->second);
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error("length mismatch");
  if (a.size() < 2) throw Error("undefined correlation");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (saa == 0 || sbb == 0) throw Error("undefined correlation");
  return std::clamp(sab / std::sqrt(saa * sbb), -1.0, 1.0);
}

enum class MetricKind { macro_f1, macro_recall, f1_positive, pearson };

struct Metric {
  MetricKind kind = MetricKind::macro_f1;
  Label positive_class;  // f1_positive only

  static Metric parse(std::string_view name) {
    if (name == "macro-f1" || name == "macroF1") return {MetricKind::macro_f1, {}};
    if (name == "macro-recall" || name == "macroRecall") return {MetricKind::macro_recall, {}};
    if (name == "pearson") return {MetricKind::pearson, {}};
    if (name.starts_with("f1:")) return {MetricKind::f1_positive, Label(name.substr(3))};
    throw Error("unknown metric '" + std::string(name) + "'");
  }

  std::string name() const {
    switch (kind) {
      case MetricKind::macro_f1:
        return "macro-f1";
      case MetricKind::macro_recall:
        return "macro-recall";
      case MetricKind::f1_positive:
        return "f1:" + positive_class;
      case MetricKind::pearson:
        return "pearson";
    }
    return "?";
  }
};

// Ordinal labels as numbers: numeric labels keep their value, anything else
// maps to its rank in the sorted label set.
inline std::vector<double> ordinal_values(std::span<const Label> labels, std::span<const Label> universe) {
  auto parse = [](const Label& s, double& out) {
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && p == s.data() + s.size();
  };
  bool numeric = true;
  double tmp;
  for (const auto& l : universe) numeric = numeric && parse(l, tmp);
  const auto order = class_order(universe);
  std::vector<double> out;
  out.reserve(labels.size());
  for (const auto& l : labels) {
    if (numeric) {
      parse(l, tmp);
      out.push_back(tmp);
    } else {
      out.push_back(static_cast<double>(std::lower_bound(order.begin(), order.end(), l) - order.begin()));
    }
  }
  return out;
}

inline double score(const Metric& m, std::span<const Label> y_true, std::span<const Label> y_pred) {
  switch (m.kind) {
    case MetricKind::macro_f1:
      return macro_f1(y_true, y_pred);
    case MetricKind::macro_recall:
      return macro_recall(y_true, y_pred);
    case MetricKind::f1_positive:
      return f1_of_class(y_true, y_pred, m.positive_class);
    case MetricKind::pearson: {
      std::vector<Label> universe(y_true.begin(), y_true.end());
      universe.insert(universe.end(), y_pred.begin(), y_pred.end());
      return pearson(ordinal_values(y_true, universe), ordinal_values(y_pred, universe));
    }
  }
  return 0.0;
}

// Ranks with 1 = highest score; tied scores share the midpoint rank.
inline std::vector<double> midpoint_ranks(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return scores[a] > scores[b]; });
  std::vector<double> ranks(scores.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double r = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = r;
    i = j + 1;
  }
  return ranks;
}

}  // namespace stacksa
