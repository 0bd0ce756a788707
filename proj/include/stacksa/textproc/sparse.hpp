#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/types.hpp"

namespace stacksa {

struct SparseEntry {
  std::uint32_t index;
  double weight;
  bool operator==(const SparseEntry&) const = default;
};

// Strictly increasing indices, all below dimension.
struct SparseVector {
  std::vector<SparseEntry> entries;
  std::size_t dimension = 0;

  bool operator==(const SparseVector&) const = default;

  double norm() const {
    double s = 0.0;
    for (const auto& e : entries) s += e.weight * e.weight;
    return std::sqrt(s);
  }

  DenseVector to_dense() const {
    DenseVector out(dimension, 0.0);
    for (const auto& e : entries) out[e.index] = e.weight;
    return out;
  }

  static SparseVector from_dense(std::span<const double> dense) {
    SparseVector v;
    v.dimension = dense.size();
    for (std::size_t i = 0; i < dense.size(); ++i)
      if (dense[i] != 0.0) v.entries.push_back({static_cast<std::uint32_t>(i), dense[i]});
    return v;
  }

  void check() const {
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (entries[i].index >= dimension) throw Error("sparse index out of range");
      if (i && entries[i].index <= entries[i - 1].index) throw Error("sparse indices not increasing");
      if (!std::isfinite(entries[i].weight)) throw Error("non-finite sparse weight");
    }
  }
};

}  // namespace stacksa
