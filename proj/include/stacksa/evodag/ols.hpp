#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <vector>

#include "stacksa/common/error.hpp"

namespace stacksa::evodag {

inline constexpr double kRidge = 1e-9;

// Least squares min ||A theta - t|| through the normal equations with a small
// ridge on the diagonal, solved by Cholesky. Columns are given as pointers to
// `rows` contiguous values. Returns nullopt when anything is non-finite.
inline std::optional<std::vector<double>> fit_params_ols(std::span<const double* const> columns, std::size_t rows,
                                                         const double* target, double ridge = kRidge) {
  const std::size_t m = columns.size();
  if (m == 0) throw Error("OLS needs at least one column");
  std::vector<double> G(m * m), b(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double* ci = columns[i];
    for (std::size_t j = 0; j <= i; ++j) {
      const double* cj = columns[j];
      double s = 0.0;
      for (std::size_t r = 0; r < rows; ++r) s += ci[r] * cj[r];
      G[i * m + j] = G[j * m + i] = s;
    }
    double s = 0.0;
    for (std::size_t r = 0; r < rows; ++r) s += ci[r] * target[r];
    b[i] = s;
    G[i * m + i] += ridge;
  }
  // In-place Cholesky, lower triangle.
  for (std::size_t j = 0; j < m; ++j) {
    double d = G[j * m + j];
    for (std::size_t k = 0; k < j; ++k) d -= G[j * m + k] * G[j * m + k];
    if (!(d > 0.0) || !std::isfinite(d)) return std::nullopt;
    d = std::sqrt(d);
    G[j * m + j] = d;
    for (std::size_t i = j + 1; i < m; ++i) {
      double s = G[i * m + j];
      for (std::size_t k = 0; k < j; ++k) s -= G[i * m + k] * G[j * m + k];
      G[i * m + j] = s / d;
    }
  }
  for (std::size_t i = 0; i < m; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= G[i * m + k] * b[k];
    b[i] = s / G[i * m + i];
  }
  for (std::size_t i = m; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < m; ++k) s -= G[k * m + i] * b[k];
    b[i] = s / G[i * m + i];
  }
  for (double v : b)
    if (!std::isfinite(v)) return std::nullopt;
  return b;
}

inline std::optional<std::vector<double>> fit_params_ols(const std::vector<std::vector<double>>& columns,
                                                         const std::vector<double>& target, double ridge = kRidge) {
  std::vector<const double*> ptrs;
  for (const auto& c : columns) {
    if (c.size() != target.size()) throw Error("OLS column length differs from target length");
    ptrs.push_back(c.data());
  }
  return fit_params_ols(ptrs, target.size(), target.data(), ridge);
}

}  // namespace stacksa::evodag
