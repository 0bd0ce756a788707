#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "stacksa/common/error.hpp"

namespace stacksa::evodag {

enum class Func {
  Input,
  Add,
  Atan,
  NearestCentroid,
  Abs,
  Hypot,
  Max,
  Min,
  Mul,
  GaussianNB,
  MultinomialNB,
  Sin,
  Sqrt,
  Tan,
  Tanh,
};

inline constexpr Func kFunctionSet[] = {Func::Add, Func::Atan, Func::NearestCentroid, Func::Abs, Func::Hypot,
                                        Func::Max, Func::Min,  Func::Mul,             Func::GaussianNB,
                                        Func::MultinomialNB, Func::Sin, Func::Sqrt, Func::Tan, Func::Tanh};

inline std::string_view name_of(Func f) {
  switch (f) {
    case Func::Input: return "Input";
    case Func::Add: return "Add";
    case Func::Atan: return "Atan";
    case Func::NearestCentroid: return "NearestCentroid";
    case Func::Abs: return "Abs";
    case Func::Hypot: return "Hypot";
    case Func::Max: return "Max";
    case Func::Min: return "Min";
    case Func::Mul: return "Mul";
    case Func::GaussianNB: return "GaussianNB";
    case Func::MultinomialNB: return "MultinomialNB";
    case Func::Sin: return "Sin";
    case Func::Sqrt: return "Sqrt";
    case Func::Tan: return "Tan";
    case Func::Tanh: return "Tanh";
  }
  return "?";
}

inline Func func_from_name(std::string_view s) {
  if (s == "Input") return Func::Input;
  for (Func f : kFunctionSet)
    if (name_of(f) == s) return f;
  throw Error("unknown EvoDAG function '" + std::string(s) + "'");
}

inline bool is_classifier(Func f) {
  return f == Func::NearestCentroid || f == Func::GaussianNB || f == Func::MultinomialNB;
}

struct FunctionSpec {
  Func func;
  int arity;
  bool commutative;
  bool unique_args;
};

// Nominal arities: Add 60, Mul 20, Max/Min 5, Hypot 2, NB/MN 5, NC configurable
// (2 by default), the rest unary. Unique arguments are required where a
// repeated argument adds nothing: f(a, b, b) = theta f(a, b).
inline FunctionSpec spec_of(Func f, int nc_arity = 2) {
  switch (f) {
    case Func::Add: return {f, 60, true, true};
    case Func::Mul: return {f, 20, true, false};
    case Func::Max:
    case Func::Min: return {f, 5, true, true};
    case Func::Hypot: return {f, 2, true, false};
    case Func::NearestCentroid: return {f, nc_arity, true, true};
    case Func::GaussianNB:
    case Func::MultinomialNB: return {f, 5, true, true};
    case Func::Input: return {f, 0, false, false};
    default: return {f, 1, false, false};
  }
}

inline constexpr double kTanLimit = 1e6;

// Element-wise value f(v_1, ..., v_m) before the theta scaling. Add and the
// classifier nodes are not element-wise and never reach here.
inline double apply_function(Func f, std::span<const double> v) {
  switch (f) {
    case Func::Atan: return std::atan(v[0]);
    case Func::Abs: return std::fabs(v[0]);
    case Func::Sin: return std::sin(v[0]);
    case Func::Sqrt: return std::sqrt(std::fabs(v[0]));
    case Func::Tan: return std::clamp(std::tan(v[0]), -kTanLimit, kTanLimit);
    case Func::Tanh: return std::tanh(v[0]);
    case Func::Hypot: {
      double acc = 0.0;
      for (double x : v) acc = std::hypot(acc, x);
      return acc;
    }
    case Func::Max: return *std::max_element(v.begin(), v.end());
    case Func::Min: return *std::min_element(v.begin(), v.end());
    case Func::Mul: {
      double p = 1.0;
      for (double x : v) p *= x;
      return p;
    }
    default: throw Error("function '" + std::string(name_of(f)) + "' is not element-wise");
  }
}

}  // namespace stacksa::evodag
