#pragma once

#include <cstdint>
#include <cstdio>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/types.hpp"
#include "stacksa/evodag/classifiers.hpp"
#include "stacksa/evodag/functions.hpp"

namespace stacksa::evodag {

struct DagNode {
  std::size_t id = 0;
  Func func = Func::Input;
  std::size_t input = 0;          // feature index, Input nodes only
  std::vector<std::size_t> args;  // ids of earlier nodes
  // For each argument, the feature index when that argument is an Input node
  // and -1 otherwise. Classifier nodes read raw features through it.
  std::vector<long> raw_inputs;
  std::vector<double> theta;
  double fitness = 0.0;     // macro-recall on the internal training split
  double mse = 0.0;         // against the +-1 one-vs-rest targets
  double validation = 0.0;  // macro-recall on the validation split
};

// Width of the feature view a classifier node sees: one raw feature per Input
// argument, all class outputs of every other argument.
inline std::size_t feature_width(const DagNode& n, std::size_t classes) {
  std::size_t F = 0;
  for (long r : n.raw_inputs) F += r >= 0 ? 1 : classes;
  return F;
}

inline std::size_t expected_theta_size(const DagNode& n, std::size_t classes) {
  if (n.func == Func::Input) return classes;
  if (n.func == Func::Add) return classes * n.args.size();
  if (is_classifier(n.func)) return classifier_theta_size(n.func, feature_width(n, classes), classes);
  return classes;
}

// Raw value of class j before theta, for element-wise functions.
inline double elementwise_raw(const DagNode& n, std::size_t j, std::span<const double* const> args, std::size_t stride,
                              std::vector<double>& scratch) {
  scratch.resize(args.size());
  for (std::size_t k = 0; k < args.size(); ++k) scratch[k] = args[k][j * stride];
  return apply_function(n.func, scratch);
}

// One row of node output. `x` is the raw feature row; argument k's output for
// class j is args[k][j * stride].
inline void node_output(const DagNode& n, std::size_t classes, const double* x, std::span<const double* const> args,
                        std::size_t stride, double* out, std::vector<double>& scratch) {
  const std::size_t c = classes;
  if (n.func == Func::Input) {
    for (std::size_t j = 0; j < c; ++j) out[j] = n.theta[j] * x[n.input];
  } else if (n.func == Func::Add) {
    const std::size_t m = args.size();
    for (std::size_t j = 0; j < c; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < m; ++k) s += n.theta[j * m + k] * args[k][j * stride];
      out[j] = s;
    }
  } else if (is_classifier(n.func)) {
    scratch.clear();
    for (std::size_t k = 0; k < args.size(); ++k) {
      if (n.raw_inputs[k] >= 0) {
        scratch.push_back(x[n.raw_inputs[k]]);
      } else {
        for (std::size_t j = 0; j < c; ++j) scratch.push_back(args[k][j * stride]);
      }
    }
    classifier_scores(n.func, n.theta, scratch.size(), c, scratch.data(), out);
  } else {
    for (std::size_t j = 0; j < c; ++j) out[j] = n.theta[j] * elementwise_raw(n, j, args, stride, scratch);
  }
}

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// The evolved classifier: the sub-DAG reachable from the best node, stored in
// topological (creation) order with node ids renumbered 0..size-1. The last
// node is the output.
class EvoDagModel {
 public:
  EvoDagModel() = default;
  EvoDagModel(std::vector<Label> classes, std::size_t input_dim, std::vector<DagNode> nodes)
      : classes_(std::move(classes)), input_dim_(input_dim), nodes_(std::move(nodes)) {
    if (classes_.size() < 2) throw Error("an EvoDAG model needs at least two classes");
    if (nodes_.empty()) throw Error("an EvoDAG model needs at least one node");
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
      auto& n = nodes_[i];
      if (n.id != i) throw Error("EvoDAG node ids must be 0..size-1 in order");
      if (n.func == Func::Input) {
        if (n.input >= input_dim_) throw Error("EvoDAG input index out of range");
        if (!n.args.empty()) throw Error("Input nodes take no arguments");
      } else if (n.args.empty()) {
        throw Error("EvoDAG function node without arguments");
      }
      n.raw_inputs.assign(n.args.size(), -1);
      for (std::size_t k = 0; k < n.args.size(); ++k) {
        if (n.args[k] >= i) throw Error("EvoDAG arguments must reference earlier nodes");
        const auto& a = nodes_[n.args[k]];
        if (a.func == Func::Input) n.raw_inputs[k] = static_cast<long>(a.input);
      }
      if (n.theta.size() != expected_theta_size(n, classes_.size()))
        throw Error("EvoDAG node " + std::to_string(i) + " has a theta block of the wrong size");
    }
  }

  const std::vector<Label>& classes() const { return classes_; }
  std::size_t input_dim() const { return input_dim_; }
  const std::vector<DagNode>& nodes() const { return nodes_; }
  const DagNode& root() const { return nodes_.back(); }

  DenseVector decision_function(std::span<const double> x) const {
    if (x.size() != input_dim_)
      throw Error("EvoDAG input has width " + std::to_string(x.size()) + ", expected " + std::to_string(input_dim_));
    const std::size_t c = classes_.size();
    std::vector<double> outs(nodes_.size() * c);
    std::vector<const double*> args;
    std::vector<double> scratch;
    for (const auto& n : nodes_) {
      args.clear();
      for (auto a : n.args) args.push_back(outs.data() + a * c);
      node_output(n, c, x.data(), args, 1, outs.data() + n.id * c, scratch);
    }
    return DenseVector(outs.end() - static_cast<long>(c), outs.end());
  }

  Label predict(std::span<const double> x) const {
    const auto d = decision_function(x);
    std::size_t best = 0;
    for (std::size_t j = 1; j < d.size(); ++j)
      if (d[j] > d[best]) best = j;
    return classes_[best];
  }

  // One line per node: "n<id> = <func>(<args>) theta=[...]".
  std::string export_text() const {
    std::ostringstream out;
    for (const auto& n : nodes_) {
      out << 'n' << n.id << " = " << name_of(n.func) << '(';
      if (n.func == Func::Input) {
        out << 'x' << n.input;
      } else {
        for (std::size_t k = 0; k < n.args.size(); ++k) out << (k ? ", " : "") << 'n' << n.args[k];
      }
      out << ") theta=[";
      for (std::size_t k = 0; k < n.theta.size(); ++k) out << (k ? " " : "") << format_double(n.theta[k]);
      out << "]\n";
    }
    return out.str();
  }

  // Graphviz rendering: inputs red, internal nodes blue, the output green.
  std::string export_dot() const {
    std::ostringstream out;
    out << "digraph evodag {\n  rankdir=BT;\n  node [style=filled];\n";
    for (const auto& n : nodes_) {
      const bool is_root = n.id + 1 == nodes_.size();
      const char* color = is_root ? "green" : n.func == Func::Input ? "red" : "lightblue";
      std::string label(name_of(n.func));
      if (n.func == Func::Input) label = "X" + std::to_string(n.input);
      out << "  n" << n.id << " [label=\"" << label << "\", fillcolor=" << color << "];\n";
    }
    for (const auto& n : nodes_)
      for (auto a : n.args) out << "  n" << a << " -> n" << n.id << ";\n";
    out << "}\n";
    return out.str();
  }

  // FNV-1a over the text export; equal fingerprints mean equal models.
  std::uint64_t fingerprint() const {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : export_text()) {
      h ^= ch;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  std::vector<Label> classes_;
  std::size_t input_dim_ = 0;
  std::vector<DagNode> nodes_;
};

}  // namespace stacksa::evodag
