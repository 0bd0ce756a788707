#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/rng.hpp"
#include "stacksa/common/types.hpp"
#include "stacksa/evodag/classifiers.hpp"
#include "stacksa/evodag/functions.hpp"
#include "stacksa/evodag/model.hpp"
#include "stacksa/evodag/ols.hpp"

namespace stacksa::evodag {

struct EvoDagParams {
  std::size_t population_size = 100;
  std::size_t tournament_size = 2;
  std::size_t early_stop_window = 4000;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
  std::optional<double> time_budget;  // seconds
  std::size_t max_evaluations = 0;    // 0 means no cap
  int nc_arity = 2;
  std::vector<Func> functions{std::begin(kFunctionSet), std::end(kFunctionSet)};

  void validate() const {
    if (tournament_size < 2) throw Error("tournament_size must be at least 2");
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw Error("train_fraction must lie in (0, 1)");
    if (early_stop_window == 0) throw Error("early_stop_window must be positive");
    if (nc_arity < 1) throw Error("nc_arity must be positive");
    if (functions.empty()) throw Error("the function set is empty");
    for (Func f : functions)
      if (f == Func::Input) throw Error("Input is not a function");
    if (time_budget && !(*time_budget > 0.0)) throw Error("time_budget must be positive");
  }
};

struct EvolutionStats {
  std::size_t evaluations = 0;
  std::size_t best_evaluation = 0;
  std::size_t skipped = 0;
  double best_validation = 0.0;
  bool stopped_by_time = false;
  bool stopped_by_cap = false;
  // (evaluation index, score) at every improvement of the best validator.
  std::vector<std::pair<std::size_t, double>> improvements;
};

// Steady-state GP over node outputs cached on the whole (internal train +
// validation) data. Exposes the individual steps so that their invariants can
// be probed; `run` performs the complete evolution.
class Population {
 public:
  static constexpr int kResampleAttempts = 5;

  Population(std::span<const DenseVector> X, std::span<const Label> y, EvoDagParams params)
      : params_(std::move(params)), rng_(mix_seed(params_.seed, 0xE70DA6)) {
    params_.validate();
    if (X.size() != y.size()) throw Error("EvoDAG: " + std::to_string(X.size()) + " rows but " +
                                          std::to_string(y.size()) + " labels");
    classes_ = class_order(y);
    if (classes_.size() < 2) throw Error("degenerate labels: EvoDAG needs at least two classes");
    // Both internal splits must see every class.
    for (const auto& c : classes_)
      if (std::count(y.begin(), y.end(), c) < 2)
        throw Error("EvoDAG needs at least two rows of class '" + c + "'");
    d_ = X.front().size();
    if (d_ == 0) throw Error("EvoDAG input width must be positive");
    if (params_.population_size < d_ + 3)
      throw Error("population_size " + std::to_string(params_.population_size) + " is too small for " +
                  std::to_string(d_) + " inputs (needs at least inputs + 3)");
    for (const auto& row : X) {
      if (row.size() != d_) throw Error("EvoDAG rows have different widths");
      for (double v : row)
        if (!std::isfinite(v)) throw Error("EvoDAG input contains non-finite values");
    }
    split(X, y);
  }

  // P0: one theta*x_i per input, the three classifiers over all inputs, then
  // random functions over the not-yet-used inputs, then over P0 itself.
  void initialize() {
    if (initialized_) throw Error("population already initialized");
    initialized_ = true;
    std::vector<std::size_t> inputs;
    for (std::size_t i = 0; i < d_ && members_.size() < params_.population_size; ++i) {
      auto id = build_input(i);
      if (!id) throw Error("input " + std::to_string(i) + " produced non-finite outputs");
      inputs.push_back(*id);
      admit(*id);
    }
    for (Func f : {Func::NearestCentroid, Func::GaussianNB, Func::MultinomialNB}) {
      if (members_.size() >= params_.population_size) break;
      if (std::find(params_.functions.begin(), params_.functions.end(), f) == params_.functions.end()) continue;
      if (auto id = build(f, inputs)) admit(*id);
      else ++stats_.skipped;
    }
    std::vector<std::size_t> unused = inputs;
    while (!unused.empty() && members_.size() < params_.population_size) {
      std::optional<std::size_t> id;
      for (int attempt = 0; attempt < kResampleAttempts && !id; ++attempt) {
        const Func f = random_function();
        const auto spec = spec_of(f, params_.nc_arity);
        std::vector<std::size_t> args;
        std::vector<std::size_t> pool = unused;
        const std::size_t take = std::min<std::size_t>(static_cast<std::size_t>(spec.arity), pool.size());
        for (std::size_t k = 0; k < take; ++k) {
          const std::size_t at = rng_.index(pool.size());
          args.push_back(pool[at]);
          pool.erase(pool.begin() + static_cast<long>(at));
        }
        // multi-ary functions take at least two arguments
        if (spec.arity >= 2 && args.size() < 2) top_up(args, spec.unique_args);
        canonicalize(args, spec);
        id = build(f, args);
        if (id) unused = pool;
      }
      if (id) admit(*id);
      else ++stats_.skipped;
      if (!id) unused.erase(unused.begin());  // give up on one input rather than loop forever
    }
    std::size_t failures = 0;
    while (members_.size() < params_.population_size) {
      if (auto id = offspring(/*tournament=*/false)) {
        admit(*id);
      } else if (++failures > 100 * params_.population_size) {
        throw Error("could not fill the initial EvoDAG population with finite nodes");
      }
    }
  }

  // One steady-state step: create an offspring and let it replace the loser of
  // a negative tournament. The first population_size offspring take uniform
  // random arguments, later ones take tournament winners.
  void step() {
    if (!initialized_) throw Error("population not initialized");
    const bool later = offspring_created_ >= params_.population_size;
    ++offspring_created_;
    auto id = offspring(later);
    if (!id) return;
    track_best(*id);
    const std::size_t slot = negative_tournament();
    release(members_[slot]);
    members_[slot] = *id;
  }

  EvoDagModel run() {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    if (!initialized_) initialize();
    while (stats_.evaluations - stats_.best_evaluation < params_.early_stop_window) {
      if (params_.max_evaluations && stats_.evaluations >= params_.max_evaluations) {
        stats_.stopped_by_cap = true;
        break;
      }
      if (params_.time_budget &&
          std::chrono::duration<double>(clock::now() - start).count() >= *params_.time_budget) {
        stats_.stopped_by_time = true;
        break;
      }
      step();
    }
    return extract(best_);
  }

  // Nominal arity clipped to the pool size, never below two for multi-ary functions.
  static std::size_t clipped_arity(const FunctionSpec& spec, std::size_t pool) {
    if (spec.arity <= 1) return 1;
    return std::max<std::size_t>(2, std::min<std::size_t>(static_cast<std::size_t>(spec.arity), pool));
  }

  // Winner (or, when negative, loser) position of a size-k tournament over the
  // given member positions; fitness first, then lower MSE, then draw order.
  std::size_t tournament(std::span<const std::size_t> positions, bool negative) {
    const std::size_t k = std::min(params_.tournament_size, positions.size());
    std::vector<std::size_t> drawn;
    std::vector<std::size_t> pool(positions.begin(), positions.end());
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t at = rng_.index(pool.size());
      drawn.push_back(pool[at]);
      pool.erase(pool.begin() + static_cast<long>(at));
    }
    std::size_t pick = drawn.front();
    for (std::size_t i = 1; i < drawn.size(); ++i) {
      const auto& a = nodes_[members_[drawn[i]]];
      const auto& b = nodes_[members_[pick]];
      const bool a_better = a.fitness != b.fitness ? a.fitness > b.fitness : a.mse < b.mse;
      const bool a_worse = a.fitness != b.fitness ? a.fitness < b.fitness : a.mse > b.mse;
      if (negative ? a_worse : a_better) pick = drawn[i];
    }
    return pick;
  }

  // Builds a node from a function and argument ids; nullopt if any output is
  // non-finite. Stored nodes are never discarded, only their outputs.
  std::optional<std::size_t> build(Func f, const std::vector<std::size_t>& args) {
    ++stats_.evaluations;
    DagNode node;
    node.id = nodes_.size();
    node.func = f;
    node.args = args;
    for (auto a : args) {
      if (a >= nodes_.size() || outputs_[a].empty()) throw Error("argument is not a live node");
      node.raw_inputs.push_back(nodes_[a].func == Func::Input ? static_cast<long>(nodes_[a].input) : -1);
    }
    const std::size_t c = classes_.size();
    if (f == Func::Add) {
      const std::size_t m = args.size();
      node.theta.resize(c * m);
      std::vector<const double*> cols(m);
      for (std::size_t j = 0; j < c; ++j) {
        for (std::size_t k = 0; k < m; ++k) cols[k] = outputs_[args[k]].data() + j * n_;
        auto theta = fit_params_ols(cols, n_train_, targets_.data() + j * n_train_);
        if (!theta) return reject();
        std::copy(theta->begin(), theta->end(), node.theta.begin() + static_cast<long>(j * m));
      }
    } else if (is_classifier(f)) {
      const std::size_t F = feature_width(node, c);
      std::vector<double> block(n_train_ * F);
      for (std::size_t r = 0; r < n_train_; ++r) {
        double* dst = block.data() + r * F;
        for (std::size_t k = 0; k < args.size(); ++k) {
          if (node.raw_inputs[k] >= 0) {
            *dst++ = X_[r * d_ + static_cast<std::size_t>(node.raw_inputs[k])];
          } else {
            for (std::size_t j = 0; j < c; ++j) *dst++ = outputs_[args[k]][j * n_ + r];
          }
        }
      }
      node.theta = fit_classifier(f, {block, F, std::span<const int>(y_.data(), n_train_), c});
    } else {
      node.theta.resize(c);
      std::vector<double> raw(n_train_);
      std::vector<const double*> argp(args.size());
      std::vector<double> scratch;
      for (std::size_t j = 0; j < c; ++j) {
        for (std::size_t r = 0; r < n_train_; ++r) {
          for (std::size_t k = 0; k < args.size(); ++k) argp[k] = outputs_[args[k]].data() + r;
          raw[r] = elementwise_raw(node, j, argp, n_, scratch);
          if (!std::isfinite(raw[r])) return reject();
        }
        const double* col = raw.data();
        auto theta = fit_params_ols(std::span<const double* const>(&col, 1), n_train_, targets_.data() + j * n_train_);
        if (!theta) return reject();
        node.theta[j] = theta->front();
      }
    }
    std::vector<double> out;
    if (!evaluate(node, out)) return reject();
    score(node, out);
    nodes_.push_back(std::move(node));
    outputs_.push_back(std::move(out));
    return nodes_.size() - 1;
  }

  std::optional<std::size_t> build_input(std::size_t i) {
    ++stats_.evaluations;
    DagNode node;
    node.id = nodes_.size();
    node.func = Func::Input;
    node.input = i;
    node.theta.resize(classes_.size());
    const double* col = Xc_.data() + i * n_;
    for (std::size_t j = 0; j < classes_.size(); ++j) {
      auto theta = fit_params_ols(std::span<const double* const>(&col, 1), n_train_, targets_.data() + j * n_train_);
      if (!theta) return reject();
      node.theta[j] = theta->front();
    }
    std::vector<double> out;
    if (!evaluate(node, out)) return reject();
    score(node, out);
    nodes_.push_back(std::move(node));
    outputs_.push_back(std::move(out));
    return nodes_.size() - 1;
  }

  // Reachable sub-DAG of `id`, renumbered in creation order.
  EvoDagModel extract(std::size_t id) const {
    std::vector<bool> keep(nodes_.size(), false);
    std::vector<std::size_t> stack{id};
    while (!stack.empty()) {
      const std::size_t n = stack.back();
      stack.pop_back();
      if (keep[n]) continue;
      keep[n] = true;
      for (auto a : nodes_[n].args) stack.push_back(a);
    }
    std::vector<std::size_t> remap(nodes_.size(), 0);
    std::vector<DagNode> out;
    for (std::size_t n = 0; n <= id; ++n) {
      if (!keep[n]) continue;
      remap[n] = out.size();
      DagNode copy = nodes_[n];
      copy.id = out.size();
      for (auto& a : copy.args) a = remap[a];
      out.push_back(std::move(copy));
    }
    return EvoDagModel(classes_, d_, std::move(out));
  }

  const std::vector<Label>& classes() const { return classes_; }
  const std::vector<DagNode>& nodes() const { return nodes_; }
  const std::vector<std::size_t>& members() const { return members_; }
  const EvolutionStats& stats() const { return stats_; }
  const EvoDagParams& params() const { return params_; }
  std::size_t best() const { return best_; }
  std::size_t input_dim() const { return d_; }
  std::size_t train_rows() const { return n_train_; }
  std::size_t rows() const { return n_; }
  // Cached outputs of a live node, class-major: value(class j, row r) = out[j * rows() + r].
  // Rows are ordered internal-train first, then validation.
  const std::vector<double>& outputs(std::size_t id) const { return outputs_.at(id); }
  // Original row index of internal row r.
  std::size_t original_row(std::size_t r) const { return order_[r]; }
  // Class index of internal row r.
  int label_index(std::size_t r) const { return y_[r]; }
  const std::vector<double>& targets() const { return targets_; }

 private:
  void split(std::span<const DenseVector> X, std::span<const Label> y) {
    std::map<Label, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < y.size(); ++i) by_class[y[i]].push_back(i);
    Rng split_rng(mix_seed(params_.seed, 0x5B117));
    std::vector<std::size_t> train, valid;
    for (auto& [label, rows] : by_class) {
      split_rng.shuffle(rows);
      std::size_t t = static_cast<std::size_t>(std::llround(params_.train_fraction * static_cast<double>(rows.size())));
      t = std::clamp<std::size_t>(t, 1, rows.size() > 1 ? rows.size() - 1 : 1);
      train.insert(train.end(), rows.begin(), rows.begin() + static_cast<long>(t));
      valid.insert(valid.end(), rows.begin() + static_cast<long>(t), rows.end());
    }
    std::sort(train.begin(), train.end());
    std::sort(valid.begin(), valid.end());
    order_ = train;
    order_.insert(order_.end(), valid.begin(), valid.end());
    n_ = order_.size();
    n_train_ = train.size();
    X_.resize(n_ * d_);
    Xc_.resize(n_ * d_);
    y_.resize(n_);
    for (std::size_t r = 0; r < n_; ++r) {
      const auto& row = X[order_[r]];
      for (std::size_t f = 0; f < d_; ++f) {
        X_[r * d_ + f] = row[f];
        Xc_[f * n_ + r] = row[f];
      }
      y_[r] = static_cast<int>(std::lower_bound(classes_.begin(), classes_.end(), y[order_[r]]) - classes_.begin());
    }
    const std::size_t c = classes_.size();
    targets_.resize(c * n_train_);
    for (std::size_t j = 0; j < c; ++j)
      for (std::size_t r = 0; r < n_train_; ++r) targets_[j * n_train_ + r] = y_[r] == static_cast<int>(j) ? 1.0 : -1.0;
    valid_count_.assign(c, 0);
    train_count_.assign(c, 0);
    for (std::size_t r = 0; r < n_; ++r) ++(r < n_train_ ? train_count_ : valid_count_)[static_cast<std::size_t>(y_[r])];
  }

  std::optional<std::size_t> reject() { return std::nullopt; }

  bool evaluate(const DagNode& node, std::vector<double>& out) const {
    const std::size_t c = classes_.size();
    out.assign(c * n_, 0.0);
    std::vector<const double*> argp(node.args.size());
    std::vector<double> row(c), scratch;
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t k = 0; k < node.args.size(); ++k) argp[k] = outputs_[node.args[k]].data() + r;
      node_output(node, c, X_.data() + r * d_, argp, n_, row.data(), scratch);
      for (std::size_t j = 0; j < c; ++j) {
        if (!std::isfinite(row[j])) return false;
        out[j * n_ + r] = row[j];
      }
    }
    return true;
  }

  // Macro-recall of argmax predictions on [from, to), plus MSE on the train part.
  void score(DagNode& node, const std::vector<double>& out) const {
    const std::size_t c = classes_.size();
    auto recall = [&](std::size_t from, std::size_t to, const std::vector<std::size_t>& counts) {
      std::vector<std::size_t> hit(c, 0);
      for (std::size_t r = from; r < to; ++r) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < c; ++j)
          if (out[j * n_ + r] > out[best * n_ + r]) best = j;
        if (static_cast<int>(best) == y_[r]) ++hit[best];
      }
      double sum = 0.0;
      std::size_t present = 0;
      for (std::size_t j = 0; j < c; ++j) {
        if (!counts[j]) continue;
        sum += static_cast<double>(hit[j]) / static_cast<double>(counts[j]);
        ++present;
      }
      return present ? sum / static_cast<double>(present) : 0.0;
    };
    node.fitness = recall(0, n_train_, train_count_);
    node.validation = n_train_ < n_ ? recall(n_train_, n_, valid_count_) : node.fitness;
    double se = 0.0;
    for (std::size_t j = 0; j < c; ++j)
      for (std::size_t r = 0; r < n_train_; ++r) {
        const double e = out[j * n_ + r] - targets_[j * n_train_ + r];
        se += e * e;
      }
    node.mse = se / static_cast<double>(c * n_train_);
  }

  void admit(std::size_t id) {
    members_.push_back(id);
    track_best(id);
  }

  void track_best(std::size_t id) {
    const double v = nodes_[id].validation;
    if (!has_best_ || v > stats_.best_validation) {
      has_best_ = true;
      best_ = id;
      stats_.best_validation = v;
      stats_.best_evaluation = stats_.evaluations;
      stats_.improvements.emplace_back(stats_.evaluations, v);
    }
  }

  // Removed members are never chosen as arguments again.
  void release(std::size_t id) {
    outputs_[id].clear();
    outputs_[id].shrink_to_fit();
  }

  Func random_function() { return params_.functions[rng_.index(params_.functions.size())]; }

  static void canonicalize(std::vector<std::size_t>& args, const FunctionSpec& spec) {
    if (spec.commutative) std::sort(args.begin(), args.end());
  }

  // Adds random live members until there are two arguments.
  void top_up(std::vector<std::size_t>& args, bool unique) {
    std::vector<std::size_t> pool;
    for (auto m : members_)
      if (!unique || std::find(args.begin(), args.end(), m) == args.end()) pool.push_back(m);
    while (args.size() < 2 && !pool.empty()) {
      const std::size_t at = rng_.index(pool.size());
      args.push_back(pool[at]);
      if (unique) pool.erase(pool.begin() + static_cast<long>(at));
    }
  }

  // Offspring with up to kResampleAttempts draws of function and arguments.
  // Every attempt counts as an evaluation; a skipped offspring too.
  std::optional<std::size_t> offspring(bool use_tournament) {
    for (int attempt = 0; attempt < kResampleAttempts; ++attempt) {
      const Func f = random_function();
      const auto spec = spec_of(f, params_.nc_arity);
      const std::size_t arity = clipped_arity(spec, members_.size());
      std::vector<std::size_t> positions(members_.size());
      for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
      std::vector<std::size_t> args;
      for (std::size_t k = 0; k < arity; ++k) {
        std::size_t pos;
        if (use_tournament) {
          pos = tournament(positions, false);
        } else {
          pos = positions[rng_.index(positions.size())];
        }
        args.push_back(members_[pos]);
        if (spec.unique_args) positions.erase(std::find(positions.begin(), positions.end(), pos));
      }
      canonicalize(args, spec);
      if (auto id = build(f, args)) return id;
    }
    ++stats_.skipped;
    return std::nullopt;
  }

  std::size_t negative_tournament() {
    std::vector<std::size_t> positions(members_.size());
    for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
    return tournament(positions, true);
  }

  EvoDagParams params_;
  Rng rng_;
  std::vector<Label> classes_;
  std::size_t d_ = 0;
  std::size_t n_ = 0;
  std::size_t n_train_ = 0;
  std::vector<std::size_t> order_;
  std::vector<double> X_;   // n x d, row-major
  std::vector<double> Xc_;  // d x n, column-major
  std::vector<int> y_;
  std::vector<double> targets_;  // c x n_train
  std::vector<std::size_t> train_count_, valid_count_;

  std::vector<DagNode> nodes_;
  std::vector<std::vector<double>> outputs_;
  std::vector<std::size_t> members_;
  bool initialized_ = false;
  bool has_best_ = false;
  std::size_t best_ = 0;
  std::size_t offspring_created_ = 0;
  EvolutionStats stats_;
};

inline EvoDagModel evolve(std::span<const DenseVector> X, std::span<const Label> y, const EvoDagParams& params,
                          EvolutionStats* stats = nullptr) {
  Population pop(X, y, params);
  auto model = pop.run();
  if (stats) *stats = pop.stats();
  return model;
}

}  // namespace stacksa::evodag
