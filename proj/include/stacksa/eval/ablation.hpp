#pragma once

#include <algorithm>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stacksa/eval/evaluate.hpp"

namespace stacksa {

enum class AblationStrategy { bottom_up, exhaustive };

inline AblationStrategy parse_strategy(std::string_view s) {
  if (s == "bottom-up" || s == "bottom_up") return AblationStrategy::bottom_up;
  if (s == "exhaustive") return AblationStrategy::exhaustive;
  throw Error("unknown ablation strategy '" + std::string(s) + "'");
}

struct AblationDataset {
  std::string name;
  Corpus corpus;
};

struct SystemScores {
  std::string name;
  std::vector<ModelKind> kinds;      // empty for the single-stage baseline
  std::vector<FoldScores> datasets;  // one entry per dataset
  std::vector<double> ranks;         // per dataset, among every reported system
  double mean_rank = 0.0;

  double mean_score() const {
    double s = 0.0;
    for (const auto& d : datasets) s += d.mean();
    return datasets.empty() ? 0.0 : s / static_cast<double>(datasets.size());
  }
};

struct AblationReport {
  std::vector<std::string> datasets;
  std::string metric;
  AblationStrategy strategy = AblationStrategy::bottom_up;
  std::vector<SystemScores> systems;  // stacked subsets in evaluation order
  std::optional<SystemScores> baseline;
  std::vector<std::vector<ModelKind>> trajectory;  // bottom-up: the subset kept after each step

  std::size_t subset_evaluations() const { return systems.size(); }
};

// Scores of (dataset, subset, fold) cells; every call must be deterministic.
using CellScorer = std::function<double(std::size_t dataset, std::span<const ModelKind> kinds, int fold)>;

namespace detail {

inline std::vector<SystemScores> score_subsets(const std::vector<std::vector<ModelKind>>& subsets,
                                               std::size_t datasets, int k, const CellScorer& scorer) {
  const std::size_t per_subset = datasets * static_cast<std::size_t>(k);
  std::vector<double> cells(subsets.size() * per_subset);
  parallel_for(cells.size(), [&](std::size_t i) {
    const std::size_t s = i / per_subset, rest = i % per_subset;
    cells[i] = scorer(rest / static_cast<std::size_t>(k), subsets[s], static_cast<int>(rest % static_cast<std::size_t>(k)));
  });
  std::vector<SystemScores> out;
  for (std::size_t s = 0; s < subsets.size(); ++s) {
    SystemScores sys{subset_name(subsets[s]), subsets[s], {}, {}, 0.0};
    for (std::size_t d = 0; d < datasets; ++d) {
      const auto* first = cells.data() + s * per_subset + d * static_cast<std::size_t>(k);
      sys.datasets.push_back({std::vector<double>(first, first + k)});
    }
    out.push_back(std::move(sys));
  }
  return out;
}

// Midpoint ranks per dataset (1 = best mean score), then averaged.
inline void assign_ranks(std::vector<SystemScores*> systems, std::size_t datasets) {
  for (auto* s : systems) s->ranks.assign(datasets, 0.0);
  for (std::size_t d = 0; d < datasets; ++d) {
    std::vector<double> scores;
    for (auto* s : systems) scores.push_back(s->datasets[d].mean());
    const auto r = midpoint_ranks(scores);
    for (std::size_t i = 0; i < systems.size(); ++i) systems[i]->ranks[d] = r[i];
  }
  for (auto* s : systems) {
    double sum = 0.0;
    for (double r : s->ranks) sum += r;
    s->mean_rank = datasets ? sum / static_cast<double>(datasets) : 0.0;
  }
}

}  // namespace detail

// Bottom-up: start from TR and repeatedly add the kind whose subset ranks best
// among the candidates of that step (mean rank over datasets, then mean score,
// then kind order). Exhaustive: every non-empty subset of the universe.
inline AblationReport ablation_study(std::span<const ModelKind> universe, std::span<const std::string> datasets, int k,
                                     const std::string& metric, AblationStrategy strategy, const CellScorer& scorer) {
  const auto kinds = canonical_kinds({universe.begin(), universe.end()});
  if (kinds.empty()) throw Error("ablation needs at least one model kind");
  if (datasets.empty()) throw Error("ablation needs at least one dataset");
  AblationReport report;
  report.datasets.assign(datasets.begin(), datasets.end());
  report.metric = metric;
  report.strategy = strategy;
  const std::size_t D = datasets.size();

  if (strategy == AblationStrategy::exhaustive) {
    std::vector<std::vector<ModelKind>> subsets;
    for (std::size_t mask = 1; mask < (std::size_t{1} << kinds.size()); ++mask) {
      std::vector<ModelKind> s;
      for (std::size_t b = 0; b < kinds.size(); ++b)
        if (mask & (std::size_t{1} << b)) s.push_back(kinds[b]);
      subsets.push_back(std::move(s));
    }
    std::stable_sort(subsets.begin(), subsets.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });
    report.systems = detail::score_subsets(subsets, D, k, scorer);
    return report;
  }

  if (std::find(kinds.begin(), kinds.end(), ModelKind::TR) == kinds.end())
    throw Error("bottom-up ablation starts from TR, which is not enabled");
  std::vector<ModelKind> current{ModelKind::TR};
  auto first = detail::score_subsets({current}, D, k, scorer);
  report.systems.push_back(std::move(first.front()));
  report.trajectory.push_back(current);
  std::vector<ModelKind> remaining;
  for (auto kind : kinds)
    if (kind != ModelKind::TR) remaining.push_back(kind);
  while (!remaining.empty()) {
    std::vector<std::vector<ModelKind>> candidates;
    for (auto kind : remaining) {
      auto s = current;
      s.push_back(kind);
      candidates.push_back(canonical_kinds(s));
    }
    auto scored = detail::score_subsets(candidates, D, k, scorer);
    std::vector<SystemScores*> ptrs;
    for (auto& s : scored) ptrs.push_back(&s);
    detail::assign_ranks(ptrs, D);
    std::size_t best = 0;
    for (std::size_t i = 1; i < scored.size(); ++i) {
      const auto& a = scored[i];
      const auto& b = scored[best];
      if (a.mean_rank < b.mean_rank || (a.mean_rank == b.mean_rank && a.mean_score() > b.mean_score())) best = i;
    }
    current = candidates[best];
    remaining.erase(remaining.begin() + static_cast<long>(best));
    report.trajectory.push_back(current);
    for (auto& s : scored) report.systems.push_back(std::move(s));
  }
  return report;
}

// Ranks every reported system (subsets and the baseline) per dataset.
inline void rank_systems(AblationReport& report) {
  std::vector<SystemScores*> all;
  for (auto& s : report.systems) all.push_back(&s);
  if (report.baseline) all.push_back(&*report.baseline);
  detail::assign_ranks(all, report.datasets.size());
}

// The full study over corpora with the pipeline of `spec`: stacked subsets of
// spec.kinds plus the single-stage baseline, ranked together.
inline AblationReport ablation_study(const PipelineSpec& spec, const PipelineResources& res,
                                     const std::vector<AblationDataset>& data, int k, const Metric& metric,
                                     AblationStrategy strategy, std::uint64_t seed) {
  std::vector<std::vector<int>> folds;
  std::vector<std::string> names;
  for (const auto& d : data) {
    folds.push_back(stratified_folds(labels_of(d.corpus), k, seed));
    names.push_back(d.name);
  }
  CellScorer scorer = [&](std::size_t d, std::span<const ModelKind> kinds, int fold) {
    return evaluate_fold(data[d].corpus, folds[d], fold, metric,
                         [&](const Corpus& train) { return train_pipeline(spec, res, train, kinds); });
  };
  auto report = ablation_study(spec.kinds, names, k, metric.name(), strategy, scorer);
  SystemScores base{"B4MSA", {}, {}, {}, 0.0};
  base.datasets.resize(data.size());
  for (std::size_t d = 0; d < data.size(); ++d) base.datasets[d].folds.resize(static_cast<std::size_t>(k));
  parallel_for(data.size() * static_cast<std::size_t>(k), [&](std::size_t i) {
    const std::size_t d = i / static_cast<std::size_t>(k);
    const int f = static_cast<int>(i % static_cast<std::size_t>(k));
    base.datasets[d].folds[static_cast<std::size_t>(f)] = evaluate_fold(
        data[d].corpus, folds[d], f, metric, [&](const Corpus& train) {
          return fit_b4msa(train, res.config, res.text, spec.stacker_params().svm);
        });
  });
  report.baseline = std::move(base);
  rank_systems(report);
  return report;
}

inline std::vector<ScoreRow> score_rows(const AblationReport& r) {
  std::vector<ScoreRow> out;
  auto add = [&](const SystemScores& s) {
    for (std::size_t d = 0; d < r.datasets.size(); ++d) {
      auto rows = score_rows(r.datasets[d], s.name, Metric::parse(r.metric), s.datasets[d]);
      out.insert(out.end(), rows.begin(), rows.end());
    }
  };
  if (r.baseline) add(*r.baseline);
  for (const auto& s : r.systems) add(s);
  return out;
}

inline std::string format_table(const AblationReport& r) {
  std::ostringstream out;
  out << std::left << std::setw(24) << "system";
  for (const auto& d : r.datasets) out << std::setw(14) << d;
  out << "mean_rank\n";
  auto line = [&](const SystemScores& s) {
    out << std::setw(24) << s.name << std::fixed << std::setprecision(4);
    for (const auto& d : s.datasets) out << std::setw(14) << d.mean();
    out << std::setprecision(2) << s.mean_rank << "\n";
  };
  if (r.baseline) line(*r.baseline);
  for (const auto& s : r.systems) line(s);
  if (!r.trajectory.empty()) {
    out << "bottom-up:";
    for (const auto& t : r.trajectory) out << ' ' << subset_name(t);
    out << "\n";
  }
  return out.str();
}

inline nlohmann::json to_json(const AblationReport& r) {
  auto sys = [](const SystemScores& s) {
    nlohmann::json datasets = nlohmann::json::array();
    for (const auto& d : s.datasets) datasets.push_back({{"folds", d.folds}, {"mean", d.mean()}});
    return nlohmann::json{{"name", s.name}, {"datasets", datasets}, {"ranks", s.ranks}, {"mean_rank", s.mean_rank}};
  };
  nlohmann::json systems = nlohmann::json::array();
  for (const auto& s : r.systems) systems.push_back(sys(s));
  nlohmann::json trajectory = nlohmann::json::array();
  for (const auto& t : r.trajectory) trajectory.push_back(subset_name(t));
  nlohmann::json j{{"datasets", r.datasets},
                   {"metric", r.metric},
                   {"strategy", r.strategy == AblationStrategy::bottom_up ? "bottom-up" : "exhaustive"},
                   {"systems", systems},
                   {"trajectory", trajectory}};
  if (r.baseline) j["baseline"] = sys(*r.baseline);
  return j;
}

}  // namespace stacksa
