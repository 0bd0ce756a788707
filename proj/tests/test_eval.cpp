#include <algorithm>
#include <mutex>
#include <set>

#include <gtest/gtest.h>

#include "stacksa/eval/ablation.hpp"
#include "stacksa/eval/evaluate.hpp"
#include "stacksa/eval/second_stage.hpp"
#include "support/synthetic.hpp"

using namespace stacksa;

namespace {

evodag::EvoDagParams small_evodag() {
  evodag::EvoDagParams p;
  p.population_size = 30;
  p.early_stop_window = 300;
  p.max_evaluations = 3000;
  return p;
}

PipelineSpec tr_spec() {
  PipelineSpec s;
  s.language = "english";
  s.evodag = small_evodag();
  return s;
}

// Remembers which texts each fit saw and predicts the majority label.
struct RecordingFit {
  std::mutex* mu;
  std::vector<std::set<std::string>>* seen;

  struct Model {
    Label label;
    Label predict(std::string_view) const { return label; }
  };

  Model operator()(const Corpus& train) const {
    std::set<std::string> texts;
    std::map<Label, int> counts;
    for (const auto& d : train) {
      texts.insert(d.text);
      ++counts[d.label];
    }
    {
      std::lock_guard lock(*mu);
      seen->push_back(texts);
    }
    return {std::max_element(counts.begin(), counts.end(), [](auto& a, auto& b) { return a.second < b.second; })->first};
  }
};

double sum(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

TEST(KFold, NeverTrainsOnHeldOutRows) {
  const auto corpus = synth::separable_corpus(1, 10);
  std::mutex mu;
  std::vector<std::set<std::string>> seen;
  const auto scores = kfold_evaluate(corpus, 5, Metric::parse("macro-recall"), 3, RecordingFit{&mu, &seen});
  ASSERT_EQ(seen.size(), 5u);
  const auto folds = stratified_folds(labels_of(corpus), 5, 3);
  std::size_t total_unseen = 0;
  for (const auto& doc : corpus) {
    int missing = 0;
    for (const auto& s : seen) missing += !s.contains(doc.text);
    EXPECT_EQ(missing, 1) << doc.text;
    ++total_unseen;
  }
  EXPECT_EQ(total_unseen, corpus.size());
  for (double s : scores.folds) EXPECT_NEAR(s, 1.0 / 3.0, 1e-12);
}

TEST(KFold, SeparablePipelineIsPerfectAndDeterministic) {
  const auto corpus = synth::separable_corpus(2, 15);
  const auto spec = tr_spec();
  const auto res = prepare_resources(spec);
  const auto a = kfold_evaluate(spec, res, corpus, 3, Metric::parse("macro-f1"), 4);
  const auto b = kfold_evaluate(spec, res, corpus, 3, Metric::parse("macro-f1"), 4);
  ASSERT_EQ(a.folds.size(), 3u);
  EXPECT_DOUBLE_EQ(a.mean(), 1.0);
  EXPECT_EQ(a.folds, b.folds);
}

TEST(KFold, SmallestStratifiedBoundary) {
  Corpus corpus;
  for (int i = 0; i < 5; ++i) {
    corpus.push_back({"good happy " + std::to_string(i), "pos"});
    corpus.push_back({"bad sad " + std::to_string(i), "neg"});
  }
  auto spec = tr_spec();
  spec.k = 2;
  spec.evodag.population_size = 10;
  const auto res = prepare_resources(spec);
  const auto s = kfold_evaluate(spec, res, corpus, 5, Metric::parse("macro-f1"), 0);
  EXPECT_EQ(s.folds.size(), 5u);
  for (double x : s.folds) EXPECT_TRUE(x >= 0.0 && x <= 1.0);
}

TEST(KFold, FoldErrorsPropagate) {
  const Corpus corpus{{"a", "x"}, {"b", "x"}, {"c", "y"}};
  std::mutex mu;
  std::vector<std::set<std::string>> seen;
  EXPECT_THROW(kfold_evaluate(corpus, 2, Metric::parse("macro-f1"), 0, RecordingFit{&mu, &seen}), Error);
}

TEST(Baseline, B4msaSeparatesSeparableData) {
  const auto train = synth::separable_corpus(3, 10);
  const auto m = fit_b4msa(train, presets::english());
  for (const auto& d : train) EXPECT_EQ(m.predict(d.text), d.label);
  EXPECT_EQ(m.decision_function("tagpos").size(), 3u);
}

TEST(Ablation, EnumerationCounts) {
  const std::vector<ModelKind> all(std::begin(kAllKinds), std::end(kAllKinds));
  const std::vector<std::string> names{"d1"};
  std::atomic<int> calls{0};
  CellScorer scorer = [&](std::size_t, std::span<const ModelKind> kinds, int) {
    ++calls;
    return static_cast<double>(kinds.size());
  };
  const auto bu = ablation_study(all, names, 2, "macro-f1", AblationStrategy::bottom_up, scorer);
  EXPECT_EQ(bu.subset_evaluations(), 11u);
  EXPECT_EQ(calls.load(), 22);
  ASSERT_EQ(bu.trajectory.size(), 5u);
  for (std::size_t i = 0; i < bu.trajectory.size(); ++i) EXPECT_EQ(bu.trajectory[i].size(), i + 1);
  EXPECT_EQ(bu.trajectory.front(), std::vector<ModelKind>{ModelKind::TR});
  const auto ex = ablation_study(all, names, 2, "macro-f1", AblationStrategy::exhaustive, scorer);
  EXPECT_EQ(ex.subset_evaluations(), 31u);
  std::set<std::string> distinct;
  for (const auto& s : ex.systems) distinct.insert(s.name);
  EXPECT_EQ(distinct.size(), 31u);
}

TEST(Ablation, BottomUpFollowsTheBestCandidate) {
  const std::vector<ModelKind> all(std::begin(kAllKinds), std::end(kAllKinds));
  const std::vector<std::string> names{"d1", "d2"};
  // Each kind has a fixed value; subsets score the sum. Emo > FT > HA > TH.
  auto value = [](ModelKind k) {
    switch (k) {
      case ModelKind::Emo: return 4.0;
      case ModelKind::FT: return 3.0;
      case ModelKind::HA: return 2.0;
      case ModelKind::TH: return 1.0;
      default: return 0.0;
    }
  };
  CellScorer scorer = [&](std::size_t, std::span<const ModelKind> kinds, int) {
    double s = 0.0;
    for (auto k : kinds) s += value(k);
    return s;
  };
  const auto r = ablation_study(all, names, 2, "macro-f1", AblationStrategy::bottom_up, scorer);
  EXPECT_EQ(subset_name(r.trajectory[1]), "TR+Emo");
  EXPECT_EQ(subset_name(r.trajectory[2]), "TR+Emo+FT");
  EXPECT_EQ(subset_name(r.trajectory[3]), "TR+HA+Emo+FT");
  EXPECT_EQ(subset_name(r.trajectory[4]), "TR+HA+TH+Emo+FT");
}

TEST(Ablation, TiesShareMidpointRanksAndRanksSumCorrectly) {
  const std::vector<ModelKind> kinds{ModelKind::TR, ModelKind::TH, ModelKind::FT};
  const std::vector<std::string> names{"d1", "d2"};
  CellScorer flat = [](std::size_t, std::span<const ModelKind>, int) { return 0.5; };
  auto r = ablation_study(kinds, names, 2, "macro-f1", AblationStrategy::exhaustive, flat);
  rank_systems(r);
  const double m = static_cast<double>(r.systems.size());
  for (const auto& s : r.systems) {
    for (double x : s.ranks) EXPECT_DOUBLE_EQ(x, (m + 1) / 2);
  }
  CellScorer varied = [](std::size_t d, std::span<const ModelKind> ks, int f) {
    return static_cast<double>((ks.size() * 7 + d * 3 + static_cast<std::size_t>(f)) % 4);
  };
  auto v = ablation_study(kinds, names, 2, "macro-f1", AblationStrategy::exhaustive, varied);
  rank_systems(v);
  for (std::size_t d = 0; d < names.size(); ++d) {
    std::vector<double> col;
    for (const auto& s : v.systems) col.push_back(s.ranks[d]);
    EXPECT_DOUBLE_EQ(sum(col), m * (m + 1) / 2);
  }
}

TEST(Ablation, PipelineStudyWithBaseline) {
  const auto dir = synth::scratch_dir("ablation");
  synth::write_file(dir / "lex.tsv", "tagpos\tpos\ngood\tpos\ntagneg\tneg\nbad\tneg\n");
  auto spec = tr_spec();
  spec.kinds = {ModelKind::TR, ModelKind::TH};
  spec.resources.lexicon = dir / "lex.tsv";
  spec.k = 3;
  const auto res = prepare_resources(spec);
  const std::vector<AblationDataset> data{{"sep", synth::separable_corpus(5, 9)}};
  const auto r = ablation_study(spec, res, data, 3, Metric::parse("macro-f1"), AblationStrategy::bottom_up, 1);
  EXPECT_EQ(r.subset_evaluations(), 2u);
  ASSERT_TRUE(r.baseline.has_value());
  EXPECT_EQ(r.baseline->name, "B4MSA");
  EXPECT_DOUBLE_EQ(r.baseline->datasets[0].mean(), 1.0);
  EXPECT_DOUBLE_EQ(r.systems[0].datasets[0].mean(), 1.0);
  EXPECT_DOUBLE_EQ(r.systems[0].ranks[0], 2.0);  // three-way tie
  const auto rows = score_rows(r);
  EXPECT_EQ(rows.size(), 9u);
  const auto jsonl = to_jsonl(rows);
  EXPECT_EQ(std::count(jsonl.begin(), jsonl.end(), '\n'), 9);
  const auto first = nlohmann::json::parse(jsonl.substr(0, jsonl.find('\n')));
  EXPECT_EQ(first["dataset"], "sep");
  EXPECT_EQ(first["system"], "B4MSA");
  EXPECT_EQ(first["fold"], 0);
  EXPECT_EQ(first["metric"], "macro-f1");
  EXPECT_NE(format_table(r).find("TR+TH"), std::string::npos);
  EXPECT_EQ(to_json(r)["trajectory"], nlohmann::json::array({"TR", "TR+TH"}));
}

TEST(SecondStage, EvoDagBeatsGaussianNbOnXor) {
  const auto train = synth::xor_points(17, 200);
  const auto test = synth::xor_points(18, 200);
  FeatureDataset d{"xor", train.X, train.y, test.X, test.y};
  auto params = small_evodag();
  params.seed = 1;
  params.population_size = 50;
  params.early_stop_window = 1000;
  params.max_evaluations = 20000;
  const auto r = compare_second_stage({evodag_classifier(params), gaussian_nb_classifier()}, {d},
                                      Metric::parse("macro-recall"));
  EXPECT_DOUBLE_EQ(r.ranks[0][0], 1.0);
  EXPECT_DOUBLE_EQ(r.ranks[1][0], 2.0);
  EXPECT_GE(r.scores[0][0], 0.9);
  EXPECT_GE(r.scores[0][0] - r.scores[1][0], 0.2);
}

TEST(SecondStage, DuplicatesTieAndSingletonsRankFirst) {
  const auto pts = synth::xor_points(3, 60);
  FeatureDataset d{"xor", pts.X, pts.y, pts.X, pts.y};
  const auto r = compare_second_stage({nearest_centroid_classifier(), nearest_centroid_classifier()}, {d},
                                      Metric::parse("macro-f1"));
  EXPECT_EQ(r.scores[0][0], r.scores[1][0]);
  EXPECT_DOUBLE_EQ(r.ranks[0][0], 1.5);
  EXPECT_DOUBLE_EQ(r.ranks[1][0], 1.5);
  const auto one = compare_second_stage({linear_ovr_classifier()}, {d}, Metric::parse("macro-f1"));
  EXPECT_DOUBLE_EQ(one.ranks[0][0], 1.0);
  EXPECT_EQ(score_rows(one).size(), 1u);
  EXPECT_FALSE(score_rows(one)[0].fold.has_value());
}

TEST(SecondStage, StackedFeaturesOfAllBundledClassifiers) {
  const auto train = synth::separable_corpus(6, 12);
  const auto test = synth::separable_corpus(7, 4);
  const std::vector<FirstStagePtr> members{build_tr_model(texts_of(train), presets::english())};
  StackerParams p;
  p.evodag = small_evodag();
  const auto d = stacked_feature_dataset("sep", members, train, test, p);
  ASSERT_EQ(d.X_train.size(), train.size());
  ASSERT_EQ(d.X_test.size(), test.size());
  EXPECT_EQ(d.X_test.front().size(), 3u);
  const auto r = compare_second_stage({evodag_classifier(p.evodag), gaussian_nb_classifier(),
                                       multinomial_nb_classifier(), nearest_centroid_classifier(),
                                       linear_ovr_classifier()},
                                      {d}, Metric::parse("macro-f1"));
  for (std::size_t c = 0; c < r.classifiers.size(); ++c) EXPECT_DOUBLE_EQ(r.scores[c][0], 1.0) << r.classifiers[c];
  EXPECT_NE(format_table(r).find("MultinomialNB"), std::string::npos);
}
