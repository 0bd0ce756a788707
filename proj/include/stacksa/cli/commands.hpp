#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "stacksa/eval/ablation.hpp"
#include "stacksa/eval/evaluate.hpp"
#include "stacksa/io/archive.hpp"
#include "stacksa/io/jsonl.hpp"
#include "stacksa/io/pipeline.hpp"
#include "stacksa/models/emoji.hpp"

namespace stacksa::cli {

namespace fs = std::filesystem;

struct TrainSummary {
  std::size_t members = 0;  // l
  std::size_t classes = 0;  // c
  int folds = 0;
  std::size_t evaluations = 0;
  double best_validation = 0.0;
  std::uint32_t checksum = 0;
};

inline TrainSummary cmd_train(const fs::path& train, const fs::path& spec_path, const fs::path& out,
                              std::ostream& log = std::cerr) {
  const auto spec = load_pipeline_spec(spec_path);
  const auto corpus = read_jsonl(train);
  std::vector<std::string> warnings;
  const auto res = prepare_resources(spec, &warnings);
  for (const auto& w : warnings) log << "warning: " << w << "\n";
  evodag::EvolutionStats stats;
  const auto model = train_pipeline(spec, res, corpus, &stats);
  TrainSummary s{model.members().size(), model.classes().size(), model.k(), stats.evaluations, stats.best_validation,
                 0};
  const nlohmann::json summary{{"members", s.members},
                               {"classes", s.classes},
                               {"folds", s.folds},
                               {"evaluations", s.evaluations},
                               {"best_validation", s.best_validation},
                               {"training_rows", corpus.size()}};
  const auto bytes = encode_stacked_archive(model, spec_to_json(spec), summary);
  write_file_atomic(out, bytes);
  s.checksum = crc32_of(std::string_view(bytes).substr(bytes.find('\n') + 1));
  return s;
}

inline std::size_t cmd_predict(const fs::path& model_path, const fs::path& input, const fs::path& out) {
  const auto archive = load_stacked_archive(model_path);
  const auto rows = read_jsonl(input, false);
  std::vector<std::string> lines(rows.size());
  parallel_for(rows.size(), [&](std::size_t i) {
    const auto d = archive.model.decision_function(rows[i].text);
    const auto& classes = archive.model.classes();
    std::size_t best = 0;
    for (std::size_t j = 1; j < d.size(); ++j)
      if (d[j] > d[best]) best = j;
    lines[i] = nlohmann::json{{"text", rows[i].text}, {"klass", classes[best]}, {"decision", d}}.dump() + "\n";
  });
  std::string all;
  for (const auto& l : lines) all += l;
  write_file_atomic(out, all);
  return rows.size();
}

inline std::string system_name(const StackedModel& m) {
  std::vector<ModelKind> kinds;
  for (const auto& member : m.members()) kinds.push_back(member.model->kind());
  return "EvoMSA(" + subset_name(kinds) + ")";
}

struct EvaluateResult {
  double score = 0.0;  // whole test set, or the mean over folds
  std::vector<ScoreRow> rows;
};

// With a model: score its predictions on the test file. With a spec: k-fold
// cross-validation of the pipeline over the test file.
inline EvaluateResult cmd_evaluate(const std::optional<fs::path>& model_path, const std::optional<fs::path>& spec_path,
                                   const fs::path& test, const Metric& metric, int folds, std::uint64_t seed) {
  if (model_path.has_value() == spec_path.has_value()) throw Error("give exactly one of --model and --spec");
  const auto corpus = read_jsonl(test);
  const std::string dataset = test.stem().string();
  EvaluateResult r;
  if (model_path) {
    const auto archive = load_stacked_archive(*model_path);
    std::vector<Label> truth(corpus.size()), pred(corpus.size());
    parallel_for(corpus.size(), [&](std::size_t i) {
      truth[i] = corpus[i].label;
      pred[i] = archive.model.predict(corpus[i].text);
    });
    r.score = score(metric, truth, pred);
    r.rows.push_back({dataset, system_name(archive.model), std::nullopt, metric.name(), r.score});
    return r;
  }
  const auto spec = load_pipeline_spec(*spec_path);
  const auto res = prepare_resources(spec);
  const auto s = kfold_evaluate(spec, res, corpus, folds, metric, seed);
  r.score = s.mean();
  r.rows = score_rows(dataset, "EvoMSA(" + subset_name(spec.kinds) + ")", metric, s);
  return r;
}

inline AblationReport cmd_ablate(const fs::path& spec_path, const std::vector<fs::path>& train_files,
                                 AblationStrategy strategy, const Metric& metric, int folds, std::uint64_t seed) {
  const auto spec = load_pipeline_spec(spec_path);
  const auto res = prepare_resources(spec);
  std::vector<AblationDataset> data;
  for (const auto& p : train_files) data.push_back({p.stem().string(), read_jsonl(p)});
  return ablation_study(spec, res, data, folds, metric, strategy, seed);
}

inline EmojiCorpus cmd_emoji_prepare(const fs::path& raw, const fs::path& out, std::size_t max_per_class,
                                     std::size_t classes, std::uint64_t seed) {
  std::ifstream in(raw, std::ios::binary);
  if (!in) throw Error("cannot open " + raw.string());
  auto corpus = prepare_emoji_corpus(in, max_per_class, classes, seed);
  write_jsonl(out, corpus.documents);
  return corpus;
}

// Runs the command line; returns the process exit code. Usage errors exit 2,
// failures of the operation exit 1, success 0.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  CLI::App app{"Stacked multilingual sentiment classifier", "stacksa"};
  app.require_subcommand(1);

  fs::path train_file, spec_file, out_file, model_file, input_file, test_file, raw_file, scores_file;
  std::string metric_name = "macro-f1", strategy_name = "bottom-up";
  std::vector<fs::path> train_files;
  int folds = 5;
  std::uint64_t seed = 0;
  std::size_t max_per_class = 0, classes = 0;

  auto* train = app.add_subcommand("train", "Fit a stacked pipeline and write a model archive");
  train->add_option("--train", train_file, "Training corpus (JSONL)")->required();
  train->add_option("--spec", spec_file, "Pipeline spec (JSON)")->required();
  train->add_option("--out", out_file, "Archive to write")->required();

  auto* predict = app.add_subcommand("predict", "Label texts with a model archive");
  predict->add_option("--model", model_file, "Model archive")->required();
  predict->add_option("--input", input_file, "Texts (JSONL)")->required();
  predict->add_option("--out", out_file, "Predictions to write (JSONL)")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a test set, or cross-validate a spec");
  auto* eval_model = evaluate->add_option("--model", model_file, "Model archive");
  auto* eval_spec = evaluate->add_option("--spec", spec_file, "Pipeline spec; runs k-fold cross-validation");
  eval_model->excludes(eval_spec);
  evaluate->add_option("--test", test_file, "Labelled corpus (JSONL)")->required();
  evaluate->add_option("--metric", metric_name, "macro-f1, macro-recall, pearson or f1:<class>");
  evaluate->add_option("--folds", folds, "Folds for --spec");
  evaluate->add_option("--seed", seed, "Fold seed for --spec");
  evaluate->add_option("--scores", scores_file, "Write score rows (JSONL)");

  auto* ablate = app.add_subcommand("ablate", "Compare model subsets by cross-validation");
  ablate->add_option("--spec", spec_file, "Pipeline spec; its models form the universe")->required();
  ablate->add_option("--train", train_files, "One or more labelled corpora (JSONL)")->required();
  ablate->add_option("--strategy", strategy_name, "bottom-up or exhaustive");
  ablate->add_option("--metric", metric_name, "macro-f1, macro-recall, pearson or f1:<class>");
  ablate->add_option("--folds", folds, "Cross-validation folds");
  ablate->add_option("--seed", seed, "Fold seed");
  ablate->add_option("--out", out_file, "Write the report (JSON)");
  ablate->add_option("--scores", scores_file, "Write score rows (JSONL)");

  auto* emoji = app.add_subcommand("emoji-prepare", "Build a distant-supervision emoji corpus");
  emoji->add_option("--raw", raw_file, "Raw texts, one per line")->required();
  emoji->add_option("--out", out_file, "Corpus to write (JSONL)")->required();
  emoji->add_option("--max-per-class", max_per_class, "Sample cap per emoji")->required();
  emoji->add_option("--classes", classes, "Number of most frequent emoji to keep")->required();
  emoji->add_option("--seed", seed, "Sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*train) {
      const auto s = cmd_train(train_file, spec_file, out_file, err);
      char crc[16];
      std::snprintf(crc, sizeof crc, "%08x", s.checksum);
      out << "trained " << s.members << " models x " << s.classes << " classes = " << s.members * s.classes
          << " EvoDAG inputs; folds " << s.folds << "; EvoDAG evaluations " << s.evaluations
          << "; best validation " << s.best_validation << "; checksum " << crc << "\n";
    } else if (*predict) {
      out << "predicted " << cmd_predict(model_file, input_file, out_file) << " rows\n";
    } else if (*evaluate) {
      const auto metric = Metric::parse(metric_name);
      std::optional<fs::path> m, s;
      if (*eval_model) m = model_file;
      if (*eval_spec) s = spec_file;
      const auto r = cmd_evaluate(m, s, test_file, metric, folds, seed);
      out << metric.name() << " " << r.score << "\n";
      if (!scores_file.empty()) write_file_atomic(scores_file, to_jsonl(r.rows));
    } else if (*ablate) {
      const auto report = cmd_ablate(spec_file, train_files, parse_strategy(strategy_name), Metric::parse(metric_name),
                                     folds, seed);
      out << format_table(report);
      if (!out_file.empty()) write_file_atomic(out_file, to_json(report).dump(2) + "\n");
      if (!scores_file.empty()) write_file_atomic(scores_file, to_jsonl(score_rows(report)));
    } else if (*emoji) {
      const auto c = cmd_emoji_prepare(raw_file, out_file, max_per_class, classes, seed);
      out << "kept " << c.documents.size() << " texts in " << c.counts.size() << " classes\n";
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace stacksa::cli
