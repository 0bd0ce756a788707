#include <cstdlib>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "stacksa/cli/commands.hpp"
#include "support/fixtures.hpp"

using namespace stacksa;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "stacksa");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

int run_binary(const std::string& args) {
  const std::string cmd = std::string(STACKSA_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string emoji_raw_file(const fs::path& dir) {
  const std::vector<std::string> emoji{"❤", "😂", "😭", "🔥", "👍", "🙏"};
  std::string raw;
  Rng rng(9);
  for (int i = 0; i < 200; ++i) {
    const auto& e = emoji[static_cast<std::size_t>(i) % (i % 3 ? 4 : 6)];
    raw += "text " + synth::random_word(rng, 3, 6) + " " + e + "\n";
  }
  synth::write_file(dir / "raw.txt", raw);
  return (dir / "raw.txt").string();
}

}  // namespace

TEST(Cli, TrainPredictEvaluateRoundTrip) {
  const auto f = synth::write_pipeline_fixture("cli_train");
  const auto model = (f.dir / "m.stacksa").string();
  auto r = run_cli({"train", "--train", f.train.string(), "--spec", f.spec.string(), "--out", model});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("5 models x 3 classes = 15"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("folds 3"), std::string::npos) << r.out;

  const auto preds = (f.dir / "preds.jsonl").string();
  r = run_cli({"predict", "--model", model, "--input", f.train.string(), "--out", preds});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream lines(synth::read_file(preds));
  std::string line;
  std::size_t i = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["text"], f.corpus[i].text);
    EXPECT_EQ(j["klass"], f.corpus[i].label);
    EXPECT_EQ(j["decision"].size(), 3u);
    ++i;
  }
  EXPECT_EQ(i, f.corpus.size());

  const auto scores = (f.dir / "scores.jsonl").string();
  r = run_cli({"evaluate", "--model", model, "--test", f.train.string(), "--metric", "macro-f1", "--scores", scores});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "macro-f1 1\n");
  const auto row = nlohmann::json::parse(synth::read_file(scores));
  EXPECT_EQ(row["system"], "EvoMSA(TR+HA+TH+Emo+FT)");
  EXPECT_EQ(row["score"], 1.0);
  EXPECT_TRUE(row["fold"].is_null());
}

TEST(Cli, TrainIsDeterministic) {
  const auto f = synth::write_pipeline_fixture("cli_determinism");
  const auto a = cli::cmd_train(f.train, f.spec, f.dir / "a.stacksa");
  const auto b = cli::cmd_train(f.train, f.spec, f.dir / "b.stacksa");
  EXPECT_EQ(a.checksum, b.checksum);
  EXPECT_EQ(synth::read_file(f.dir / "a.stacksa"), synth::read_file(f.dir / "b.stacksa"));
}

TEST(Cli, EvaluateWithSpecCrossValidates) {
  const auto f = synth::write_pipeline_fixture("cli_cv", false);
  const auto scores = (f.dir / "cv.jsonl").string();
  const auto r = run_cli({"evaluate", "--spec", f.spec.string(), "--test", f.train.string(), "--folds", "3",
                          "--metric", "macro-recall", "--scores", scores});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "macro-recall 1\n");
  const auto text = synth::read_file(scores);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  EXPECT_NE(run_cli({"evaluate", "--test", f.train.string()}).code, 0);
}

TEST(Cli, AblateWritesReport) {
  const auto f = synth::write_pipeline_fixture("cli_ablate");
  const auto report = (f.dir / "ablation.json").string();
  const auto r = run_cli({"ablate", "--spec", f.spec.string(), "--train", f.train.string(), "--strategy", "bottom-up",
                          "--folds", "3", "--out", report});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(synth::read_file(report));
  EXPECT_EQ(j["systems"].size(), 11u);
  EXPECT_EQ(j["trajectory"].size(), 5u);
  EXPECT_EQ(j["baseline"]["name"], "B4MSA");
  EXPECT_NE(r.out.find("B4MSA"), std::string::npos);
}

TEST(Cli, EmojiPrepareCaps) {
  const auto dir = synth::scratch_dir("cli_emoji");
  const auto raw = emoji_raw_file(dir);
  const auto out = (dir / "emoji.jsonl").string();
  const auto r = run_cli({"emoji-prepare", "--raw", raw, "--out", out, "--max-per-class", "10", "--classes", "4"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto corpus = read_jsonl(fs::path(out));
  EXPECT_LE(corpus.size(), 40u);
  std::set<Label> classes;
  for (const auto& d : corpus) classes.insert(d.label);
  EXPECT_EQ(classes.size(), 4u);
  for (const auto& d : corpus) EXPECT_FALSE(emoji::contains_emoji(d.text));
}

TEST(Cli, ErrorsExitNonzeroWithMessages) {
  const auto f = synth::write_pipeline_fixture("cli_errors", false);
  std::string bad;
  for (int i = 0; i < 6; ++i) bad += jsonl_row(f.corpus[static_cast<std::size_t>(i)]);
  bad += "{\"text\": broken\n";
  synth::write_file(f.dir / "bad.jsonl", bad);
  const auto out = f.dir / "never.stacksa";
  auto r = run_cli({"train", "--train", (f.dir / "bad.jsonl").string(), "--spec", f.spec.string(), "--out",
                    out.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("line 7"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out));

  synth::write_file(f.dir / "th.json", R"({"models": ["TR", "TH"]})");
  r = run_cli({"train", "--train", f.train.string(), "--spec", (f.dir / "th.json").string(), "--out", out.string()});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("TH"), std::string::npos) << r.err;

  EXPECT_NE(run_cli({}).code, 0);
  EXPECT_NE(run_cli({"train", "--train", f.train.string()}).code, 0);
  EXPECT_NE(run_cli({"predict", "--model", "/nonexistent", "--input", f.train.string(), "--out", out.string()}).code, 0);
  EXPECT_NE(run_cli({"evaluate", "--model", "x", "--spec", "y", "--test", "z"}).code, 0);
}

TEST(Cli, BinaryExitCodes) {
  const auto f = synth::write_pipeline_fixture("cli_binary", false);
  const auto model = (f.dir / "m.stacksa").string();
  EXPECT_EQ(run_binary("train --train " + f.train.string() + " --spec " + f.spec.string() + " --out " + model), 0);
  EXPECT_TRUE(fs::exists(model));
  EXPECT_EQ(run_binary("predict --model " + model + " --input " + f.train.string() + " --out " +
                       (f.dir / "p.jsonl").string()),
            0);
  EXPECT_EQ(run_binary("predict --model " + (f.dir / "missing").string() + " --input " + f.train.string() +
                       " --out " + (f.dir / "q.jsonl").string()),
            1);
  EXPECT_FALSE(fs::exists(f.dir / "q.jsonl"));
  EXPECT_NE(run_binary("no-such-command"), 0);
  EXPECT_EQ(run_binary("--help"), 0);
}
