#pragma once

// On-disk resources for a full five-model pipeline over the separable corpus.

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "stacksa/io/jsonl.hpp"
#include "synthetic.hpp"

namespace synth {

struct PipelineFixture {
  std::filesystem::path dir;
  std::filesystem::path train;
  std::filesystem::path spec;
  stacksa::Corpus corpus;
};

inline nlohmann::json small_evodag_json() {
  return {{"population_size", 40}, {"early_stop_window", 300}, {"max_evaluations", 3000}};
}

inline PipelineFixture write_pipeline_fixture(const std::string& name, bool all_kinds = true,
                                              std::uint64_t seed = 1) {
  PipelineFixture f;
  f.dir = scratch_dir(name);
  f.corpus = separable_corpus(seed, 12);
  f.train = f.dir / "train.jsonl";
  stacksa::write_jsonl(f.train, f.corpus);

  // HA: four sentiment-like classes over the marker vocabulary.
  stacksa::Corpus ha;
  for (int i = 0; i < 6; ++i) {
    ha.push_back({"tagpos happy " + std::to_string(i), "P"});
    ha.push_back({"tagneg sad " + std::to_string(i), "N"});
    ha.push_back({"tagneu meh " + std::to_string(i), "NEU"});
    ha.push_back({"nothing at all " + std::to_string(i), "NONE"});
  }
  stacksa::write_jsonl(f.dir / "ha.jsonl", ha);
  write_file(f.dir / "lexicon.tsv", "tagpos\tpos\ngood\tpos\ntagneg\tneg\nbad\tneg\n");
  stacksa::Corpus emoji;
  for (int i = 0; i < 5; ++i) {
    emoji.push_back({"tagpos love " + std::to_string(i), "❤"});
    emoji.push_back({"tagneg cry " + std::to_string(i), "😭"});
    emoji.push_back({"funny lol " + std::to_string(i), "😂"});
  }
  stacksa::write_jsonl(f.dir / "emoji.jsonl", emoji);
  write_file(f.dir / "vectors.txt",
             "4 3\ntagpos 0 0 1\ntagneg 1 0 0\ntagneu 0 1 0\nhappy 0.1 0.2 0.9\n");

  nlohmann::json spec{{"language", "english"}, {"k", 3}, {"seed", seed}, {"evodag", small_evodag_json()}};
  if (all_kinds) {
    spec["models"] = {"TR", "HA", "TH", "Emo", "FT"};
    spec["resources"] = {{"ha_corpus", "ha.jsonl"},
                         {"lexicon", "lexicon.tsv"},
                         {"emoji_corpus", "emoji.jsonl"},
                         {"embeddings", "vectors.txt"}};
  } else {
    spec["models"] = {"TR"};
  }
  f.spec = f.dir / "spec.json";
  write_file(f.spec, spec.dump(2));
  return f;
}

}  // namespace synth
