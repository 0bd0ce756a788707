#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stacksa/common/error.hpp"
#include "stacksa/io/archive.hpp"
#include "stacksa/io/files.hpp"
#include "stacksa/io/jsonl.hpp"
#include "stacksa/io/serialize.hpp"
#include "stacksa/models/embedding.hpp"
#include "stacksa/models/emoji.hpp"
#include "stacksa/models/lexicon.hpp"
#include "stacksa/models/text_models.hpp"
#include "stacksa/stacker/stacker.hpp"
#include "stacksa/textproc/config.hpp"

namespace stacksa {

// Files the pipeline reads. Relative paths in a spec file are resolved against
// the spec file's directory.
struct ResourcePaths {
  std::optional<std::filesystem::path> ha_corpus;     // JSONL, HA
  std::optional<std::filesystem::path> lexicon;       // word<TAB>pos|neg, TH
  std::optional<std::filesystem::path> emoji_corpus;  // JSONL labelled by emoji, Emo
  std::optional<std::filesystem::path> emoji_model;   // archived Emo member, Emo
  std::optional<std::filesystem::path> embeddings;    // text embedding table, FT
  std::optional<std::filesystem::path> stopwords;     // one word per line
  std::optional<std::filesystem::path> entities;      // one word per line
  std::optional<std::filesystem::path> negators;      // one word per line
  std::optional<std::filesystem::path> emoticons;     // emoticon<TAB>polarity

  bool operator==(const ResourcePaths&) const = default;
};

struct PipelineSpec {
  std::string language = "default";
  nlohmann::json text_overrides = nlohmann::json::object();  // partial text model options
  std::vector<ModelKind> kinds{ModelKind::TR};                // canonical order
  ResourcePaths resources;
  int k = 5;
  std::uint64_t seed = 0;
  LinearSvmParams svm;
  evodag::EvoDagParams evodag;

  TextModelConfig config() const {
    auto c = presets::by_name(language);
    from_json(text_overrides, c);
    c.validate();
    return c;
  }

  bool enabled(ModelKind kind) const { return std::find(kinds.begin(), kinds.end(), kind) != kinds.end(); }

  StackerParams stacker_params() const {
    StackerParams p;
    p.k = k;
    p.seed = seed;
    p.svm = svm;
    p.svm.seed = seed;
    p.evodag = evodag;
    p.evodag.seed = seed;
    return p;
  }

  void validate() const {
    if (!enabled(ModelKind::TR)) throw Error("the TR model is always enabled");
    if (k < 2) throw Error("k must be at least 2");
    (void)config();
    evodag.validate();
    for (auto kind : kinds) check_resource(kind);
  }

  void check_resource(ModelKind kind) const {
    auto need = [&](bool present, const char* what) {
      if (!present) throw Error("model " + to_string(kind) + " is enabled but resource '" + what + "' is missing");
    };
    switch (kind) {
      case ModelKind::TR: break;
      case ModelKind::HA: need(resources.ha_corpus.has_value(), "ha_corpus"); break;
      case ModelKind::TH: need(resources.lexicon.has_value(), "lexicon"); break;
      case ModelKind::Emo:
        need(resources.emoji_corpus || resources.emoji_model, "emoji_corpus or emoji_model");
        break;
      case ModelKind::FT: need(resources.embeddings.has_value(), "embeddings"); break;
    }
  }
};

inline std::vector<ModelKind> canonical_kinds(std::vector<ModelKind> kinds) {
  std::sort(kinds.begin(), kinds.end());
  if (std::adjacent_find(kinds.begin(), kinds.end()) != kinds.end()) throw Error("duplicate model kind");
  return kinds;
}

inline std::string subset_name(std::span<const ModelKind> kinds) {
  std::string out;
  for (auto k : kinds) out += (out.empty() ? "" : "+") + to_string(k);
  return out;
}

namespace detail {

inline void to_json(nlohmann::json& j, const evodag::EvoDagParams& p) {
  std::vector<std::string> functions;
  for (auto f : p.functions) functions.emplace_back(evodag::name_of(f));
  j = nlohmann::json{{"population_size", p.population_size}, {"tournament_size", p.tournament_size},
                     {"early_stop_window", p.early_stop_window}, {"train_fraction", p.train_fraction},
                     {"max_evaluations", p.max_evaluations}, {"nc_arity", p.nc_arity},
                     {"functions", functions}};
  if (p.time_budget) j["time_budget"] = *p.time_budget;
}

inline void reject_unknown(const nlohmann::json& j, const std::set<std::string>& known, const std::string& where) {
  if (!j.is_object()) throw Error(where + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw Error("unknown " + where + " option '" + key + "'");
}

inline void from_json(const nlohmann::json& j, evodag::EvoDagParams& p) {
  reject_unknown(j,
                 {"population_size", "tournament_size", "early_stop_window", "train_fraction", "max_evaluations",
                  "nc_arity", "functions", "time_budget"},
                 "evodag");
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("population_size", p.population_size);
  get("tournament_size", p.tournament_size);
  get("early_stop_window", p.early_stop_window);
  get("train_fraction", p.train_fraction);
  get("max_evaluations", p.max_evaluations);
  get("nc_arity", p.nc_arity);
  if (j.contains("time_budget") && !j["time_budget"].is_null()) p.time_budget = j["time_budget"].get<double>();
  if (j.contains("functions")) {
    p.functions.clear();
    for (const auto& name : j["functions"]) p.functions.push_back(evodag::func_from_name(name.get<std::string>()));
  }
}

}  // namespace detail

inline nlohmann::json spec_to_json(const PipelineSpec& s) {
  nlohmann::json res = nlohmann::json::object();
  auto put = [&](const char* key, const std::optional<std::filesystem::path>& p) {
    if (p) res[key] = p->generic_string();
  };
  put("ha_corpus", s.resources.ha_corpus);
  put("lexicon", s.resources.lexicon);
  put("emoji_corpus", s.resources.emoji_corpus);
  put("emoji_model", s.resources.emoji_model);
  put("embeddings", s.resources.embeddings);
  put("stopwords", s.resources.stopwords);
  put("entities", s.resources.entities);
  put("negators", s.resources.negators);
  put("emoticons", s.resources.emoticons);
  std::vector<std::string> kinds;
  for (auto k : s.kinds) kinds.push_back(to_string(k));
  nlohmann::json evo;
  detail::to_json(evo, s.evodag);
  return nlohmann::json{{"language", s.language},
                        {"text", s.text_overrides},
                        {"models", kinds},
                        {"resources", res},
                        {"k", s.k},
                        {"seed", s.seed},
                        {"svm", {{"C", s.svm.C}, {"max_iter", s.svm.max_iter}, {"tol", s.svm.tol}}},
                        {"evodag", evo}};
}

// Missing keys keep their defaults; unknown keys are errors.
inline PipelineSpec pipeline_spec_from_json(const nlohmann::json& j,
                                            const std::filesystem::path& base_dir = {}) {
  detail::reject_unknown(j, {"language", "text", "models", "resources", "k", "seed", "svm", "evodag"}, "spec");
  PipelineSpec s;
  if (j.contains("language")) s.language = j["language"].get<std::string>();
  if (j.contains("text")) s.text_overrides = j["text"];
  if (j.contains("models")) {
    std::vector<ModelKind> kinds;
    for (const auto& name : j["models"]) kinds.push_back(parse_kind(name.get<std::string>()));
    s.kinds = canonical_kinds(kinds);
  }
  if (j.contains("resources")) {
    const auto& r = j["resources"];
    detail::reject_unknown(r,
                           {"ha_corpus", "lexicon", "emoji_corpus", "emoji_model", "embeddings", "stopwords",
                            "entities", "negators", "emoticons"},
                           "resources");
    auto get = [&](const char* key, std::optional<std::filesystem::path>& field) {
      if (!r.contains(key) || r[key].is_null()) return;
      std::filesystem::path p(r[key].get<std::string>());
      field = p.is_absolute() || base_dir.empty() ? p : base_dir / p;
    };
    get("ha_corpus", s.resources.ha_corpus);
    get("lexicon", s.resources.lexicon);
    get("emoji_corpus", s.resources.emoji_corpus);
    get("emoji_model", s.resources.emoji_model);
    get("embeddings", s.resources.embeddings);
    get("stopwords", s.resources.stopwords);
    get("entities", s.resources.entities);
    get("negators", s.resources.negators);
    get("emoticons", s.resources.emoticons);
  }
  if (j.contains("k")) s.k = j["k"].get<int>();
  if (j.contains("seed")) s.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("svm")) {
    const auto& v = j["svm"];
    detail::reject_unknown(v, {"C", "max_iter", "tol"}, "svm");
    if (v.contains("C")) s.svm.C = v["C"].get<double>();
    if (v.contains("max_iter")) s.svm.max_iter = v["max_iter"].get<int>();
    if (v.contains("tol")) s.svm.tol = v["tol"].get<double>();
  }
  if (j.contains("evodag")) detail::from_json(j["evodag"], s.evodag);
  s.validate();
  return s;
}

inline PipelineSpec load_pipeline_spec(const std::filesystem::path& path) {
  const auto text = read_file(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed spec file " + path.string() + ": " + e.what());
  }
  try {
    return pipeline_spec_from_json(j, path.parent_path());
  } catch (const nlohmann::json::exception& e) {
    throw Error("invalid spec file " + path.string() + ": " + e.what());
  }
}

// The external models, built once and shared by every training run that
// enables them. Only TR depends on the training data.
struct PipelineResources {
  TextModelConfig config;
  TextResources text;
  std::map<ModelKind, FirstStagePtr> models;
};

namespace detail {

template <class F>
auto with_kind(ModelKind kind, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const std::exception& e) {
    throw Error("model " + to_string(kind) + ": " + e.what());
  }
}

}  // namespace detail

inline TextResources read_text_resources(const ResourcePaths& r) {
  TextResources t;
  if (r.emoticons) t.emoticons = load_emoticons(r.emoticons->string());
  if (r.stopwords) t.stopwords = load_word_list(r.stopwords->string());
  if (r.entities) t.entities = load_word_list(r.entities->string());
  if (r.negators) t.negators = load_word_list(r.negators->string());
  return t;
}

inline PipelineResources prepare_resources(const PipelineSpec& spec, std::vector<std::string>* warnings = nullptr) {
  spec.validate();
  PipelineResources out;
  out.config = spec.config();
  out.text = read_text_resources(spec.resources);
  for (auto kind : spec.kinds) {
    if (kind == ModelKind::TR) continue;
    out.models[kind] = detail::with_kind(kind, [&]() -> FirstStagePtr {
      switch (kind) {
        case ModelKind::HA:
          return build_ha_model(read_jsonl(*spec.resources.ha_corpus), out.config, out.text, spec.svm);
        case ModelKind::TH:
          return std::make_shared<LexiconModel>(load_lexicon(spec.resources.lexicon->string(), warnings), out.config,
                                                out.text, warnings);
        case ModelKind::Emo: {
          if (spec.resources.emoji_model) return load_member_archive(*spec.resources.emoji_model);
          EmojiCorpus corpus;
          corpus.documents = read_jsonl(*spec.resources.emoji_corpus);
          for (const auto& d : corpus.documents) ++corpus.counts[d.label];
          return build_emoji_model(corpus, out.config, out.text, spec.svm);
        }
        case ModelKind::FT:
          return build_embedding_model(load_embeddings(spec.resources.embeddings->string()));
        default:
          throw Error("unexpected model kind");
      }
    });
    if (out.models[kind]->kind() != kind) throw Error("resource for " + to_string(kind) + " holds another model kind");
  }
  return out;
}

// Members for a training set, in canonical kind order: TR fitted on `train`,
// the rest taken from the prepared resources.
inline std::vector<FirstStagePtr> assemble_members(const PipelineResources& res, std::span<const ModelKind> kinds,
                                                   const Corpus& train) {
  std::vector<FirstStagePtr> out;
  for (auto kind : canonical_kinds({kinds.begin(), kinds.end()})) {
    if (kind == ModelKind::TR) {
      out.push_back(build_tr_model(texts_of(train), res.config, res.text));
    } else {
      auto it = res.models.find(kind);
      if (it == res.models.end()) throw Error("model " + to_string(kind) + " was not prepared");
      out.push_back(it->second);
    }
  }
  return out;
}

inline StackedModel train_pipeline(const PipelineSpec& spec, const PipelineResources& res, const Corpus& train,
                                   std::span<const ModelKind> kinds, evodag::EvolutionStats* stats = nullptr) {
  return fit_stacked(assemble_members(res, kinds, train), train, spec.stacker_params(), stats);
}

inline StackedModel train_pipeline(const PipelineSpec& spec, const PipelineResources& res, const Corpus& train,
                                   evodag::EvolutionStats* stats = nullptr) {
  return train_pipeline(spec, res, train, spec.kinds, stats);
}

}  // namespace stacksa
