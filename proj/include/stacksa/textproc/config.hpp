#pragma once

#include <compare>
#include <fstream>
#include <set>
#include <string>
#include <string_view>
#include <utility>

#include <json.hpp>

#include "stacksa/common/error.hpp"

namespace stacksa {

enum class TokenAction { keep, group, remove };
enum class HashtagAction { keep, group, remove, none };
enum class ListAction { none, remove, group };

// A skip-gram (words, skip): `words` words taken with `skip` words skipped
// between consecutive picks.
struct SkipGram {
  int words = 2;
  int skip = 1;
  auto operator<=>(const SkipGram&) const = default;
};

struct TextModelConfig {
  bool remove_diacritics = false;
  bool remove_duplicates = false;
  bool remove_punctuation = false;
  bool lowercase = false;
  TokenAction emoticons = TokenAction::keep;
  TokenAction numbers = TokenAction::keep;
  TokenAction urls = TokenAction::keep;
  TokenAction users = TokenAction::keep;
  HashtagAction hashtags = HashtagAction::none;
  ListAction entities = ListAction::none;
  bool negation = false;
  ListAction stopwords = ListAction::none;
  bool stemming = false;

  std::set<int> nwords{1};
  std::set<SkipGram> skipgrams;
  std::set<int> qgrams;

  bool operator==(const TextModelConfig&) const = default;

  void validate() const {
    for (int n : nwords)
      if (n < 1) throw Error("nwords entries must be >= 1");
    for (int q : qgrams)
      if (q < 1) throw Error("qgrams entries must be >= 1");
    for (const auto& s : skipgrams)
      if (s.words < 2 || s.skip < 1) throw Error("skip-grams need words >= 2 and skip >= 1");
    if (nwords.empty() && skipgrams.empty() && qgrams.empty())
      throw Error("at least one tokenizer must be enabled");
  }
};

namespace detail {

template <class Enum, std::size_t N>
void enum_from_json(const nlohmann::json& j, Enum& e,
                    const std::pair<Enum, const char*> (&names)[N]) {
  const auto s = j.get<std::string>();
  for (const auto& [value, name] : names) {
    if (s == name) {
      e = value;
      return;
    }
  }
  throw Error("unknown option value '" + s + "'");
}

template <class Enum, std::size_t N>
void enum_to_json(nlohmann::json& j, Enum e, const std::pair<Enum, const char*> (&names)[N]) {
  for (const auto& [value, name] : names) {
    if (value == e) {
      j = name;
      return;
    }
  }
}

inline constexpr std::pair<TokenAction, const char*> kTokenActionNames[] = {
    {TokenAction::keep, "keep"}, {TokenAction::group, "group"}, {TokenAction::remove, "delete"}};
inline constexpr std::pair<HashtagAction, const char*> kHashtagActionNames[] = {
    {HashtagAction::none, "none"},
    {HashtagAction::keep, "keep"},
    {HashtagAction::group, "group"},
    {HashtagAction::remove, "delete"}};
inline constexpr std::pair<ListAction, const char*> kListActionNames[] = {
    {ListAction::none, "none"}, {ListAction::remove, "delete"}, {ListAction::group, "group"}};

}  // namespace detail

inline void to_json(nlohmann::json& j, TokenAction e) { detail::enum_to_json(j, e, detail::kTokenActionNames); }
inline void from_json(const nlohmann::json& j, TokenAction& e) {
  detail::enum_from_json(j, e, detail::kTokenActionNames);
}
inline void to_json(nlohmann::json& j, HashtagAction e) { detail::enum_to_json(j, e, detail::kHashtagActionNames); }
inline void from_json(const nlohmann::json& j, HashtagAction& e) {
  detail::enum_from_json(j, e, detail::kHashtagActionNames);
}
inline void to_json(nlohmann::json& j, ListAction e) { detail::enum_to_json(j, e, detail::kListActionNames); }
inline void from_json(const nlohmann::json& j, ListAction& e) {
  detail::enum_from_json(j, e, detail::kListActionNames);
}

inline void to_json(nlohmann::json& j, const SkipGram& s) { j = nlohmann::json::array({s.words, s.skip}); }

inline void from_json(const nlohmann::json& j, SkipGram& s) {
  if (!j.is_array() || j.size() != 2) throw Error("skip-gram must be a [words, skip] pair");
  s.words = j.at(0).get<int>();
  s.skip = j.at(1).get<int>();
}

inline void to_json(nlohmann::json& j, const TextModelConfig& c) {
  j = nlohmann::json{{"remove_diacritics", c.remove_diacritics},
                     {"remove_duplicates", c.remove_duplicates},
                     {"remove_punctuation", c.remove_punctuation},
                     {"lowercase", c.lowercase},
                     {"emoticons", c.emoticons},
                     {"numbers", c.numbers},
                     {"urls", c.urls},
                     {"users", c.users},
                     {"hashtags", c.hashtags},
                     {"entities", c.entities},
                     {"negation", c.negation},
                     {"stopwords", c.stopwords},
                     {"stemming", c.stemming},
                     {"nwords", c.nwords},
                     {"skipgrams", c.skipgrams},
                     {"qgrams", c.qgrams}};
}

// Missing keys keep their defaults, so partial documents act as overrides.
inline void from_json(const nlohmann::json& j, TextModelConfig& c) {
  static const std::set<std::string> known{
      "name",      "remove_diacritics", "remove_duplicates", "remove_punctuation", "lowercase",
      "emoticons", "numbers",           "urls",              "users",              "hashtags",
      "entities",  "negation",          "stopwords",         "stemming",           "nwords",
      "skipgrams", "qgrams"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw Error("unknown text model option '" + key + "'");
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) j.at(key).get_to(field);
  };
  get("remove_diacritics", c.remove_diacritics);
  get("remove_duplicates", c.remove_duplicates);
  get("remove_punctuation", c.remove_punctuation);
  get("lowercase", c.lowercase);
  get("emoticons", c.emoticons);
  get("numbers", c.numbers);
  get("urls", c.urls);
  get("users", c.users);
  get("hashtags", c.hashtags);
  get("entities", c.entities);
  get("negation", c.negation);
  get("stopwords", c.stopwords);
  get("stemming", c.stemming);
  get("nwords", c.nwords);
  get("skipgrams", c.skipgrams);
  get("qgrams", c.qgrams);
}

// Canonical string form; used as the final tie-break key in searches.
inline std::string encode(const TextModelConfig& c) { return nlohmann::json(c).dump(); }

namespace presets {

// Per-language settings. Rows that show a single value across languages apply
// to every language.
inline TextModelConfig common_base() {
  TextModelConfig c;
  c.remove_diacritics = true;
  c.remove_duplicates = true;
  c.remove_punctuation = true;
  c.lowercase = true;
  c.emoticons = TokenAction::group;
  c.numbers = TokenAction::group;
  c.urls = TokenAction::group;
  c.users = TokenAction::group;
  c.hashtags = HashtagAction::none;
  c.entities = ListAction::none;
  c.negation = false;
  c.stopwords = ListAction::none;
  c.stemming = false;
  return c;
}

inline TextModelConfig default_language() {
  TextModelConfig c = common_base();
  c.nwords = {1, 2};
  c.skipgrams = {};
  c.qgrams = {2, 3, 4};
  return c;
}

inline TextModelConfig arabic() {
  TextModelConfig c = common_base();
  c.entities = ListAction::remove;
  c.stopwords = ListAction::remove;
  c.nwords = {1};
  c.skipgrams = {};
  c.qgrams = {2, 3, 4};
  return c;
}

inline TextModelConfig english() {
  TextModelConfig c = common_base();
  c.remove_diacritics = false;
  c.numbers = TokenAction::remove;
  c.nwords = {1, 2};
  c.skipgrams = {{3, 1}};
  c.qgrams = {3, 4};
  return c;
}

inline TextModelConfig spanish() {
  TextModelConfig c = common_base();
  c.nwords = {1};
  c.skipgrams = {{2, 1}};
  c.qgrams = {2, 3, 4, 5, 6};
  return c;
}

inline TextModelConfig by_name(std::string_view name) {
  if (name == "default") return default_language();
  if (name == "arabic") return arabic();
  if (name == "english") return english();
  if (name == "spanish") return spanish();
  throw Error("unknown language preset '" + std::string(name) + "'");
}

}  // namespace presets

inline TextModelConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed config file " + path + ": " + e.what());
  }
  TextModelConfig c;
  from_json(j, c);
  c.validate();
  return c;
}

}  // namespace stacksa
