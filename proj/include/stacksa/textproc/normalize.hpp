#pragma once

#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/common/unicode.hpp"
#include "stacksa/textproc/config.hpp"

namespace stacksa {

using Stemmer = std::function<std::string(std::string_view)>;

namespace placeholder {
inline constexpr std::string_view url = "_url";
inline constexpr std::string_view user = "_usr";
inline constexpr std::string_view number = "_num";
inline constexpr std::string_view hashtag = "_htag";
inline constexpr std::string_view entity = "_ent";
inline constexpr std::string_view stopword = "_sw";
inline constexpr std::string_view positive = "_pos";
inline constexpr std::string_view negative = "_neg";
inline constexpr std::string_view neutral = "_neu";
}  // namespace placeholder

// Emoticon inventory; data/emoticons.tsv carries the same table in editable form.
inline const std::map<std::string, std::string>& default_emoticons() {
  static const std::map<std::string, std::string> table = [] {
    std::map<std::string, std::string> t;
    for (const char* e : {":)", ":-)", ":D", ":-D", ";)", ";-)", "=)", "=D", ":]", ":P", ":-P", ":p",
                          "xD", "XD", "<3", "^_^", "^^", ":3", "(:", "8)", "8-)", "☺"})
      t[e] = placeholder::positive;
    for (const char* e : {":(", ":-(", ":'(", ";(", ":[", "D:", ">:(", ":/", ":-/", ":\\", ":S",
                          "</3", ":@", "):", "☹"})
      t[e] = placeholder::negative;
    for (const char* e : {":|", ":-|", "-_-", ":o", ":O", ":-o", "o_O", "O_o"})
      t[e] = placeholder::neutral;
    return t;
  }();
  return table;
}

// Reads "emoticon<TAB>polarity" lines, polarity one of _pos/_neg/_neu.
inline std::map<std::string, std::string> load_emoticons(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open emoticon table " + path);
  std::map<std::string, std::string> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      throw Error(path + " line " + std::to_string(lineno) + ": expected emoticon<TAB>polarity");
    std::string polarity = line.substr(tab + 1);
    if (polarity != placeholder::positive && polarity != placeholder::negative &&
        polarity != placeholder::neutral)
      throw Error(path + " line " + std::to_string(lineno) + ": unknown polarity " + polarity);
    out[line.substr(0, tab)] = polarity;
  }
  return out;
}

// One token per line, UTF-8; blank lines skipped.
inline std::set<std::string> load_word_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open word list " + path);
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t b = line.find_first_not_of(" \t");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_last_not_of(" \t");
    out.insert(line.substr(b, e - b + 1));
  }
  return out;
}

// User-supplied lists and hooks that some normalization options depend on.
struct TextResources {
  std::map<std::string, std::string> emoticons = default_emoticons();
  std::set<std::string> stopwords;
  std::set<std::string> entities;
  std::set<std::string> negators{"no", "not", "never", "nunca"};
  Stemmer stemmer;
};

inline std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::u32string cps = unicode::decode(text);
  std::u32string cur;
  for (char32_t c : cps) {
    if (unicode::is_space(c)) {
      if (!cur.empty()) out.push_back(unicode::encode(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (!cur.empty()) out.push_back(unicode::encode(cur));
  return out;
}

inline std::string join(const std::vector<std::string>& tokens, std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += sep;
    out += tokens[i];
  }
  return out;
}

// Language-independent normalization. The steps run in this order:
//   1. entity list matches          (token level)
//   2. URLs, @users, #hashtags      (token level)
//   3. emoticons -> _pos/_neg/_neu  (token level)
//   4. digit runs -> _num
//   5. diacritic removal
//   6. lowercasing
//   7. collapsing repeated characters
//   8. punctuation -> whitespace
//   9. stopwords, negation, stemming (token level)
// Punctuation becomes whitespace rather than vanishing so that the output is a
// fixed point of the same normalizer.
class Normalizer {
 public:
  Normalizer(TextModelConfig config, TextResources resources)
      : config_(std::move(config)), resources_(std::move(resources)) {
    if (config_.stopwords != ListAction::none && resources_.stopwords.empty())
      throw Error("stopword handling enabled but no stopword list was supplied");
    if (config_.entities != ListAction::none && resources_.entities.empty())
      throw Error("entity handling enabled but no entity list was supplied");
    if (config_.negation && resources_.negators.empty())
      throw Error("negation enabled but no negator list was supplied");
    if (config_.stemming && !resources_.stemmer)
      throw Error("stemming enabled but no stemmer was supplied");
    // Lists are matched against already-normalized tokens.
    stopwords_ = normalize_list(resources_.stopwords);
    negators_ = normalize_list(resources_.negators);
  }

  const TextModelConfig& config() const { return config_; }
  const TextResources& resources() const { return resources_; }

  std::string operator()(std::string_view text) const {
    std::vector<std::string> tokens;
    for (auto& tok : split_whitespace(text)) {
      if (auto t = token_rules(tok)) tokens.push_back(std::move(*t));
    }
    std::string s = join(tokens);
    s = character_rules(s);

    std::vector<std::string> kept;
    for (auto& w : split_whitespace(s)) {
      if (config_.stopwords != ListAction::none && stopwords_.contains(w)) {
        if (config_.stopwords == ListAction::remove) continue;
        w = placeholder::stopword;
      }
      kept.push_back(std::move(w));
    }
    std::vector<std::string> words;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      std::string w = kept[i];
      if (config_.negation && negators_.contains(w) && i + 1 < kept.size()) w += "_" + kept[++i];
      if (config_.stemming && !w.starts_with('_')) {
        w = resources_.stemmer(w);
        if (w.empty()) continue;
      }
      words.push_back(std::move(w));
    }
    return join(words);
  }

 private:
  std::set<std::string> normalize_list(const std::set<std::string>& in) const {
    std::set<std::string> out;
    for (const auto& w : in) {
      std::string n = character_rules(w);
      for (auto& part : split_whitespace(n)) out.insert(part);
    }
    return out;
  }

  static bool starts_with_ci(std::string_view s, std::string_view prefix) {
    if (s.size() < prefix.size()) return false;
    for (std::size_t i = 0; i < prefix.size(); ++i) {
      char c = s[i];
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
      if (c != prefix[i]) return false;
    }
    return true;
  }

  static std::optional<std::string> apply(TokenAction action, std::string token,
                                          std::string_view group_token) {
    switch (action) {
      case TokenAction::keep:
        return token;
      case TokenAction::group:
        return std::string(group_token);
      case TokenAction::remove:
        return std::nullopt;
    }
    return token;
  }

  std::optional<std::string> token_rules(std::string tok) const {
    if (config_.entities != ListAction::none && resources_.entities.contains(tok)) {
      if (config_.entities == ListAction::remove) return std::nullopt;
      return std::string(placeholder::entity);
    }
    if (starts_with_ci(tok, "http://") || starts_with_ci(tok, "https://") ||
        starts_with_ci(tok, "www.")) {
      if (config_.urls != TokenAction::keep) return apply(config_.urls, tok, placeholder::url);
    } else if (tok.size() > 1 && tok.front() == '@') {
      if (config_.users != TokenAction::keep) return apply(config_.users, tok, placeholder::user);
    } else if (tok.size() > 1 && tok.front() == '#') {
      if (config_.hashtags == HashtagAction::group) return std::string(placeholder::hashtag);
      if (config_.hashtags == HashtagAction::remove) return std::nullopt;
    } else if (auto it = resources_.emoticons.find(tok); it != resources_.emoticons.end()) {
      if (config_.emoticons != TokenAction::keep) return apply(config_.emoticons, tok, it->second);
    }
    if (config_.numbers != TokenAction::keep) {
      tok = replace_numbers(tok);
      if (tok.empty()) return std::nullopt;
    }
    return tok;
  }

  // Digit runs, including internal '.' or ',' between digits, become _num.
  std::string replace_numbers(std::string_view tok) const {
    const std::u32string cps = unicode::decode(tok);
    std::string out;
    std::size_t i = 0;
    while (i < cps.size()) {
      if (!unicode::is_digit(cps[i])) {
        unicode::append(out, cps[i++]);
        continue;
      }
      while (i < cps.size() &&
             (unicode::is_digit(cps[i]) ||
              ((cps[i] == U'.' || cps[i] == U',') && i + 1 < cps.size() && unicode::is_digit(cps[i + 1]))))
        ++i;
      if (config_.numbers == TokenAction::group) out += placeholder::number;
    }
    return out;
  }

  std::string character_rules(std::string_view text) const {
    std::string s(text);
    if (config_.remove_diacritics) s = unicode::strip_diacritics(s);
    std::u32string cps = unicode::decode(s);
    if (config_.lowercase)
      for (auto& c : cps) c = unicode::to_lower(c);
    if (config_.remove_duplicates) {
      std::u32string collapsed;
      for (char32_t c : cps)
        if (collapsed.empty() || collapsed.back() != c) collapsed.push_back(c);
      cps = std::move(collapsed);
    }
    if (config_.remove_punctuation)
      for (auto& c : cps)
        if (unicode::is_punctuation(c)) c = U' ';
    return join(split_whitespace(unicode::encode(cps)));
  }

  TextModelConfig config_;
  TextResources resources_;
  std::set<std::string> stopwords_;
  std::set<std::string> negators_;
};

inline std::string normalize(std::string_view text, const TextModelConfig& config,
                             const TextResources& resources = {}) {
  return Normalizer(config, resources)(text);
}

}  // namespace stacksa
