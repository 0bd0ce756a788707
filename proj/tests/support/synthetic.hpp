#pragma once

// Synthetic corpora and fixtures shared by the test suites.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "stacksa/common/rng.hpp"
#include "stacksa/common/types.hpp"

namespace synth {

using stacksa::Corpus;
using stacksa::Rng;

inline std::string random_word(Rng& rng, std::size_t min_len, std::size_t max_len,
                               const std::string& alphabet = "abcdefghijklmnopqrstuvwxy") {
  std::string w;
  const std::size_t len = min_len + rng.index(max_len - min_len + 1);
  for (std::size_t i = 0; i < len; ++i) w += alphabet[rng.index(alphabet.size())];
  return w;
}

// Random UTF-8 text drawn from a mixed inventory: ASCII, accented letters,
// digits, punctuation, emoticons, URLs, mentions.
inline std::string random_messy_text(Rng& rng, std::size_t max_tokens = 12) {
  static const std::vector<std::string> pieces{
      "hola", "Canción", "ÉL", "niño", "gooood", "!!",   ":)",     ":(",   "x2",     "3.14", "@user",
      "#tag", "http://a.b/c", "www.x.org", "¿qué?", "a,b",  "don't", "ÀÉÎ", "aa.aa", "_1",   "1_", "مرحبا",
      "كِتَاب", "ß", "İstanbul", "--", "...", "😀", "XD", "noooo", ":-)", "q", "e.g."};
  const std::size_t n = rng.index(max_tokens + 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += rng.index(4) == 0 ? "  " : " ";
    out += pieces[rng.index(pieces.size())];
  }
  return out;
}

// Class "yes" iff the text contains the character 'z' (inserted into every
// word); words are random so whole-word features do not generalize.
inline Corpus char_presence_corpus(std::uint64_t seed, std::size_t per_class) {
  Rng rng(seed);
  Corpus c;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (int cls = 0; cls < 2; ++cls) {
      std::vector<std::string> words;
      for (int w = 0; w < 4; ++w) words.push_back(random_word(rng, 4, 6, "abc"));
      if (cls == 1)
        for (auto& w : words) w.insert(rng.index(w.size() + 1), 1, 'z');
      std::string text;
      for (std::size_t j = 0; j < words.size(); ++j) text += (j ? " " : "") + words[j];
      c.push_back({text, cls ? "yes" : "no"});
    }
  }
  return c;
}

// Each class has its own marker vocabulary; every document carries two markers
// plus shared noise, so the classes are trivially separable.
inline Corpus separable_corpus(std::uint64_t seed, std::size_t per_class,
                               const std::vector<std::string>& classes = {"neg", "neu", "pos"}) {
  Rng rng(seed);
  Corpus c;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t k = 0; k < classes.size(); ++k) {
      std::string text = "marker" + classes[k] + std::to_string(rng.index(3)) + " ";
      text += random_word(rng, 3, 5, "klmnop") + " ";
      text += "tag" + classes[k] + " " + random_word(rng, 3, 5, "klmnop");
      c.push_back({text, classes[k]});
    }
  }
  return c;
}

struct Points {
  std::vector<std::vector<double>> X;
  std::vector<std::string> y;
};

// Noiseless XOR pattern in [-1, 1]^2 with a margin around the axes.
inline Points xor_points(std::uint64_t seed, std::size_t n) {
  Rng rng(seed);
  Points p;
  for (std::size_t i = 0; i < n; ++i) {
    double a = rng.uniform(0.1, 1.0) * (rng.index(2) ? 1 : -1);
    double b = rng.uniform(0.1, 1.0) * (rng.index(2) ? 1 : -1);
    p.X.push_back({a, b});
    p.y.push_back(a * b > 0 ? "same" : "diff");
  }
  return p;
}

inline void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  out << contents;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("stacksa_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace synth
