#include <algorithm>
#include <cmath>
#include <map>

#include <gtest/gtest.h>

#include "stacksa/common/unicode.hpp"
#include "stacksa/textproc/config.hpp"
#include "stacksa/textproc/normalize.hpp"
#include "stacksa/textproc/parameter_search.hpp"
#include "stacksa/textproc/tfidf.hpp"
#include "stacksa/textproc/tokenize.hpp"
#include "support/oracles.hpp"
#include "support/synthetic.hpp"

using namespace stacksa;

namespace {

std::multiset<std::string> surface(const TokenBag& bag) {
  std::multiset<std::string> out;
  for (const auto& t : bag) out.insert(t.text);
  return out;
}

TextModelConfig only_words(std::set<int> n) {
  TextModelConfig c;
  c.nwords = std::move(n);
  return c;
}

TextResources arabic_resources() {
  TextResources r;
  r.stopwords = {"el", "la", "de", "في"};
  r.entities = {"Obama", "@user"};
  return r;
}

}  // namespace

TEST(Normalize, UrlsNumbersLowercasePunctuation) {
  TextModelConfig c;
  c.urls = TokenAction::group;
  c.numbers = TokenAction::group;
  c.lowercase = true;
  c.remove_punctuation = true;
  EXPECT_EQ(normalize("Visita http://a.b ya!!", c), "visita _url ya");
}

TEST(Normalize, Diacritics) {
  TextModelConfig c;
  c.remove_diacritics = true;
  c.lowercase = true;
  EXPECT_EQ(normalize("Canción", c), "cancion");
  EXPECT_EQ(normalize("كِتَاب", c), "كتاب");
}

TEST(Normalize, EmoticonGrouping) {
  TextModelConfig c;
  c.emoticons = TokenAction::group;
  EXPECT_EQ(normalize(":) great", c), "_pos great");
  EXPECT_EQ(normalize("bad :( day :|", c), "bad _neg day _neu");
  c.emoticons = TokenAction::remove;
  EXPECT_EQ(normalize(":) great", c), "great");
}

TEST(Normalize, UsersHashtagsNumbers) {
  TextModelConfig c;
  c.users = TokenAction::group;
  c.hashtags = HashtagAction::group;
  c.numbers = TokenAction::group;
  EXPECT_EQ(normalize("@ana #fun 3.14 abc12", c), "_usr _htag _num abc_num");
  c.numbers = TokenAction::remove;
  c.users = TokenAction::remove;
  c.hashtags = HashtagAction::none;
  EXPECT_EQ(normalize("@ana #fun 42 abc12", c), "#fun abc");
}

TEST(Normalize, DuplicateCollapse) {
  TextModelConfig c;
  c.remove_duplicates = true;
  EXPECT_EQ(normalize("goooood  nooo!!", c), "god no!");
}

TEST(Normalize, StopwordsEntitiesNegation) {
  TextModelConfig c;
  c.lowercase = true;
  c.stopwords = ListAction::remove;
  c.entities = ListAction::group;
  c.negation = true;
  TextResources r;
  r.stopwords = {"The", "a"};
  r.entities = {"Obama"};
  EXPECT_EQ(normalize("Obama is not the happy A man", c, r), "_ent is not_happy man");
}

TEST(Normalize, StemmerIsPluggable) {
  TextModelConfig c;
  c.stemming = true;
  TextResources r;
  r.stemmer = [](std::string_view w) {
    std::string s(w);
    if (s.size() > 3 && s.ends_with("s")) s.pop_back();
    return s;
  };
  EXPECT_EQ(normalize("cats and dogs _url", c, r), "cat and dog _url");
}

TEST(Normalize, MissingResourcesAreConfigurationErrors) {
  TextModelConfig c;
  c.stopwords = ListAction::remove;
  EXPECT_THROW(Normalizer(c, {}), Error);
  c = {};
  c.stemming = true;
  EXPECT_THROW(Normalizer(c, {}), Error);
  c = {};
  c.entities = ListAction::remove;
  EXPECT_THROW(Normalizer(c, {}), Error);
}

TEST(Normalize, IdempotentForPresets) {
  Rng rng(7);
  for (const char* name : {"default", "arabic", "english", "spanish"}) {
    Normalizer norm(presets::by_name(name), arabic_resources());
    for (int i = 0; i < 400; ++i) {
      const std::string text = synth::random_messy_text(rng);
      const std::string once = norm(text);
      EXPECT_EQ(norm(once), once) << name << ": " << text;
    }
  }
}

TEST(Tokenize, WorkedSkipGramExample) {
  TextModelConfig c;
  c.nwords = {};
  c.skipgrams = {{2, 1}};
  const auto bag = tokenize("have a nice weekend", c);
  EXPECT_EQ(surface(bag), (std::multiset<std::string>{"have nice", "a weekend"}));
}

TEST(Tokenize, QGrams) {
  TextModelConfig c;
  c.nwords = {};
  c.qgrams = {2};
  EXPECT_EQ(surface(tokenize("abc", c)), (std::multiset<std::string>{"ab", "bc"}));
  // q-grams run over code points and include spaces
  EXPECT_EQ(surface(tokenize("ñ a", c)), (std::multiset<std::string>{"ñ ", " a"}));
}

TEST(Tokenize, WordNGrams) {
  EXPECT_EQ(surface(tokenize("a b c", only_words({1, 2}))),
            (std::multiset<std::string>{"a", "b", "c", "a b", "b c"}));
  EXPECT_TRUE(tokenize("", only_words({1, 2})).empty());
}

TEST(Tokenize, FamiliesNeverCollide) {
  TextModelConfig c;
  c.nwords = {1};
  c.qgrams = {2};
  const auto bag = tokenize("ab", c);
  ASSERT_EQ(bag.size(), 2u);
  EXPECT_EQ(bag[0].text, bag[1].text);
  EXPECT_NE(bag[0].key(), bag[1].key());
}

TEST(Tokenize, CountAlgebraMatchesOracle) {
  Rng rng(11);
  const std::u32string alphabet = U"abcñé ";
  for (int trial = 0; trial < 300; ++trial) {
    std::u32string s;
    const std::size_t len = rng.index(25);
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng.index(alphabet.size())];
    const std::string text = unicode::encode(s);
    const std::size_t nwords = oracle::words(s).size();
    for (int q = 1; q <= 4; ++q) {
      TextModelConfig c;
      c.nwords = {};
      c.qgrams = {q};
      const auto expected = static_cast<std::size_t>(std::max<long>(0, static_cast<long>(s.size()) - q + 1));
      EXPECT_EQ(tokenize(text, c).size(), expected);
    }
    for (SkipGram sg : {SkipGram{2, 1}, SkipGram{3, 1}, SkipGram{2, 2}}) {
      TextModelConfig c;
      c.nwords = {};
      c.skipgrams = {sg};
      const long expected = std::max<long>(0, static_cast<long>(nwords) - (sg.words - 1) * (sg.skip + 1));
      EXPECT_EQ(static_cast<long>(tokenize(text, c).size()), expected);
    }
  }
}

TEST(Config, ValidationRejectsBadTokenizers) {
  TextModelConfig c;
  c.nwords = {};
  EXPECT_THROW(c.validate(), Error);
  c.qgrams = {0};
  EXPECT_THROW(c.validate(), Error);
  c.qgrams = {};
  c.skipgrams = {{1, 1}};
  EXPECT_THROW(c.validate(), Error);
}

TEST(Config, PresetFilesMatchBuiltIns) {
  for (const char* name : {"default", "arabic", "english", "spanish"}) {
    const auto loaded = load_config_file(std::string(STACKSA_DATA_DIR) + "/presets/" + name + ".json");
    EXPECT_EQ(loaded, presets::by_name(name)) << name;
  }
  EXPECT_EQ(load_emoticons(std::string(STACKSA_DATA_DIR) + "/emoticons.tsv"), default_emoticons());
}

TEST(Config, JsonRoundTripAndUnknownValues) {
  const auto c = presets::spanish();
  TextModelConfig back;
  from_json(nlohmann::json(c), back);
  EXPECT_EQ(back, c);
  TextModelConfig bad;
  EXPECT_THROW(from_json(nlohmann::json{{"numbers", "bogus"}}, bad), Error);
  EXPECT_THROW(from_json(nlohmann::json{{"lowercas", true}}, bad), Error);
  EXPECT_THROW(presets::by_name("klingon"), Error);
}

TEST(Tfidf, DocumentFrequenciesAgainstBruteForce) {
  const std::vector<std::string> corpus{"a b", "a"};
  const auto model = fit_tfidf(corpus, only_words({1}));
  // brute-force df count
  std::map<std::string, std::size_t> df;
  for (const auto& doc : corpus) {
    std::set<std::string> seen;
    for (auto& w : split_whitespace(doc)) seen.insert("w|" + w);
    for (auto& w : seen) ++df[w];
  }
  ASSERT_EQ(model.dimension(), df.size());
  for (auto& [term, count] : df) {
    const auto idx = model.tfidf().lookup(term);
    ASSERT_TRUE(idx);
    EXPECT_EQ(model.tfidf().document_frequency()[*idx], count);
    EXPECT_DOUBLE_EQ(model.tfidf().idf()[*idx], std::log(3.0 / (1.0 + count)) + 1.0);
  }
  // unsmoothed ln(N/df) would make "a" weightless; the smoothed form does not.
  EXPECT_DOUBLE_EQ(model.tfidf().idf()[*model.tfidf().lookup("w|a")], 1.0);
}

TEST(Tfidf, SingleDocumentHasUniformIdf) {
  const std::vector<std::string> corpus{"x y z y"};
  const auto model = fit_tfidf(corpus, only_words({1, 2}));
  const auto& idf = model.tfidf().idf();
  for (double v : idf) EXPECT_DOUBLE_EQ(v, idf.front());
}

TEST(Tfidf, EmptyCorpusFails) {
  const std::vector<std::string> corpus;
  EXPECT_THROW(fit_tfidf(corpus, only_words({1})), Error);
}

TEST(Tfidf, VectorizeContracts) {
  const std::vector<std::string> corpus{"the cat sat", "the dog ran", "a cat ran"};
  const auto model = fit_tfidf(corpus, presets::default_language());
  const auto oov = vectorize(model, "zzzz");
  // q-grams of "zzzz" never appear in the corpus
  EXPECT_TRUE(oov.entries.empty());
  EXPECT_EQ(oov.dimension, model.dimension());
  for (const auto& doc : corpus) {
    const auto v = vectorize(model, doc);
    v.check();
    EXPECT_NEAR(v.norm(), 1.0, 1e-12);
    EXPECT_EQ(v, vectorize(model, doc));
  }
  const std::vector<std::string> twins{"same text", "same text"};
  const auto twin_model = fit_tfidf(twins, only_words({1}));
  EXPECT_EQ(vectorize(twin_model, twins[0]), vectorize(twin_model, twins[1]));
}

TEST(Tfidf, VocabularyIsSortedAndStable) {
  const auto corpus = texts_of(synth::separable_corpus(3, 10));
  const auto a = fit_tfidf(corpus, presets::spanish());
  const auto b = fit_tfidf(corpus, presets::spanish());
  EXPECT_TRUE(std::is_sorted(a.tfidf().terms().begin(), a.tfidf().terms().end()));
  EXPECT_EQ(a.tfidf().terms(), b.tfidf().terms());
  EXPECT_EQ(a.tfidf().idf(), b.tfidf().idf());
  for (std::size_t i = 0; i < a.tfidf().terms().size(); ++i)
    EXPECT_EQ(*a.tfidf().lookup(a.tfidf().terms()[i]), i);
}

namespace {

SearchGrid tiny_grid() {
  SearchGrid g;
  g.nwords = {1};
  g.skipgrams = {};
  g.qgrams = {2};
  g.toggle_text_options = false;
  return g;
}

}  // namespace

TEST(ParameterSearch, FindsCharacterSignal) {
  const auto corpus = synth::char_presence_corpus(5, 15);
  const Metric metric{MetricKind::macro_f1, {}};
  // Exhaustive evaluation of the three grid points.
  std::map<std::string, double> scores;
  for (auto [nw, qg] : {std::pair<std::set<int>, std::set<int>>{{1}, {}},
                        {{}, {2}},
                        {{1}, {2}}}) {
    TextModelConfig c;
    c.nwords = nw;
    c.qgrams = qg;
    scores[encode(c)] = cross_validated_score(corpus, c, {}, 5, metric, 1);
  }
  TextModelConfig start;
  const auto result = parameter_search(corpus, start, tiny_grid(), 5, metric, 1);
  EXPECT_TRUE(result.config.qgrams.contains(2));
  EXPECT_DOUBLE_EQ(result.score, 1.0);
  double best = 0;
  for (auto& [_, s] : scores) best = std::max(best, s);
  EXPECT_DOUBLE_EQ(result.score, best);
  // words alone cannot see the character
  TextModelConfig words_only;
  EXPECT_LT(scores[encode(words_only)], 1.0);
}

TEST(ParameterSearch, SingleCandidateIsFixedPoint) {
  const auto corpus = synth::separable_corpus(9, 6, {"a", "b"});
  SearchGrid g = tiny_grid();
  g.qgrams = {};
  const Metric metric{MetricKind::macro_f1, {}};
  const auto result = parameter_search(corpus, TextModelConfig{}, g, 3, metric, 2);
  EXPECT_EQ(result.config, TextModelConfig{});
  EXPECT_EQ(result.loops, 1);
}

TEST(ParameterSearch, DeterministicAndTogglesOptions) {
  const auto corpus = synth::char_presence_corpus(8, 8);
  SearchGrid g = tiny_grid();
  g.toggle_text_options = true;
  const Metric metric{MetricKind::macro_f1, {}};
  const auto a = parameter_search(corpus, TextModelConfig{}, g, 4, metric, 3);
  const auto b = parameter_search(corpus, TextModelConfig{}, g, 4, metric, 3);
  EXPECT_EQ(a.config, b.config);
  EXPECT_EQ(a.score, b.score);
  EXPECT_GE(a.loops, 1);
}

TEST(ParameterSearch, SingleClassCorpusFails) {
  Corpus corpus{{"a", "x"}, {"b", "x"}, {"c", "x"}};
  EXPECT_THROW(parameter_search(corpus, TextModelConfig{}, tiny_grid(), 2, Metric{}, 1), Error);
}
