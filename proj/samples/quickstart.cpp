// Stacks a TF-IDF model and a polarity lexicon under EvoDAG, then saves,
// reloads and queries the model.

#include <filesystem>
#include <iostream>

#include "stacksa/stacksa.hpp"

int main() {
  using namespace stacksa;

  const Corpus train{
      {"what a great day", "pos"},        {"love this so much", "pos"},      {"good vibes all around", "pos"},
      {"happy with the result", "pos"},   {"great service, love it", "pos"}, {"such a good movie", "pos"},
      {"what a terrible day", "neg"},     {"hate this so much", "neg"},      {"bad vibes all around", "neg"},
      {"sad about the result", "neg"},    {"awful service, hate it", "neg"}, {"such a bad movie", "neg"},
      {"the bus leaves at nine", "neu"},  {"meeting moved to monday", "neu"}, {"the store opens soon", "neu"},
      {"reading the news today", "neu"},  {"the train is on time", "neu"},   {"lunch is at noon", "neu"},
  };

  Lexicon lexicon;
  lexicon.positive = {"great", "love", "good", "happy"};
  lexicon.negative = {"terrible", "hate", "bad", "sad", "awful"};

  const auto config = presets::english();
  std::vector<FirstStagePtr> members{build_tr_model(texts_of(train), config), build_lexicon_model(lexicon, config)};

  StackerParams params;
  params.k = 3;
  params.evodag.early_stop_window = 500;
  params.evodag.seed = params.svm.seed = 7;
  const auto model = fit_stacked(members, train, params);

  const auto path = std::filesystem::temp_directory_path() / "stacksa_quickstart.stacksa";
  save_stacked_archive(path, model, nlohmann::json::object());
  const auto loaded = load_stacked_archive(path).model;

  for (const char* text : {"love the good weather", "hate the awful noise", "the library opens at ten"})
    std::cout << loaded.predict(text) << "\t" << text << "\n";
}
