#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "stacksa/common/error.hpp"
#include "stacksa/models/first_stage.hpp"
#include "stacksa/textproc/normalize.hpp"

namespace stacksa {

// Word vectors stored row-major in one block.
class EmbeddingTable {
 public:
  EmbeddingTable() = default;
  explicit EmbeddingTable(std::size_t width) : width_(width) {
    if (width == 0) throw Error("embedding width must be positive");
  }

  std::size_t width() const { return width_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<std::string>& words() const { return words_; }
  const std::vector<double>& data() const { return data_; }

  // Adds a word; a repeated word keeps its first vector and returns false.
  bool add(std::string word, std::span<const double> vec) {
    if (vec.size() != width_)
      throw Error("vector for '" + word + "' has width " + std::to_string(vec.size()) + ", expected " +
                  std::to_string(width_));
    for (double v : vec)
      if (!std::isfinite(v)) throw Error("non-finite value in vector for '" + word + "'");
    if (index_.contains(word)) return false;
    index_.emplace(word, words_.size());
    words_.push_back(std::move(word));
    data_.insert(data_.end(), vec.begin(), vec.end());
    return true;
  }

  const double* find(const std::string& word) const {
    auto it = index_.find(word);
    return it == index_.end() ? nullptr : data_.data() + it->second * width_;
  }

 private:
  std::size_t width_ = 0;
  std::vector<std::string> words_;
  std::vector<double> data_;
  std::unordered_map<std::string, std::size_t> index_;
};

// Text format: "<count> <width>" header, then one "word v1 ... v_width" line per word.
inline EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open embedding file '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw Error(path + ": missing header");
  std::size_t count = 0, width = 0;
  {
    std::istringstream header(line);
    if (!(header >> count >> width) || width == 0) throw Error(path + ":1: header must be '<count> <width>'");
  }
  EmbeddingTable table(width);
  std::vector<double> vec(width);
  std::size_t rows = 0;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto where = path + ":" + std::to_string(lineno);
    const auto space = line.find(' ');
    if (space == std::string::npos || space == 0) throw Error(where + ": expected 'word v1 ... v" + std::to_string(width) + "'");
    const char* p = line.data() + space;
    const char* end = line.data() + line.size();
    for (std::size_t j = 0; j < width; ++j) {
      while (p < end && *p == ' ') ++p;
      auto [next, ec] = std::from_chars(p, end, vec[j]);
      if (ec != std::errc()) throw Error(where + ": bad or missing value " + std::to_string(j + 1));
      p = next;
    }
    while (p < end && *p == ' ') ++p;
    if (p != end) throw Error(where + ": more than " + std::to_string(width) + " values");
    try {
      table.add(line.substr(0, space), vec);
    } catch (const Error& e) {
      throw Error(where + ": " + e.what());
    }
    ++rows;
  }
  if (rows != count)
    throw Error(path + ": header announces " + std::to_string(count) + " vectors, found " + std::to_string(rows));
  return table;
}

// FT: mean of the vectors of in-vocabulary whitespace tokens; OOV tokens are
// skipped and an all-OOV text maps to the zero vector.
class EmbeddingModel final : public FirstStageModel {
 public:
  explicit EmbeddingModel(std::shared_ptr<const EmbeddingTable> table) : table_(std::move(table)) {
    if (!table_ || table_->width() == 0) throw Error("embedding table not loaded");
  }

  ModelKind kind() const override { return ModelKind::FT; }
  std::size_t output_dim() const override { return table_->width(); }

  Features transform(std::string_view text) const override {
    DenseVector out(table_->width(), 0.0);
    std::size_t hits = 0;
    for (const auto& w : split_whitespace(text)) {
      if (const double* v = table_->find(w)) {
        for (std::size_t j = 0; j < out.size(); ++j) out[j] += v[j];
        ++hits;
      }
    }
    if (hits)
      for (auto& x : out) x /= static_cast<double>(hits);
    return out;
  }

  const EmbeddingTable& table() const { return *table_; }

 private:
  std::shared_ptr<const EmbeddingTable> table_;
};

inline std::shared_ptr<EmbeddingModel> build_embedding_model(EmbeddingTable table) {
  return std::make_shared<EmbeddingModel>(std::make_shared<const EmbeddingTable>(std::move(table)));
}

}  // namespace stacksa
