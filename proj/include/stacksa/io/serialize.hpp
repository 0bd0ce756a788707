#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "stacksa/common/error.hpp"
#include "stacksa/evodag/model.hpp"
#include "stacksa/linmodel/linear_ovr.hpp"
#include "stacksa/models/embedding.hpp"
#include "stacksa/models/lexicon.hpp"
#include "stacksa/models/text_models.hpp"
#include "stacksa/textproc/config.hpp"
#include "stacksa/textproc/tfidf.hpp"

namespace stacksa {

using nlohmann::json;

// Real-valued blocks live in a side buffer of doubles; the JSON metadata
// refers to them as {"offset": o, "count": n}.
class BlobWriter {
 public:
  json put(std::span<const double> values) {
    json ref{{"offset", data_.size()}, {"count", values.size()}};
    data_.insert(data_.end(), values.begin(), values.end());
    return ref;
  }

  const std::vector<double>& data() const { return data_; }

  // Little-endian IEEE-754 bytes, independent of the host byte order.
  std::string bytes() const {
    std::string out(data_.size() * 8, '\0');
    for (std::size_t i = 0; i < data_.size(); ++i) {
      const auto bits = std::bit_cast<std::uint64_t>(data_[i]);
      for (int b = 0; b < 8; ++b) out[i * 8 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
    }
    return out;
  }

 private:
  std::vector<double> data_;
};

class BlobReader {
 public:
  BlobReader() = default;
  explicit BlobReader(std::string_view bytes) {
    if (bytes.size() % 8) throw Error("archive data block is not a whole number of doubles");
    data_.resize(bytes.size() / 8);
    for (std::size_t i = 0; i < data_.size(); ++i) {
      std::uint64_t bits = 0;
      for (int b = 0; b < 8; ++b)
        bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(bytes[i * 8 + b])) << (8 * b);
      data_[i] = std::bit_cast<double>(bits);
    }
  }

  std::vector<double> get(const json& ref) const {
    const auto offset = ref.at("offset").get<std::size_t>();
    const auto count = ref.at("count").get<std::size_t>();
    if (offset > data_.size() || count > data_.size() - offset) throw Error("archive data reference out of range");
    return {data_.begin() + static_cast<long>(offset), data_.begin() + static_cast<long>(offset + count)};
  }

 private:
  std::vector<double> data_;
};

inline json save_text_resources(const TextResources& r) {
  if (r.stemmer) throw Error("a text model with a stemmer hook cannot be archived");
  return json{{"emoticons", r.emoticons},
              {"stopwords", r.stopwords},
              {"entities", r.entities},
              {"negators", r.negators}};
}

inline TextResources load_text_resources(const json& j) {
  TextResources r;
  j.at("emoticons").get_to(r.emoticons);
  j.at("stopwords").get_to(r.stopwords);
  j.at("entities").get_to(r.entities);
  j.at("negators").get_to(r.negators);
  return r;
}

inline json save_normalizer(const Normalizer& n) {
  return json{{"config", n.config()}, {"resources", save_text_resources(n.resources())}};
}

inline Normalizer load_normalizer(const json& j) {
  TextModelConfig config;
  from_json(j.at("config"), config);
  config.validate();
  return Normalizer(config, load_text_resources(j.at("resources")));
}

// Only document frequencies are stored; idf is recomputed with the same
// arithmetic, so reloaded vectors are bit-identical.
inline json save_text_model(const TextModel& m) {
  const auto& t = m.tfidf();
  return json{{"normalizer", save_normalizer(m.normalizer())},
              {"terms", t.terms()},
              {"df", t.document_frequency()},
              {"num_docs", t.num_docs()}};
}

inline TextModel load_text_model(const json& j) {
  auto tfidf = TfidfModel::from_parts(j.at("terms").get<std::vector<std::string>>(),
                                      j.at("df").get<std::vector<std::size_t>>(), j.at("num_docs").get<std::size_t>());
  return TextModel::from_parts(load_normalizer(j.at("normalizer")), std::move(tfidf));
}

inline json save_linear(const LinearOvrModel& m, BlobWriter& blob) {
  std::vector<double> flat;
  flat.reserve(m.num_classes() * m.feature_dim());
  for (const auto& w : m.weights()) flat.insert(flat.end(), w.begin(), w.end());
  return json{{"classes", m.classes()},
              {"feature_dim", m.feature_dim()},
              {"weights", blob.put(flat)},
              {"bias", blob.put(m.bias())}};
}

inline LinearOvrModel load_linear(const json& j, const BlobReader& blob) {
  auto classes = j.at("classes").get<std::vector<Label>>();
  const auto dim = j.at("feature_dim").get<std::size_t>();
  const auto flat = blob.get(j.at("weights"));
  auto bias = blob.get(j.at("bias"));
  if (flat.size() != classes.size() * dim) throw Error("archived weight block has the wrong size");
  std::vector<std::vector<double>> weights;
  for (std::size_t k = 0; k < classes.size(); ++k)
    weights.emplace_back(flat.begin() + static_cast<long>(k * dim), flat.begin() + static_cast<long>((k + 1) * dim));
  return LinearOvrModel(std::move(classes), std::move(weights), std::move(bias), dim);
}

inline json save_member(const FirstStageModel& m, BlobWriter& blob) {
  json j{{"kind", to_string(m.kind())}};
  if (const auto* tr = dynamic_cast<const TfidfSpaceModel*>(&m)) {
    j["text_model"] = save_text_model(tr->text_model());
  } else if (const auto* ds = dynamic_cast<const DecisionSpaceModel*>(&m)) {
    j["text_model"] = save_text_model(ds->text_model());
    j["classifier"] = save_linear(ds->classifier(), blob);
  } else if (const auto* lex = dynamic_cast<const LexiconModel*>(&m)) {
    j["normalizer"] = save_normalizer(lex->normalizer());
    j["positive"] = lex->normalized_lexicon().positive;
    j["negative"] = lex->normalized_lexicon().negative;
  } else if (const auto* emb = dynamic_cast<const EmbeddingModel*>(&m)) {
    j["width"] = emb->table().width();
    j["words"] = emb->table().words();
    j["vectors"] = blob.put(emb->table().data());
  } else {
    throw Error("cannot archive a custom " + to_string(m.kind()) + " model");
  }
  return j;
}

inline FirstStagePtr load_member(const json& j, const BlobReader& blob) {
  const auto kind = parse_kind(j.at("kind").get<std::string>());
  switch (kind) {
    case ModelKind::TR:
      return std::make_shared<TfidfSpaceModel>(load_text_model(j.at("text_model")));
    case ModelKind::HA:
    case ModelKind::Emo:
      return std::make_shared<DecisionSpaceModel>(kind, load_text_model(j.at("text_model")),
                                                  load_linear(j.at("classifier"), blob));
    case ModelKind::TH: {
      Lexicon lex;
      j.at("positive").get_to(lex.positive);
      j.at("negative").get_to(lex.negative);
      return std::make_shared<LexiconModel>(LexiconModel::from_normalized(load_normalizer(j.at("normalizer")), lex));
    }
    case ModelKind::FT: {
      const auto width = j.at("width").get<std::size_t>();
      const auto words = j.at("words").get<std::vector<std::string>>();
      const auto data = blob.get(j.at("vectors"));
      if (data.size() != words.size() * width) throw Error("archived embedding block has the wrong size");
      auto table = std::make_shared<EmbeddingTable>(width);
      for (std::size_t i = 0; i < words.size(); ++i)
        if (!table->add(words[i], std::span<const double>(data).subspan(i * width, width)))
          throw Error("duplicate word '" + words[i] + "' in archived embedding table");
      return std::make_shared<EmbeddingModel>(std::move(table));
    }
  }
  throw Error("unknown model kind");
}

inline json save_evodag(const evodag::EvoDagModel& m, BlobWriter& blob) {
  json nodes = json::array();
  for (const auto& n : m.nodes()) {
    json node{{"func", evodag::name_of(n.func)}, {"args", n.args}, {"theta", blob.put(n.theta)}};
    if (n.func == evodag::Func::Input) node["input"] = n.input;
    nodes.push_back(std::move(node));
  }
  return json{{"classes", m.classes()}, {"input_dim", m.input_dim()}, {"nodes", std::move(nodes)}};
}

inline evodag::EvoDagModel load_evodag(const json& j, const BlobReader& blob) {
  std::vector<evodag::DagNode> nodes;
  for (const auto& node : j.at("nodes")) {
    evodag::DagNode n;
    n.id = nodes.size();
    n.func = evodag::func_from_name(node.at("func").get<std::string>());
    node.at("args").get_to(n.args);
    if (n.func == evodag::Func::Input) n.input = node.at("input").get<std::size_t>();
    n.theta = blob.get(node.at("theta"));
    nodes.push_back(std::move(n));
  }
  return evodag::EvoDagModel(j.at("classes").get<std::vector<Label>>(), j.at("input_dim").get<std::size_t>(),
                             std::move(nodes));
}

}  // namespace stacksa
