#pragma once

#include <filesystem>
#include <fstream>
#include <istream>
#include <string>

#include <nlohmann/json.hpp>

#include "stacksa/common/error.hpp"
#include "stacksa/common/types.hpp"
#include "stacksa/io/files.hpp"

namespace stacksa {

// One {"text": str, "klass": str} object per line; blank lines are skipped.
// With require_label false a missing "klass" yields an empty label.
inline Corpus read_jsonl(std::istream& in, const std::string& source = "<input>", bool require_label = true) {
  Corpus out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    const std::string where = source + " line " + std::to_string(number) + ": ";
    nlohmann::json row;
    try {
      row = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception&) {
      throw Error(where + "malformed JSON");
    }
    if (!row.is_object()) throw Error(where + "expected a JSON object");
    if (!row.contains("text") || !row["text"].is_string()) throw Error(where + "missing string field \"text\"");
    LabeledDocument doc;
    doc.text = row["text"].get<std::string>();
    if (row.contains("klass")) {
      const auto& k = row["klass"];
      if (k.is_string()) {
        doc.label = k.get<std::string>();
      } else if (k.is_number_integer()) {
        doc.label = std::to_string(k.get<long long>());
      } else {
        throw Error(where + "field \"klass\" must be a string");
      }
    } else if (require_label) {
      throw Error(where + "missing field \"klass\"");
    }
    out.push_back(std::move(doc));
  }
  return out;
}

inline Corpus read_jsonl(const std::filesystem::path& path, bool require_label = true) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return read_jsonl(in, path.string(), require_label);
}

inline std::string jsonl_row(const LabeledDocument& doc) {
  return nlohmann::json{{"text", doc.text}, {"klass", doc.label}}.dump() + "\n";
}

inline void write_jsonl(const std::filesystem::path& path, const Corpus& corpus) {
  std::string out;
  for (const auto& doc : corpus) out += jsonl_row(doc);
  write_file_atomic(path, out);
}

}  // namespace stacksa
