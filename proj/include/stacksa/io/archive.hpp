#pragma once

#include <charconv>
#include <filesystem>
#include <sstream>
#include <string>
#include <string_view>

#include <zlib.h>

#include <nlohmann/json.hpp>

#include "stacksa/common/error.hpp"
#include "stacksa/io/files.hpp"
#include "stacksa/io/serialize.hpp"
#include "stacksa/stacker/stacker.hpp"

namespace stacksa {

// Container layout:
//   STACKSA <version> <json bytes> <blob bytes> <crc32 hex>\n
//   <metadata JSON, keys sorted><little-endian double blob>
// The checksum covers everything after the header line.
inline constexpr int kArchiveVersion = 1;

inline std::uint32_t crc32_of(std::string_view bytes) {
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size()));
  return static_cast<std::uint32_t>(crc);
}

inline std::string encode_archive(const nlohmann::json& meta, const BlobWriter& blob) {
  const std::string body = meta.dump() + blob.bytes();
  const std::size_t json_len = body.size() - blob.data().size() * 8;
  char crc[16];
  std::snprintf(crc, sizeof crc, "%08x", crc32_of(body));
  return "STACKSA " + std::to_string(kArchiveVersion) + " " + std::to_string(json_len) + " " +
         std::to_string(blob.data().size() * 8) + " " + crc + "\n" + body;
}

struct DecodedArchive {
  nlohmann::json meta;
  BlobReader blob;
};

inline DecodedArchive decode_archive(std::string_view bytes, const std::string& source = "<archive>") {
  const auto eol = bytes.find('\n');
  if (eol == std::string_view::npos || !bytes.starts_with("STACKSA "))
    throw Error(source + ": not a model archive");
  std::istringstream header{std::string(bytes.substr(8, eol - 8))};
  int version = 0;
  std::size_t json_len = 0, blob_len = 0;
  std::string crc_hex;
  if (!(header >> version >> json_len >> blob_len >> crc_hex)) throw Error(source + ": malformed archive header");
  if (version != kArchiveVersion)
    throw Error(source + ": archive format version " + std::to_string(version) + " is not supported (expected " +
                std::to_string(kArchiveVersion) + ")");
  const auto body = bytes.substr(eol + 1);
  if (body.size() != json_len + blob_len) throw Error(source + ": archive is truncated or has trailing data");
  std::uint32_t expected = 0;
  auto [p, ec] = std::from_chars(crc_hex.data(), crc_hex.data() + crc_hex.size(), expected, 16);
  if (ec != std::errc() || p != crc_hex.data() + crc_hex.size()) throw Error(source + ": malformed archive checksum");
  if (crc32_of(body) != expected) throw Error(source + ": archive checksum mismatch");
  DecodedArchive out;
  try {
    out.meta = nlohmann::json::parse(body.substr(0, json_len));
  } catch (const nlohmann::json::exception&) {
    throw Error(source + ": archive metadata is not valid JSON");
  }
  out.blob = BlobReader(body.substr(json_len));
  return out;
}

inline DecodedArchive read_archive(const std::filesystem::path& path, std::string_view expected_type) {
  auto a = decode_archive(read_file(path), path.string());
  if (!a.meta.contains("type") || a.meta["type"] != expected_type)
    throw Error(path.string() + ": archive does not hold a " + std::string(expected_type));
  return a;
}

// A single first-stage model, e.g. a prebuilt emoji space.
inline std::string encode_member_archive(const FirstStageModel& m) {
  BlobWriter blob;
  nlohmann::json meta{{"type", "member"}, {"member", save_member(m, blob)}};
  return encode_archive(meta, blob);
}

inline void save_member_archive(const std::filesystem::path& path, const FirstStageModel& m) {
  write_file_atomic(path, encode_member_archive(m));
}

inline FirstStagePtr load_member_archive(const std::filesystem::path& path) {
  const auto a = read_archive(path, "member");
  try {
    return load_member(a.meta.at("member"), a.blob);
  } catch (const nlohmann::json::exception& e) {
    throw Error(path.string() + ": damaged archive: " + e.what());
  }
}

struct StackedArchive {
  StackedModel model;
  nlohmann::json spec;  // the pipeline spec the model was trained with
  nlohmann::json summary;
};

inline std::string encode_stacked_archive(const StackedModel& m, const nlohmann::json& spec,
                                          const nlohmann::json& summary = nlohmann::json::object()) {
  BlobWriter blob;
  nlohmann::json members = nlohmann::json::array();
  for (const auto& member : m.members())
    members.push_back({{"model", save_member(*member.model, blob)}, {"outer", save_linear(member.outer, blob)}});
  nlohmann::json meta{{"type", "stacked"},
                      {"spec", spec},
                      {"summary", summary},
                      {"k", m.k()},
                      {"classes", m.classes()},
                      {"width", m.width()},
                      {"members", std::move(members)},
                      {"evodag", save_evodag(m.second_stage(), blob)}};
  return encode_archive(meta, blob);
}

inline void save_stacked_archive(const std::filesystem::path& path, const StackedModel& m, const nlohmann::json& spec,
                                 const nlohmann::json& summary = nlohmann::json::object()) {
  write_file_atomic(path, encode_stacked_archive(m, spec, summary));
}

inline StackedArchive decode_stacked_archive(const DecodedArchive& a, const std::string& source) {
  try {
    std::vector<StackedMember> members;
    for (const auto& j : a.meta.at("members"))
      members.push_back({load_member(j.at("model"), a.blob), load_linear(j.at("outer"), a.blob)});
    StackedModel model(std::move(members), load_evodag(a.meta.at("evodag"), a.blob), a.meta.at("k").get<int>());
    if (model.width() != a.meta.at("width").get<std::size_t>()) throw Error("width metadata disagrees with members");
    return {std::move(model), a.meta.at("spec"), a.meta.value("summary", nlohmann::json::object())};
  } catch (const nlohmann::json::exception& e) {
    throw Error(source + ": damaged archive: " + e.what());
  } catch (const Error& e) {
    throw Error(source + ": damaged archive: " + e.what());
  }
}

inline StackedArchive load_stacked_archive(const std::filesystem::path& path) {
  return decode_stacked_archive(read_archive(path, "stacked"), path.string());
}

}  // namespace stacksa
