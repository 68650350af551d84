#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "copyguard/common.hpp"
#include "copyguard/prompts.hpp"
#include "copyguard/services.hpp"
#include "copyguard/text.hpp"

namespace copyguard {

// One copyrighted character under study: canonical name, key characteristic,
// candidate anchors, and name-free ~60-word descriptions.
struct CharacterRecord {
  std::string id;
  std::string name;
  std::string studio;
  std::string key_characteristic;
  std::vector<std::string> descriptions;
  std::vector<std::string> keyword_candidates;

  void validate() const {
    if (id.empty()) throw ValidationError("record has empty id");
    if (trim(name).empty()) {
      throw ValidationError("record '" + id + "': name is empty");
    }
    if (trim(key_characteristic).empty()) {
      throw ValidationError("record '" + id + "': key_characteristic is empty");
    }
    for (std::size_t i = 0; i < descriptions.size(); ++i) {
      if (contains_ci(descriptions[i], name)) {
        throw ValidationError("record '" + id + "': description " +
                              std::to_string(i) +
                              " contains the character name");
      }
    }
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["id"] = id;
    j["name"] = name;
    j["studio"] = studio;
    j["key_characteristic"] = key_characteristic;
    j["descriptions"] = descriptions;
    j["keyword_candidates"] = keyword_candidates;
    return j;
  }

  static CharacterRecord from_json(const nlohmann::json& j) {
    CharacterRecord r;
    r.id = j.at("id").get<std::string>();
    r.name = j.at("name").get<std::string>();
    r.studio = j.value("studio", std::string());
    r.key_characteristic = j.at("key_characteristic").get<std::string>();
    r.descriptions = j.value("descriptions", std::vector<std::string>());
    r.keyword_candidates =
        j.value("keyword_candidates", std::vector<std::string>());
    return r;
  }
};

// Ordered character list; iteration order defines the aggregation order of
// the evaluation set.
class CharacterSet {
 public:
  void add(CharacterRecord record) {
    record.validate();
    if (by_id_.count(record.id)) {
      throw ValidationError("duplicate character id '" + record.id + "'");
    }
    const std::string name_key = to_lower(record.name);
    if (by_name_.count(name_key)) {
      throw ValidationError("duplicate character name '" + record.name + "'");
    }
    by_id_[record.id] = records_.size();
    by_name_[name_key] = records_.size();
    records_.push_back(std::move(record));
  }

  std::size_t size() const { return records_.size(); }
  bool empty() const { return records_.empty(); }
  const std::vector<CharacterRecord>& records() const { return records_; }
  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

  const CharacterRecord* find_by_id(std::string_view id) const {
    auto it = by_id_.find(std::string(id));
    return it == by_id_.end() ? nullptr : &records_[it->second];
  }

  const CharacterRecord* find_by_name(std::string_view name) const {
    auto it = by_name_.find(to_lower(name));
    return it == by_name_.end() ? nullptr : &records_[it->second];
  }

  const CharacterRecord& at(std::string_view id) const {
    const CharacterRecord* r = find_by_id(id);
    if (!r) throw MissingCharacter("unknown character id '" + std::string(id) + "'");
    return *r;
  }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    out.reserve(records_.size());
    for (const auto& r : records_) out.push_back(r.name);
    return out;
  }

  // FNV checksum of the canonical serialization; used in config fingerprints.
  std::uint64_t checksum() const { return fnv1a64(serialize()); }

  std::string serialize() const {
    std::ostringstream out;
    for (const auto& r : records_) out << r.to_json().dump() << '\n';
    return out.str();
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open KB file for write: " + path);
    out << serialize();
  }

  static CharacterSet parse(std::istream& in) {
    CharacterSet set;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("KB line " + std::to_string(line_no) + ": " + e.what());
      }
      try {
        set.add(CharacterRecord::from_json(j));
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("KB line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    return set;
  }

  static CharacterSet load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open KB file: " + path);
    return parse(in);
  }

 private:
  std::vector<CharacterRecord> records_;
  std::map<std::string, std::size_t> by_id_;
  std::map<std::string, std::size_t> by_name_;  // lowercased name
};

inline CharacterSet load_kb(const std::string& path) {
  return CharacterSet::load(path);
}

enum class CandidateKind { Keyword, Description };

// Asks the chat service for candidate anchors and cleans the response:
// comma-split for keywords, whole responses for descriptions, trimmed and
// case-insensitively deduplicated. Keywords equal to the full name are
// dropped; descriptions mentioning the name at all are dropped.
inline std::vector<std::string> generate_candidates(
    const CharacterRecord& character, std::size_t n, CandidateKind kind,
    ChatService& llm, double temperature = 0.0) {
  if (n == 0) return {};
  std::vector<std::string> raw;
  if (kind == CandidateKind::Keyword) {
    const std::string response =
        llm.complete("", keyword_candidate_prompt(character.name, n), temperature);
    raw = split_csv(response);
  } else {
    // One call per description; each response is a single candidate.
    for (std::size_t i = 0; i < n; ++i) {
      const std::string response = trim(
          llm.complete("", description_candidate_prompt(character.name), temperature));
      if (!response.empty()) raw.push_back(response);
    }
  }
  std::vector<std::string> cleaned;
  for (auto& candidate : raw) {
    std::string c = trim(candidate);
    if (c.empty()) continue;
    if (kind == CandidateKind::Keyword && iequals(c, character.name)) continue;
    if (kind == CandidateKind::Description && contains_ci(c, character.name)) {
      continue;
    }
    cleaned.push_back(std::move(c));
  }
  cleaned = dedup_ci(cleaned);
  if (cleaned.size() > n) cleaned.resize(n);
  if (cleaned.empty()) {
    throw EmptyResponse("model returned no usable candidates for '" +
                        character.name + "'");
  }
  return cleaned;
}

}  // namespace copyguard
