#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "copyguard/character_kb.hpp"
#include "copyguard/common.hpp"
#include "copyguard/corpus_index.hpp"
#include "copyguard/embedding.hpp"
#include "copyguard/prompts.hpp"
#include "copyguard/services.hpp"
#include "copyguard/text.hpp"

namespace copyguard {

enum class RankMethodKind { EmbeddingSim, CoOccurrence, LmRanked };

// Ranking method identity. Co-occurrence carries the corpus tag it was
// counted over (e.g. "laion").
struct RankMethod {
  RankMethodKind kind = RankMethodKind::EmbeddingSim;
  std::string corpus_tag;

  static RankMethod embedding_sim() { return {RankMethodKind::EmbeddingSim, ""}; }
  static RankMethod cooccurrence(std::string tag) {
    return {RankMethodKind::CoOccurrence, std::move(tag)};
  }
  static RankMethod lm_ranked() { return {RankMethodKind::LmRanked, ""}; }

  // Grammar: "embeddingsim" | "cooc:<corpus>" | "lm".
  static RankMethod parse(std::string_view text) {
    const std::string s = to_lower(trim(text));
    if (s == "embeddingsim") return embedding_sim();
    if (s == "lm") return lm_ranked();
    if (s.rfind("cooc:", 0) == 0 && s.size() > 5) {
      return cooccurrence(s.substr(5));
    }
    throw ParseError("unknown ranking method '" + std::string(text) +
                     "' (expected embeddingsim, cooc:<corpus>, or lm)");
  }

  std::string to_string() const {
    switch (kind) {
      case RankMethodKind::EmbeddingSim:
        return "embeddingsim";
      case RankMethodKind::CoOccurrence:
        return "cooc:" + corpus_tag;
      case RankMethodKind::LmRanked:
        return "lm";
    }
    return "";
  }

  friend bool operator==(const RankMethod& a, const RankMethod& b) {
    return a.kind == b.kind && a.corpus_tag == b.corpus_tag;
  }
  friend bool operator<(const RankMethod& a, const RankMethod& b) {
    if (a.kind != b.kind) return a.kind < b.kind;
    return a.corpus_tag < b.corpus_tag;
  }
};

struct RankedEntry {
  std::string candidate;
  double score = 0.0;

  friend bool operator==(const RankedEntry& a, const RankedEntry& b) {
    return a.candidate == b.candidate && a.score == b.score;
  }
};

// Candidates ordered by score descending; ties break by candidate ascending,
// case-insensitively.
struct RankedAnchorSet {
  std::string character_id;
  RankMethod method;
  std::vector<RankedEntry> entries;

  std::vector<std::string> candidates() const {
    std::vector<std::string> out;
    out.reserve(entries.size());
    for (const auto& e : entries) out.push_back(e.candidate);
    return out;
  }

  void sort_entries() {
    std::sort(entries.begin(), entries.end(),
              [](const RankedEntry& a, const RankedEntry& b) {
                if (a.score != b.score) return a.score > b.score;
                return ci_less(a.candidate, b.candidate);
              });
  }

  friend bool operator==(const RankedAnchorSet& a, const RankedAnchorSet& b) {
    return a.character_id == b.character_id && a.method == b.method &&
           a.entries == b.entries;
  }

  // JSONL persistence: one {character_id, method, candidate, score, rank}
  // object per entry, rank starting at 1.
  std::string to_jsonl() const {
    std::string out;
    for (std::size_t i = 0; i < entries.size(); ++i) {
      nlohmann::ordered_json j;
      j["character_id"] = character_id;
      j["method"] = method.to_string();
      j["candidate"] = entries[i].candidate;
      j["score"] = entries[i].score;
      j["rank"] = i + 1;
      out += j.dump();
      out.push_back('\n');
    }
    return out;
  }

  static RankedAnchorSet from_jsonl(std::istream& in) {
    RankedAnchorSet set;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
      if (trim(line).empty()) continue;
      const auto j = nlohmann::json::parse(line);
      if (first) {
        set.character_id = j.at("character_id").get<std::string>();
        set.method = RankMethod::parse(j.at("method").get<std::string>());
        first = false;
      }
      set.entries.push_back(
          {j.at("candidate").get<std::string>(), j.at("score").get<double>()});
    }
    return set;
  }

  void save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open ranked set for write: " + path);
    out << to_jsonl();
  }
};

// Scores each candidate by cosine similarity between the encoder embeddings
// of the character name and the candidate. Applicable to keywords and
// descriptions alike.
inline RankedAnchorSet rank_by_embedding(const CharacterRecord& character,
                                         const std::vector<std::string>& candidates,
                                         Embedder& embedder) {
  if (candidates.empty()) {
    throw ValidationError("rank_by_embedding requires candidates");
  }
  RankedAnchorSet set;
  set.character_id = character.id;
  set.method = RankMethod::embedding_sim();
  const EmbeddingVector name_vec = embedder.embed(character.name);
  for (const auto& candidate : dedup_ci(candidates)) {
    set.entries.push_back({candidate, cosine(name_vec, embedder.embed(candidate))});
  }
  set.sort_entries();
  return set;
}

// Scores each candidate by the number of corpus documents where it co-occurs
// with the character name.
inline RankedAnchorSet rank_by_cooccurrence(const CharacterRecord& character,
                                            const std::vector<std::string>& candidates,
                                            const CorpusIndex& index,
                                            const std::string& corpus_tag) {
  RankedAnchorSet set;
  set.character_id = character.id;
  set.method = RankMethod::cooccurrence(corpus_tag);
  for (const auto& candidate : dedup_ci(candidates)) {
    set.entries.push_back(
        {candidate, static_cast<double>(
                        index.count_cooccurrence(character.name, candidate))});
  }
  set.sort_entries();
  return set;
}

struct LmRankResult {
  RankedAnchorSet set;
  std::size_t requested = 0;
  std::size_t parsed = 0;
  bool short_response = false;
};

// Baseline: the LM's own top-k keywords from a greedy (temperature 0)
// completion. The model may return words not present in any candidate list.
// Scores are rank-derived: k - position.
inline LmRankResult lm_rank(const CharacterRecord& character, std::size_t k,
                            ChatService& llm) {
  LmRankResult result;
  result.set.character_id = character.id;
  result.set.method = RankMethod::lm_ranked();
  result.requested = k;
  if (k == 0) return result;

  const std::string response =
      llm.complete("", keyword_candidate_prompt(character.name, k), 0.0);
  std::vector<std::string> keywords = dedup_ci(split_csv(response));
  if (keywords.size() > k) keywords.resize(k);
  for (std::size_t i = 0; i < keywords.size(); ++i) {
    result.set.entries.push_back(
        {keywords[i], static_cast<double>(k - i)});
  }
  result.parsed = keywords.size();
  result.short_response = result.parsed < k;
  return result;
}

// First min(k, size) candidates in ranked order.
inline std::vector<std::string> select_top_k(const RankedAnchorSet& set,
                                             std::size_t k) {
  std::vector<std::string> out;
  const std::size_t n = std::min(k, set.entries.size());
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(set.entries[i].candidate);
  return out;
}

// Concatenation of a then b, case-insensitively deduplicated, order
// preserved.
inline std::vector<std::string> combine_sets(const std::vector<std::string>& a,
                                             const std::vector<std::string>& b) {
  std::vector<std::string> merged = a;
  merged.insert(merged.end(), b.begin(), b.end());
  return dedup_ci(merged);
}

}  // namespace copyguard
