#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "copyguard/anchor_ranking.hpp"
#include "copyguard/character_kb.hpp"
#include "copyguard/common.hpp"
#include "copyguard/intent_detection.hpp"
#include "copyguard/prompts.hpp"
#include "copyguard/services.hpp"
#include "copyguard/text.hpp"

namespace copyguard {

inline constexpr std::string_view kGenericNegativeBase = "Copyrighted character";

enum class NegativeBase { None, Generic, TargetName };

inline std::string to_string(NegativeBase base) {
  switch (base) {
    case NegativeBase::None:
      return "none";
    case NegativeBase::Generic:
      return "generic";
    case NegativeBase::TargetName:
      return "target_name";
  }
  return "";
}

inline NegativeBase negative_base_from_string(std::string_view s) {
  const std::string v = to_lower(trim(s));
  if (v == "none" || v.empty()) return NegativeBase::None;
  if (v == "generic") return NegativeBase::Generic;
  if (v == "target_name") return NegativeBase::TargetName;
  throw ParseError("unknown negative_base '" + std::string(s) + "'");
}

struct KeywordSelector {
  RankMethod method;
  std::size_t k = 5;
};

// Which interventions to apply per request: prompt rewriting, a negative
// prompt base term, and ranked keyword selections. Base and keywords are
// independently optional.
struct MitigationPolicy {
  bool rewrite = false;
  NegativeBase negative_base = NegativeBase::None;
  std::vector<KeywordSelector> negative_keywords;
  std::size_t max_rewrite_retries = 2;

  bool is_empty() const {
    return !rewrite && negative_base == NegativeBase::None &&
           negative_keywords.empty();
  }

  // Target-dependent parts need an identified character.
  bool requires_matched_character() const {
    return negative_base == NegativeBase::TargetName || !negative_keywords.empty();
  }

  // Row label in the results-table layout.
  std::string negative_label() const {
    std::vector<std::string> parts;
    if (negative_base == NegativeBase::Generic) {
      parts.push_back(std::string(kGenericNegativeBase));
    } else if (negative_base == NegativeBase::TargetName) {
      parts.push_back("Target's name");
    }
    for (const auto& sel : negative_keywords) {
      parts.push_back("+ " + std::to_string(sel.k) + " " + sel.method.to_string());
    }
    if (parts.empty()) return "None";
    return join(parts, " ");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["rewrite"] = rewrite;
    j["negative_base"] = copyguard::to_string(negative_base);
    nlohmann::ordered_json selectors = nlohmann::ordered_json::array();
    for (const auto& sel : negative_keywords) {
      selectors.push_back({{"method", sel.method.to_string()}, {"k", sel.k}});
    }
    j["negative_keywords"] = selectors;
    j["max_rewrite_retries"] = max_rewrite_retries;
    return j;
  }

  static MitigationPolicy from_json(const nlohmann::json& j) {
    MitigationPolicy p;
    p.rewrite = j.value("rewrite", false);
    p.negative_base = negative_base_from_string(j.value("negative_base", "none"));
    if (j.contains("negative_keywords")) {
      for (const auto& sel : j.at("negative_keywords")) {
        p.negative_keywords.push_back(
            {RankMethod::parse(sel.at("method").get<std::string>()),
             sel.at("k").get<std::size_t>()});
      }
    }
    p.max_rewrite_retries = j.value("max_rewrite_retries", std::size_t{2});
    return p;
  }

  static MitigationPolicy load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open policy file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("policy file " + path + ": " + e.what());
    }
    return from_json(j);
  }
};

struct RewriteResult {
  std::string text;
  std::vector<std::string> attempts;
  bool leaked = false;    // a blocked name survived every retry
  bool stripped = false;  // surviving names were removed textually
};

// Rewrites a prompt under the rewriting system prompt. If a blocked name
// survives (case-insensitive substring), retries up to max_retries, then
// strips surviving names and flags the transcript.
inline RewriteResult rewrite_prompt(const std::string& prompt,
                                    ChatService& rewriter,
                                    const std::vector<std::string>& blocked_names,
                                    std::size_t max_retries) {
  if (trim(prompt).empty()) throw ValidationError("rewrite_prompt: empty prompt");
  auto leaked_name = [&](const std::string& text) -> const std::string* {
    for (const auto& name : blocked_names) {
      if (contains_ci(text, name)) return &name;
    }
    return nullptr;
  };

  RewriteResult result;
  std::string rewritten;
  for (std::size_t attempt = 0; attempt <= max_retries; ++attempt) {
    rewritten = trim(
        rewriter.complete(std::string(kRewriteSystemPrompt), prompt, 0.0));
    result.attempts.push_back(rewritten);
    if (!leaked_name(rewritten)) {
      result.text = rewritten;
      return result;
    }
  }

  // All retries leaked: strip the surviving names.
  result.leaked = true;
  std::string stripped = rewritten;
  while (const std::string* name = leaked_name(stripped)) {
    stripped = erase_ci(stripped, *name);
  }
  stripped = trim(stripped);
  if (stripped.empty()) {
    throw RewriteFailure("every rewrite leaked a blocked name and stripping "
                         "emptied the prompt");
  }
  result.stripped = true;
  result.text = stripped;
  return result;
}

// Comma-joined negative prompt: base term first (target name, the generic
// base, or nothing), then keyword selections in declared selector order,
// deduplicated.
inline std::string build_negative_prompt(
    const MitigationPolicy& policy, const CharacterRecord& character,
    const std::map<RankMethod, RankedAnchorSet>& ranked) {
  std::vector<std::string> parts;
  if (policy.negative_base == NegativeBase::Generic) {
    parts.push_back(std::string(kGenericNegativeBase));
  } else if (policy.negative_base == NegativeBase::TargetName) {
    parts.push_back(character.name);
  }
  for (const auto& selector : policy.negative_keywords) {
    auto it = ranked.find(selector.method);
    if (it == ranked.end()) {
      throw MissingRanking("no ranking for method '" +
                           selector.method.to_string() + "' (character '" +
                           character.id + "')");
    }
    parts = combine_sets(parts, select_top_k(it->second, selector.k));
  }
  return join(parts, ", ");
}

// Everything recorded about how a request was transformed.
struct Provenance {
  std::string original_prompt;
  nlohmann::ordered_json policy;
  std::vector<std::string> rewrite_attempts;
  bool rewrite_leaked = false;
  bool rewrite_stripped = false;
  // Count of top-5 co-occurrence keywords surviving in the rewritten prompt.
  std::optional<std::size_t> anchor_leak_count;

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["original_prompt"] = original_prompt;
    j["policy"] = policy;
    j["rewrite_attempts"] = rewrite_attempts;
    j["rewrite_leaked"] = rewrite_leaked;
    j["rewrite_stripped"] = rewrite_stripped;
    if (anchor_leak_count) j["anchor_leak_count"] = *anchor_leak_count;
    return j;
  }
};

struct MitigatedRequest {
  std::string final_prompt;
  std::string negative_prompt;
  Provenance provenance;
};

// Dependencies handed to apply_policy: the rewriting service, the KB (for
// blocked names), and per-character rankings.
struct MitigationDeps {
  ChatService* rewriter = nullptr;
  const CharacterSet* kb = nullptr;
  std::function<const std::map<RankMethod, RankedAnchorSet>*(const std::string&)>
      rankings_for;
};

// Applies a policy to one request. The intent verdict supplies the matched
// character for target-dependent parts (the oracle assumption).
inline MitigatedRequest apply_policy(const std::string& prompt,
                                     const IntentVerdict& intent,
                                     const MitigationPolicy& policy,
                                     const MitigationDeps& deps) {
  MitigatedRequest out;
  out.provenance.original_prompt = prompt;
  out.provenance.policy = policy.to_json();
  out.final_prompt = prompt;

  const CharacterRecord* matched = nullptr;
  if (policy.requires_matched_character()) {
    if (!intent.matched_character) {
      throw OracleMissing("policy needs a matched character but the intent "
                          "verdict has none");
    }
    if (!deps.kb) throw ConfigError("apply_policy: no character KB wired");
    matched = deps.kb->find_by_id(*intent.matched_character);
    if (!matched) matched = deps.kb->find_by_name(*intent.matched_character);
    if (!matched) {
      throw MissingCharacter("matched character '" + *intent.matched_character +
                             "' not in KB");
    }
  }

  const std::map<RankMethod, RankedAnchorSet>* rankings = nullptr;
  if (matched && deps.rankings_for) rankings = deps.rankings_for(matched->id);

  if (policy.rewrite) {
    if (!deps.rewriter) throw ConfigError("apply_policy: no rewriter wired");
    std::vector<std::string> blocked =
        deps.kb ? deps.kb->names() : std::vector<std::string>{};
    RewriteResult rewrite = rewrite_prompt(prompt, *deps.rewriter, blocked,
                                           policy.max_rewrite_retries);
    out.final_prompt = rewrite.text;
    out.provenance.rewrite_attempts = rewrite.attempts;
    out.provenance.rewrite_leaked = rewrite.leaked;
    out.provenance.rewrite_stripped = rewrite.stripped;
    // Leak score: how many of the character's top-5 co-occurrence keywords
    // survive in the rewritten prompt.
    if (rankings) {
      for (const auto& [method, set] : *rankings) {
        if (method.kind != RankMethodKind::CoOccurrence) continue;
        std::size_t leaks = 0;
        for (const auto& keyword : select_top_k(set, 5)) {
          if (contains_phrase(out.final_prompt, keyword)) ++leaks;
        }
        out.provenance.anchor_leak_count = leaks;
        break;
      }
    }
  }

  if (policy.negative_base != NegativeBase::None ||
      !policy.negative_keywords.empty()) {
    if (!policy.negative_keywords.empty() && !rankings) {
      throw MissingRanking("policy selects ranked keywords but no rankings "
                           "are wired for the matched character");
    }
    static const std::map<RankMethod, RankedAnchorSet> kNoRankings;
    if (policy.negative_base == NegativeBase::Generic && !matched) {
      // Generic base is character-independent.
      out.negative_prompt = std::string(kGenericNegativeBase);
    } else {
      out.negative_prompt = build_negative_prompt(
          policy, *matched, rankings ? *rankings : kNoRankings);
    }
  }

  return out;
}

}  // namespace copyguard
