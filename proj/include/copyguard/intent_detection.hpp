#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "copyguard/character_kb.hpp"
#include "copyguard/common.hpp"
#include "copyguard/embedding.hpp"
#include "copyguard/prompts.hpp"
#include "copyguard/services.hpp"
#include "copyguard/text.hpp"

namespace copyguard {

inline constexpr double kRetrieverThreshold = 0.7;

enum class DetectMethod { Llm, Retriever, Oracle };

inline std::string to_string(DetectMethod m) {
  switch (m) {
    case DetectMethod::Llm:
      return "llm";
    case DetectMethod::Retriever:
      return "retriever";
    case DetectMethod::Oracle:
      return "oracle";
  }
  return "";
}

// Whether an incoming prompt likely targets a copyrighted character.
// matched_character is absent when not flagged; similarity is only carried by
// retriever verdicts.
struct IntentVerdict {
  bool flagged = false;
  std::optional<std::string> matched_character;
  std::optional<double> similarity;
  DetectMethod method = DetectMethod::Retriever;

  static IntentVerdict oracle(std::string character_id) {
    IntentVerdict v;
    v.flagged = true;
    v.matched_character = std::move(character_id);
    v.method = DetectMethod::Oracle;
    return v;
  }
};

// Embeddings for every stored character description, all under one model tag.
class DescriptionIndex {
 public:
  struct Entry {
    std::string character_id;
    std::size_t description_index;
    EmbeddingVector vec;
  };

  static DescriptionIndex build(const CharacterSet& kb, Embedder& embedder) {
    DescriptionIndex index;
    index.model_tag_ = embedder.model_tag();
    for (const auto& record : kb) {
      for (std::size_t i = 0; i < record.descriptions.size(); ++i) {
        index.entries_.push_back(
            {record.id, i, embedder.embed(record.descriptions[i])});
      }
    }
    return index;
  }

  const std::string& model_tag() const { return model_tag_; }
  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }

 private:
  std::string model_tag_;
  std::vector<Entry> entries_;
};

// LLM-based detector: a temperature-0 yes/no completion, optionally naming
// the character.
inline IntentVerdict detect_llm(const std::string& prompt, ChatService& llm) {
  if (trim(prompt).empty()) throw ValidationError("detect_llm: empty prompt");
  const std::string raw = llm.complete("", intent_detection_prompt(prompt), 0.0);
  std::string answer = trim(raw);
  // Strip leading quotes/bullets the model may add.
  while (!answer.empty() && (answer.front() == '"' || answer.front() == '\'' ||
                             answer.front() == '-' || answer.front() == '*')) {
    answer = trim(answer.substr(1));
  }
  IntentVerdict verdict;
  verdict.method = DetectMethod::Llm;
  const std::string lower = to_lower(answer);
  if (lower.rfind("yes", 0) == 0) {
    verdict.flagged = true;
    std::string rest = trim(answer.substr(3));
    while (!rest.empty() && (rest.front() == ',' || rest.front() == ':' ||
                             rest.front() == '.' || rest.front() == '-')) {
      rest = trim(rest.substr(1));
    }
    // Keep only the first line/sentence as the name.
    const std::size_t cut = rest.find_first_of(".\n");
    if (cut != std::string::npos) rest = trim(rest.substr(0, cut));
    if (!rest.empty()) verdict.matched_character = rest;
    return verdict;
  }
  if (lower.rfind("no", 0) == 0) {
    verdict.flagged = false;
    return verdict;
  }
  throw UnparseableVerdict("intent response fits neither yes nor no: '" + raw + "'");
}

// Retriever-based detector: flags iff the best cosine similarity between the
// prompt embedding and any stored description embedding exceeds the threshold
// (strictly).
inline IntentVerdict detect_retriever(const std::string& prompt,
                                      const DescriptionIndex& db,
                                      Embedder& embedder,
                                      double threshold = kRetrieverThreshold) {
  IntentVerdict verdict;
  verdict.method = DetectMethod::Retriever;
  if (db.empty()) return verdict;  // vacuous max: not flagged
  if (db.model_tag() != embedder.model_tag()) {
    throw EmbedderMismatch("description index built with '" + db.model_tag() +
                           "' but embedder is '" + embedder.model_tag() + "'");
  }
  const EmbeddingVector query = embedder.embed(prompt);
  double best = -2.0;
  const std::string* best_id = nullptr;
  for (const auto& entry : db.entries()) {
    const double sim = cosine(query, entry.vec);
    if (sim > best) {
      best = sim;
      best_id = &entry.character_id;
    }
  }
  verdict.similarity = best;
  if (best > threshold) {
    verdict.flagged = true;
    verdict.matched_character = *best_id;
  }
  return verdict;
}

// Gateway default: flag if either detector flags; the retriever's match wins
// when both name a character.
inline IntentVerdict detect_ensemble(const std::string& prompt,
                                     const DescriptionIndex& db,
                                     Embedder& embedder, ChatService* llm,
                                     double threshold = kRetrieverThreshold) {
  IntentVerdict retriever = detect_retriever(prompt, db, embedder, threshold);
  if (retriever.flagged || llm == nullptr) return retriever;
  return detect_llm(prompt, *llm);
}

// Accuracy/TPR/FPR over binary verdicts. Rates with an empty denominator are
// reported absent, never as 0.
struct DetectorMetrics {
  double accuracy = 0.0;
  std::optional<double> tpr;
  std::optional<double> fpr;
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;
};

inline DetectorMetrics eval_detector(
    const std::vector<std::pair<IntentVerdict, bool>>& verdicts) {
  if (verdicts.empty()) throw ValidationError("eval_detector: empty input");
  DetectorMetrics m;
  for (const auto& [verdict, truth] : verdicts) {
    if (verdict.flagged && truth) ++m.tp;
    else if (verdict.flagged && !truth) ++m.fp;
    else if (!verdict.flagged && truth) ++m.fn;
    else ++m.tn;
  }
  const std::size_t total = m.tp + m.fp + m.tn + m.fn;
  m.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(total);
  if (m.tp + m.fn > 0) {
    m.tpr = static_cast<double>(m.tp) / static_cast<double>(m.tp + m.fn);
  }
  if (m.fp + m.tn > 0) {
    m.fpr = static_cast<double>(m.fp) / static_cast<double>(m.fp + m.tn);
  }
  return m;
}

}  // namespace copyguard
