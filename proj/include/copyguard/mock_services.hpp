#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "copyguard/character_kb.hpp"
#include "copyguard/common.hpp"
#include "copyguard/prompts.hpp"
#include "copyguard/services.hpp"
#include "copyguard/text.hpp"

namespace copyguard {

// Deterministic judge over mock media: reads the detected character straight
// from the mock metadata and answers in the judge's required format.
class MockJudge : public VisionJudgeService {
 public:
  std::string judge(const FrameRef& frame, const std::string&) override {
    const nlohmann::json media = parse_mock_media(frame);
    const auto& detected = media.at("detected_character");
    if (detected.is_null()) return "character: , score: 0";
    return "character: " + detected.get<std::string>() + ", score: 1";
  }

  static nlohmann::json parse_mock_media(const FrameRef& frame) {
    try {
      return nlohmann::json::parse(frame.inline_data);
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(std::string("mock judge: frame media is not mock "
                                     "metadata: ") + e.what());
    }
  }
};

// Deterministic VQA over mock media. The render subject keeps its key
// characteristics even when the identity was suppressed, so consistency
// stays in a narrow high band whenever the question matches the subject and
// drops to the low reference value otherwise.
class MockVqa : public VqaService {
 public:
  static constexpr double kDetectedSubject = 0.76;
  static constexpr double kSuppressedSubject = 0.74;
  static constexpr double kPromptMention = 0.73;
  static constexpr double kUnrelated = 0.33;

  double yes_probability(const FrameRef& frame,
                         const std::string& question) override {
    const std::string characteristic = parse_question(question);
    const nlohmann::json media = MockJudge::parse_mock_media(frame);
    const auto& subject = media.at("subject_characteristic");
    if (!subject.is_null() &&
        iequals(subject.get<std::string>(), characteristic)) {
      return media.at("detected_character").is_null() ? kSuppressedSubject
                                                      : kDetectedSubject;
    }
    const std::string prompt = media.at("final_prompt").get<std::string>();
    if (contains_phrase(prompt, characteristic)) return kPromptMention;
    return kUnrelated;
  }

  // Extracts s(C) from "Does this figure show s(C)? Please answer yes or no."
  static std::string parse_question(const std::string& question) {
    constexpr std::string_view prefix = "Does this figure show ";
    constexpr std::string_view suffix = "? Please answer yes or no.";
    if (question.rfind(prefix, 0) != 0 || question.size() < prefix.size() + suffix.size()) {
      throw ServiceError("mock vqa: unexpected question format: " + question);
    }
    if (question.substr(question.size() - suffix.size()) != suffix) {
      throw ServiceError("mock vqa: unexpected question format: " + question);
    }
    return question.substr(prefix.size(),
                           question.size() - prefix.size() - suffix.size());
  }
};

// Deterministic stand-in for the LM keyword baseline: answers the keyword
// template with the named character's stored candidates in order, mirroring a
// greedy completion.
class KbLmService : public ChatService {
 public:
  explicit KbLmService(const CharacterSet& kb) : kb_(&kb) {}

  std::string complete(const std::string&, const std::string& user_prompt,
                       double) override {
    const CharacterRecord* best = nullptr;
    for (const auto& record : *kb_) {
      if (!contains_ci(user_prompt, record.name)) continue;
      if (!best || record.name.size() > best->name.size()) best = &record;
    }
    if (!best) return "";
    return join(best->keyword_candidates, ", ");
  }

 private:
  const CharacterSet* kb_;
};

// Deterministic rewriting service: every occurrence of a KB character name is
// replaced with that character's stored name-free description. The stored
// descriptions satisfy the KB invariant, so the output never leaks a name.
class KbRewriteService : public ChatService {
 public:
  explicit KbRewriteService(const CharacterSet& kb) : kb_(&kb) {
    // Longest-first so overlapping names replace outer-first.
    for (const auto& record : *kb_) ordered_.push_back(&record);
    std::sort(ordered_.begin(), ordered_.end(),
              [](const CharacterRecord* a, const CharacterRecord* b) {
                if (a->name.size() != b->name.size()) {
                  return a->name.size() > b->name.size();
                }
                return a->name < b->name;
              });
  }

  std::string complete(const std::string&, const std::string& user_prompt,
                       double) override {
    std::string text = user_prompt;
    bool replaced = false;
    for (const CharacterRecord* record : ordered_) {
      if (record->descriptions.empty()) continue;
      if (!contains_ci(text, record->name)) continue;
      text = replace_ci(text, record->name, record->descriptions.front());
      replaced = true;
    }
    if (!replaced) return user_prompt;
    return "Create an image of a fictional character. " + text;
  }

 private:
  static std::string replace_ci(const std::string& text,
                                const std::string& needle,
                                const std::string& replacement) {
    const std::string lower_text = to_lower(text);
    const std::string lower_needle = to_lower(needle);
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const std::size_t hit = lower_text.find(lower_needle, pos);
      if (hit == std::string::npos) {
        out.append(text.substr(pos));
        break;
      }
      out.append(text.substr(pos, hit - pos));
      out.append(replacement);
      pos = hit + needle.size();
    }
    return out;
  }

  const CharacterSet* kb_;
  std::vector<const CharacterRecord*> ordered_;
};

}  // namespace copyguard
