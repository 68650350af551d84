// Walks one prompt through the whole guardrail: intent detection, policy
// application, mock generation, and DETECT/CONS evaluation.

#include <iostream>

#include "copyguard/copyguard.hpp"

using namespace copyguard;

int main(int argc, char** argv) {
  const std::string root = COPYGUARD_SOURCE_DIR;
  const std::string prompt =
      argc > 1 ? argv[1] : "Draw Mario jumping over green pipes";

  const CharacterSet kb = load_kb(root + "/data/characters.jsonl");
  KbLexiconEmbedder embedder(kb);
  KbRewriteService rewriter(kb);

  const auto db = DescriptionIndex::build(kb, embedder);
  IntentVerdict intent = detect_retriever(prompt, db, embedder);
  if (!intent.flagged) {
    for (const auto& record : kb) {
      if (contains_phrase(prompt, record.name)) {
        intent = IntentVerdict::oracle(record.id);
        break;
      }
    }
  }
  std::cout << "prompt:   " << prompt << "\n";
  std::cout << "intent:   " << (intent.flagged ? "flagged" : "clean");
  if (intent.matched_character) std::cout << " -> " << *intent.matched_character;
  std::cout << "\n";

  MitigationPolicy policy = MitigationPolicy::load(root + "/data/policies/full.json");

  std::map<std::string, std::map<RankMethod, RankedAnchorSet>> rankings;
  std::map<std::string, std::vector<std::string>> anchors;
  {
    std::vector<std::string> phrases;
    for (const auto& record : kb) {
      phrases.push_back(record.name);
      for (const auto& kw : record.keyword_candidates) phrases.push_back(kw);
    }
    const CorpusIndex index = CorpusIndex::ingest_jsonl(
        root + "/data/corpus_laion_sample.jsonl", phrases, "laion");
    for (const auto& record : kb) {
      rankings[record.id][RankMethod::cooccurrence("laion")] =
          rank_by_cooccurrence(record, record.keyword_candidates, index, "laion");
      rankings[record.id][RankMethod::embedding_sim()] =
          rank_by_embedding(record, record.keyword_candidates, embedder);
      anchors[record.id] =
          rankings[record.id][RankMethod::cooccurrence("laion")].candidates();
    }
  }

  MitigationDeps deps;
  deps.rewriter = &rewriter;
  deps.kb = &kb;
  deps.rankings_for =
      [&](const std::string& id) -> const std::map<RankMethod, RankedAnchorSet>* {
    auto it = rankings.find(id);
    return it == rankings.end() ? nullptr : &it->second;
  };
  const MitigatedRequest mitigated = apply_policy(prompt, intent, policy, deps);
  std::cout << "rewritten: " << mitigated.final_prompt << "\n";
  std::cout << "negative:  " << mitigated.negative_prompt << "\n";

  MockBackend backend(kb, anchors);
  GenerationRequest request;
  request.prompt = mitigated.final_prompt;
  request.negative_prompt = mitigated.negative_prompt;
  const GenerationResult result = submit_generation(backend, request);

  MockJudge judge;
  MockVqa vqa;
  const DetectionVerdict verdict = judge_detect(result.frames[0], judge);
  std::cout << "judge:     score " << verdict.score;
  if (verdict.character_guess) std::cout << " (" << *verdict.character_guess << ")";
  std::cout << "\n";
  if (intent.matched_character) {
    const auto& record = kb.at(*intent.matched_character);
    const auto cons =
        score_consistency(result.frames[0], record.key_characteristic, vqa);
    std::cout << "cons:      " << cons.value << " for \""
              << record.key_characteristic << "\"\n";
  }
  return 0;
}
