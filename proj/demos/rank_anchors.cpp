// Ranks one character's anchor candidates by both methods and prints the
// negative prompt the best mitigation policy would use.

#include <iostream>

#include "copyguard/anchor_ranking.hpp"
#include "copyguard/character_kb.hpp"
#include "copyguard/corpus_index.hpp"
#include "copyguard/lexicon_embedder.hpp"
#include "copyguard/mitigation.hpp"

using namespace copyguard;

int main(int argc, char** argv) {
  const std::string root = COPYGUARD_SOURCE_DIR;
  const std::string character_id = argc > 1 ? argv[1] : "mario";

  const CharacterSet kb = load_kb(root + "/data/characters.jsonl");
  const CharacterRecord& character = kb.at(character_id);
  std::cout << character.name << " (" << character.studio << ") — "
            << character.key_characteristic << "\n\n";

  std::vector<std::string> phrases = {character.name};
  for (const auto& kw : character.keyword_candidates) phrases.push_back(kw);
  const CorpusIndex index = CorpusIndex::ingest_jsonl(
      root + "/data/corpus_laion_sample.jsonl", phrases, "laion");

  const auto cooc = rank_by_cooccurrence(character, character.keyword_candidates,
                                         index, "laion");
  std::cout << "top co-occurrence anchors:\n";
  for (const auto& kw : select_top_k(cooc, 5)) std::cout << "  " << kw << "\n";

  KbLexiconEmbedder embedder(kb);
  const auto embed =
      rank_by_embedding(character, character.keyword_candidates, embedder);
  std::cout << "top embedding anchors:\n";
  for (const auto& kw : select_top_k(embed, 5)) std::cout << "  " << kw << "\n";

  MitigationPolicy policy;
  policy.negative_base = NegativeBase::TargetName;
  policy.negative_keywords = {{RankMethod::embedding_sim(), 5},
                              {RankMethod::cooccurrence("laion"), 5}};
  std::map<RankMethod, RankedAnchorSet> rankings;
  rankings[embed.method] = embed;
  rankings[cooc.method] = cooc;
  std::cout << "\nnegative prompt:\n  "
            << build_negative_prompt(policy, character, rankings) << "\n";
  return 0;
}
