// copyguard: guardrail gateway and evaluation harness CLI.

#include <filesystem>
#include <iostream>
#include <memory>

#include <CLI11.hpp>

#include "copyguard/copyguard.hpp"

namespace fs = std::filesystem;
using namespace copyguard;

namespace {

CharacterSet load_kb_or_exit(const std::string& path) {
  return load_kb(path);
}

std::string llm_model() { return env_or("COPYGUARD_LLM_MODEL", "gpt-4"); }

// Live chat service when configured, otherwise the deterministic rewriter.
std::unique_ptr<ChatService> make_rewrite_service(const CharacterSet& kb) {
  const std::string url = env_or(kEnvLlmUrl);
  if (!url.empty()) {
    return std::make_unique<HttpChatService>(url, llm_model());
  }
  return std::make_unique<KbRewriteService>(kb);
}

// Live chat service when configured, otherwise the deterministic keyword
// responder.
std::unique_ptr<ChatService> make_lm_service(const CharacterSet& kb) {
  const std::string url = env_or(kEnvLlmUrl);
  if (!url.empty()) {
    return std::make_unique<HttpChatService>(url, llm_model());
  }
  return std::make_unique<KbLmService>(kb);
}

int cmd_kb_validate(const std::string& path) {
  const CharacterSet kb = load_kb_or_exit(path);
  std::cout << "OK: " << kb.size() << " characters, checksum "
            << to_hex(kb.checksum()) << "\n";
  return 0;
}

int cmd_kb_gen_candidates(const std::string& kb_path, const std::string& id,
                          const std::string& kind, std::size_t n) {
  const CharacterSet kb = load_kb_or_exit(kb_path);
  const CharacterRecord& record = kb.at(id);
  const std::string llm_url = env_or(kEnvLlmUrl);
  if (llm_url.empty()) {
    std::cerr << "error: candidate generation needs a chat service; set "
              << kEnvLlmUrl << "\n";
    return 2;
  }
  HttpChatService chat(llm_url, llm_model());
  const CandidateKind candidate_kind =
      kind == "description" ? CandidateKind::Description : CandidateKind::Keyword;
  for (const auto& candidate :
       generate_candidates(record, n, candidate_kind, chat)) {
    std::cout << candidate << "\n";
  }
  return 0;
}

int cmd_index_build(const std::string& corpus, const std::string& phrases_path,
                    const std::string& out, const std::string& tag) {
  std::vector<std::string> phrases;
  std::ifstream in(phrases_path);
  if (!in) throw Error("cannot open phrases file: " + phrases_path);
  std::string line;
  while (std::getline(in, line)) {
    const std::string phrase = trim(line);
    if (!phrase.empty()) phrases.push_back(phrase);
  }
  const CorpusIndex index = CorpusIndex::ingest_jsonl(corpus, phrases, tag);
  index.save(out);
  std::cout << "indexed " << index.doc_count() << " documents ("
            << index.skipped_documents() << " skipped), "
            << index.phrases().size() << " phrases -> " << out << "\n";
  return 0;
}

int cmd_rank(const std::string& kb_path, const std::string& id,
             const std::string& method_text, std::size_t k,
             const std::string& index_path, const std::string& out,
             const std::string& cache_path) {
  const CharacterSet kb = load_kb_or_exit(kb_path);
  const CharacterRecord& record = kb.at(id);
  const RankMethod method = RankMethod::parse(method_text);

  RankedAnchorSet set;
  switch (method.kind) {
    case RankMethodKind::EmbeddingSim: {
      KbLexiconEmbedder base(kb);
      EmbeddingCache cache(base);
      if (!cache_path.empty()) cache.load(cache_path);
      set = rank_by_embedding(record, record.keyword_candidates, cache);
      if (!cache_path.empty()) cache.save(cache_path);
      break;
    }
    case RankMethodKind::CoOccurrence: {
      if (index_path.empty()) {
        std::cerr << "error: cooc ranking needs --index\n";
        return 2;
      }
      const CorpusIndex index = CorpusIndex::load(index_path);
      set = rank_by_cooccurrence(record, record.keyword_candidates, index,
                                 method.corpus_tag);
      break;
    }
    case RankMethodKind::LmRanked: {
      auto chat = make_lm_service(kb);
      const auto result = lm_rank(record, k == 0 ? 5 : k, *chat);
      if (result.short_response) {
        std::cerr << "warning: model returned " << result.parsed << " of "
                  << result.requested << " keywords\n";
      }
      set = result.set;
      break;
    }
  }

  const auto top = select_top_k(set, k == 0 ? set.entries.size() : k);
  for (std::size_t i = 0; i < top.size(); ++i) {
    std::cout << (i + 1) << ". " << top[i] << "\n";
  }
  if (!out.empty()) {
    set.save(out);
    std::cout << "saved " << set.entries.size() << " entries -> " << out << "\n";
  }
  return 0;
}

int cmd_detect_intent(const std::string& kb_path, const std::string& prompt,
                      const std::string& method, double threshold) {
  const CharacterSet kb = load_kb_or_exit(kb_path);
  KbLexiconEmbedder embedder(kb);

  IntentVerdict verdict;
  if (method == "llm") {
    const std::string url = env_or(kEnvLlmUrl);
    if (url.empty()) {
      std::cerr << "error: llm detection needs " << kEnvLlmUrl << "\n";
      return 2;
    }
    HttpChatService chat(url, llm_model());
    verdict = detect_llm(prompt, chat);
  } else if (method == "retriever") {
    const auto db = DescriptionIndex::build(kb, embedder);
    verdict = detect_retriever(prompt, db, embedder, threshold);
  } else {
    const auto db = DescriptionIndex::build(kb, embedder);
    std::unique_ptr<HttpChatService> chat;
    const std::string url = env_or(kEnvLlmUrl);
    if (!url.empty()) chat = std::make_unique<HttpChatService>(url, llm_model());
    verdict = detect_ensemble(prompt, db, embedder, chat.get(), threshold);
  }

  nlohmann::ordered_json out;
  out["flagged"] = verdict.flagged;
  out["method"] = to_string(verdict.method);
  if (verdict.matched_character) {
    out["matched_character"] = *verdict.matched_character;
  }
  if (verdict.similarity) out["similarity"] = *verdict.similarity;
  std::cout << out.dump(2) << "\n";
  return verdict.flagged ? 1 : 0;
}

int cmd_mitigate(const std::string& kb_path, const std::string& prompt,
                 const std::string& policy_path, const std::string& corpus,
                 bool dry_run) {
  const CharacterSet kb = load_kb_or_exit(kb_path);
  const MitigationPolicy policy = MitigationPolicy::load(policy_path);

  KbLexiconEmbedder embedder(kb);
  auto rewriter = make_rewrite_service(kb);
  auto lm = make_lm_service(kb);

  // Resolve intent; target-dependent policies need a match.
  const auto db = DescriptionIndex::build(kb, embedder);
  IntentVerdict intent = detect_retriever(prompt, db, embedder);
  if (!intent.flagged) {
    // Fall back to exact name matching so `mitigate` works on name prompts.
    for (const auto& record : kb) {
      if (contains_phrase(prompt, record.name)) {
        intent = IntentVerdict::oracle(record.id);
        break;
      }
    }
  }

  std::map<std::string, std::map<RankMethod, RankedAnchorSet>> rankings;
  if (intent.matched_character && !policy.negative_keywords.empty()) {
    const CharacterRecord& record = kb.at(*intent.matched_character);
    for (const auto& selector : policy.negative_keywords) {
      if (rankings[record.id].count(selector.method)) continue;
      switch (selector.method.kind) {
        case RankMethodKind::EmbeddingSim:
          rankings[record.id][selector.method] =
              rank_by_embedding(record, record.keyword_candidates, embedder);
          break;
        case RankMethodKind::CoOccurrence: {
          if (corpus.empty()) {
            std::cerr << "error: policy needs a co-occurrence ranking; pass "
                         "--corpus\n";
            return 2;
          }
          std::vector<std::string> phrases = {record.name};
          for (const auto& kw : record.keyword_candidates) phrases.push_back(kw);
          const CorpusIndex index = CorpusIndex::ingest_jsonl(
              corpus, phrases, selector.method.corpus_tag);
          rankings[record.id][selector.method] = rank_by_cooccurrence(
              record, record.keyword_candidates, index,
              selector.method.corpus_tag);
          break;
        }
        case RankMethodKind::LmRanked: {
          const auto result = lm_rank(record, selector.k, *lm);
          rankings[record.id][selector.method] = result.set;
          break;
        }
      }
    }
  }

  MitigationDeps deps;
  deps.rewriter = rewriter.get();
  deps.kb = &kb;
  deps.rankings_for =
      [&](const std::string& id) -> const std::map<RankMethod, RankedAnchorSet>* {
    auto it = rankings.find(id);
    return it == rankings.end() ? nullptr : &it->second;
  };

  const MitigatedRequest out = apply_policy(prompt, intent, policy, deps);
  nlohmann::ordered_json j;
  j["final_prompt"] = out.final_prompt;
  j["negative_prompt"] = out.negative_prompt;
  j["provenance"] = out.provenance.to_json();
  std::cout << j.dump(2) << "\n";
  if (!dry_run) {
    std::cerr << "note: no backend configured for live submission; printed "
                 "the mitigated request\n";
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_dir_flag,
            const std::string& format) {
  ExperimentConfig config = ExperimentConfig::load(config_path);
  if (!out_dir_flag.empty()) config.out_dir = out_dir_flag;
  const ExperimentOutcome outcome = run_experiment(config);
  fs::create_directories(config.out_dir);
  for (const auto& report : outcome.reports) {
    const std::string path =
        (fs::path(config.out_dir) / (report.fingerprint + ".json")).string();
    report.save(path);
    std::cout << "run " << report.fingerprint << " -> " << path << "\n";
  }
  if (format == "table") {
    std::cout << render_table(outcome.reports);
  } else {
    for (const auto& report : outcome.reports) {
      std::cout << emit_report(report, "json");
    }
  }
  return 0;
}

int cmd_report(const std::vector<std::string>& run_ids,
               const std::string& out_dir, const std::string& format,
               bool ttest) {
  std::vector<RunReport> reports;
  for (const auto& run_id : run_ids) {
    const fs::path direct(run_id);
    if (fs::exists(direct)) {
      reports.push_back(RunReport::load(direct.string()));
    } else {
      reports.push_back(
          RunReport::load((fs::path(out_dir) / (run_id + ".json")).string()));
    }
  }
  if (format == "table") {
    std::cout << render_table(reports);
  } else {
    for (const auto& report : reports) std::cout << emit_report(report, "json");
  }
  if (ttest) {
    if (reports.size() != 2) {
      std::cerr << "error: --ttest compares exactly two runs\n";
      return 2;
    }
    const auto& a = reports[0].aggregate;
    const auto& b = reports[1].aggregate;
    if (!a.detect_std || !b.detect_std ||
        reports[0].repetitions != reports[1].repetitions) {
      std::cerr << "error: --ttest needs equal repetition counts >= 2\n";
      return 2;
    }
    const double t = welch_t(a.detect_mean, *a.detect_std, b.detect_mean,
                             *b.detect_std, reports[0].repetitions);
    std::cout << "DETECT t-value (" << reports[0].negative_label << " vs "
              << reports[1].negative_label << "): ";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", t);
    std::cout << buf << "\n";
  }
  return 0;
}

int cmd_serve(const std::string& kb_path, int port,
              const std::vector<std::string>& policy_paths,
              const std::string& corpus) {
  static CharacterSet kb = load_kb_or_exit(kb_path);
  static KbLexiconEmbedder embedder(kb);
  static KbRewriteService rewriter(kb);

  // Rankings for target-dependent policies, from the corpus when available.
  static std::map<std::string, std::map<RankMethod, RankedAnchorSet>> rankings;
  if (!corpus.empty()) {
    std::vector<std::string> phrases;
    for (const auto& record : kb) {
      phrases.push_back(record.name);
      for (const auto& kw : record.keyword_candidates) phrases.push_back(kw);
    }
    static CorpusIndex index = CorpusIndex::ingest_jsonl(corpus, phrases, "laion");
    const RankMethod cooc = RankMethod::cooccurrence("laion");
    for (const auto& record : kb) {
      rankings[record.id][cooc] =
          rank_by_cooccurrence(record, record.keyword_candidates, index, "laion");
      rankings[record.id][RankMethod::embedding_sim()] =
          rank_by_embedding(record, record.keyword_candidates, embedder);
    }
  }
  {
    static KbLmService lm(kb);
    for (const auto& record : kb) {
      rankings[record.id][RankMethod::lm_ranked()] =
          lm_rank(record, 20, lm).set;
    }
  }

  static std::map<std::string, std::vector<std::string>> anchors;
  for (const auto& record : kb) {
    auto it = rankings.find(record.id);
    const RankMethod cooc = RankMethod::cooccurrence("laion");
    if (it != rankings.end() && it->second.count(cooc)) {
      anchors[record.id] = it->second.at(cooc).candidates();
    } else {
      anchors[record.id] = record.keyword_candidates;
    }
  }

  static std::unique_ptr<Backend> backend;
  const std::string backend_url = env_or(kEnvBackendUrl);
  if (!backend_url.empty()) {
    backend = std::make_unique<HttpBackend>(backend_url, "http");
  } else {
    backend = std::make_unique<MockBackend>(kb, anchors);
  }

  GatewayServer::Options options;
  options.kb = &kb;
  options.backend = backend.get();
  options.embedder = &embedder;
  options.rewriter = &rewriter;
  for (const auto& path : policy_paths) {
    const std::string id = fs::path(path).stem().string();
    options.policies[id] = MitigationPolicy::load(path);
    if (options.default_policy_id.empty()) options.default_policy_id = id;
  }
  if (options.policies.empty()) {
    options.policies["none"] = MitigationPolicy{};
    options.default_policy_id = "none";
  }
  options.rankings_for =
      [](const std::string& id) -> const std::map<RankMethod, RankedAnchorSet>* {
    auto it = rankings.find(id);
    return it == rankings.end() ? nullptr : &it->second;
  };

  GatewayServer server(std::move(options));
  std::cout << "copyguard gateway listening on 0.0.0.0:" << port << " (backend "
            << backend->tag() << ")\n";
  server.listen("0.0.0.0", port);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"copyguard: copyrighted-character guardrail gateway and "
               "evaluation harness"};
  app.require_subcommand(1);

  std::string kb_path = "data/characters.jsonl";

  // kb
  auto* kb_cmd = app.add_subcommand("kb", "character knowledge base tools");
  kb_cmd->require_subcommand(1);
  auto* kb_validate = kb_cmd->add_subcommand("validate", "validate a KB file");
  std::string kb_validate_path;
  kb_validate->add_option("path", kb_validate_path, "KB JSONL file")->required();

  auto* kb_gen = kb_cmd->add_subcommand("gen-candidates",
                                        "generate anchor candidates via LLM");
  std::string gen_character, gen_kind = "keyword";
  std::size_t gen_n = 50;
  kb_gen->add_option("--kb", kb_path, "KB JSONL file");
  kb_gen->add_option("--character", gen_character, "character id")->required();
  kb_gen->add_option("--kind", gen_kind, "keyword|description")
      ->check(CLI::IsMember({"keyword", "description"}));
  kb_gen->add_option("--n", gen_n, "number of candidates");

  // index
  auto* index_cmd = app.add_subcommand("index", "corpus co-occurrence index");
  index_cmd->require_subcommand(1);
  auto* index_build = index_cmd->add_subcommand("build", "build an index");
  std::string index_corpus, index_phrases, index_out, index_tag = "laion";
  index_build->add_option("--corpus", index_corpus, "JSONL corpus with `text`")
      ->required();
  index_build->add_option("--phrases", index_phrases, "phrase list, one per line")
      ->required();
  index_build->add_option("--out", index_out, "output index path")->required();
  index_build->add_option("--tag", index_tag, "corpus tag");

  // rank
  auto* rank_cmd = app.add_subcommand("rank", "rank anchor candidates");
  std::string rank_character, rank_method = "embeddingsim", rank_index, rank_out,
              rank_cache;
  std::size_t rank_k = 5;
  rank_cmd->add_option("--kb", kb_path, "KB JSONL file");
  rank_cmd->add_option("--character", rank_character, "character id")->required();
  rank_cmd->add_option("--method", rank_method,
                       "embeddingsim | cooc:<corpus> | lm");
  rank_cmd->add_option("--k", rank_k, "how many to print (0 = all)");
  rank_cmd->add_option("--index", rank_index, "corpus index file (for cooc)");
  rank_cmd->add_option("--out", rank_out, "persist ranked set as JSONL");
  rank_cmd->add_option("--cache", rank_cache, "embedding cache file");

  // detect-intent
  auto* detect_cmd = app.add_subcommand("detect-intent",
                                        "check a prompt for character intent");
  std::string detect_prompt, detect_method = "retriever";
  double detect_threshold = kRetrieverThreshold;
  detect_cmd->add_option("--kb", kb_path, "KB JSONL file");
  detect_cmd->add_option("--prompt", detect_prompt, "prompt text")->required();
  detect_cmd->add_option("--method", detect_method, "retriever | llm | ensemble")
      ->check(CLI::IsMember({"retriever", "llm", "ensemble"}));
  detect_cmd->add_option("--threshold", detect_threshold,
                         "retriever similarity threshold");

  // mitigate
  auto* mitigate_cmd = app.add_subcommand("mitigate", "apply a policy to a prompt");
  std::string mitigate_prompt, mitigate_policy, mitigate_corpus;
  bool mitigate_dry_run = false;
  mitigate_cmd->add_option("--kb", kb_path, "KB JSONL file");
  mitigate_cmd->add_option("--prompt", mitigate_prompt, "prompt text")->required();
  mitigate_cmd->add_option("--policy", mitigate_policy, "policy JSON file")
      ->required();
  mitigate_cmd->add_option("--corpus", mitigate_corpus,
                           "JSONL corpus for co-occurrence rankings");
  mitigate_cmd->add_flag("--dry-run", mitigate_dry_run,
                         "print the mitigated request only");

  // run
  auto* run_cmd = app.add_subcommand("run", "run a configured experiment");
  std::string run_config, run_out_dir, run_format = "table";
  run_cmd->add_option("--config", run_config, "experiment config JSON")->required();
  run_cmd->add_option("--out-dir", run_out_dir, "report output directory");
  run_cmd->add_option("--format", run_format, "table | json")
      ->check(CLI::IsMember({"table", "json"}));

  // report
  auto* report_cmd = app.add_subcommand("report", "render stored run reports");
  std::vector<std::string> report_ids;
  std::string report_out_dir = "runs", report_format = "table";
  bool report_ttest = false;
  report_cmd->add_option("run_ids", report_ids, "run ids or report paths")
      ->required();
  report_cmd->add_option("--out-dir", report_out_dir, "report directory");
  report_cmd->add_option("--format", report_format, "table | json")
      ->check(CLI::IsMember({"table", "json"}));
  report_cmd->add_flag("--ttest", report_ttest,
                       "Welch t on DETECT between two runs");

  // serve
  auto* serve_cmd = app.add_subcommand("serve", "run the guardrail gateway");
  int serve_port = 8787;
  std::vector<std::string> serve_policies;
  std::string serve_corpus;
  serve_cmd->add_option("--kb", kb_path, "KB JSONL file");
  serve_cmd->add_option("--port", serve_port, "listen port");
  serve_cmd->add_option("--policy", serve_policies, "policy JSON file(s)");
  serve_cmd->add_option("--corpus", serve_corpus,
                        "JSONL corpus for co-occurrence rankings");

  CLI11_PARSE(app, argc, argv);

  try {
    if (kb_validate->parsed()) return cmd_kb_validate(kb_validate_path);
    if (kb_gen->parsed()) {
      return cmd_kb_gen_candidates(kb_path, gen_character, gen_kind, gen_n);
    }
    if (index_build->parsed()) {
      return cmd_index_build(index_corpus, index_phrases, index_out, index_tag);
    }
    if (rank_cmd->parsed()) {
      return cmd_rank(kb_path, rank_character, rank_method, rank_k, rank_index,
                      rank_out, rank_cache);
    }
    if (detect_cmd->parsed()) {
      return cmd_detect_intent(kb_path, detect_prompt, detect_method,
                               detect_threshold);
    }
    if (mitigate_cmd->parsed()) {
      return cmd_mitigate(kb_path, mitigate_prompt, mitigate_policy,
                          mitigate_corpus, mitigate_dry_run);
    }
    if (run_cmd->parsed()) return cmd_run(run_config, run_out_dir, run_format);
    if (report_cmd->parsed()) {
      return cmd_report(report_ids, report_out_dir, report_format,
                        report_ttest);
    }
    if (serve_cmd->parsed()) {
      return cmd_serve(kb_path, serve_port, serve_policies, serve_corpus);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
