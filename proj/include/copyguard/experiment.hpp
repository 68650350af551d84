#pragma once

#include <atomic>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "copyguard/anchor_ranking.hpp"
#include "copyguard/backend.hpp"
#include "copyguard/character_kb.hpp"
#include "copyguard/common.hpp"
#include "copyguard/corpus_index.hpp"
#include "copyguard/embedding.hpp"
#include "copyguard/evaluation.hpp"
#include "copyguard/http_clients.hpp"
#include "copyguard/intent_detection.hpp"
#include "copyguard/lexicon_embedder.hpp"
#include "copyguard/mitigation.hpp"
#include "copyguard/mock_services.hpp"
#include "copyguard/report.hpp"

namespace copyguard {

// How the per-character base prompt is built.
struct PromptModeConfig {
  enum class Kind { Name, PerturbedName, Keywords, Description, Rewritten };

  Kind kind = Kind::Name;
  std::size_t perturb_letters = 3;
  RankMethod keyword_method = RankMethod::cooccurrence("laion");
  std::size_t keyword_k = 5;
  std::string description_selector = "first";  // first | top | bottom | index
  std::size_t description_index = 0;

  std::string label() const {
    switch (kind) {
      case Kind::Name:
        return "Target's name";
      case Kind::PerturbedName:
        return "Perturbed name (" + std::to_string(perturb_letters) + " letters)";
      case Kind::Keywords:
        return std::to_string(keyword_k) + " " + keyword_method.to_string() +
               " keywords";
      case Kind::Description:
        return "Description (" + description_selector + ")";
      case Kind::Rewritten:
        return "Rewritten prompt";
    }
    return "";
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    switch (kind) {
      case Kind::Name:
        j["kind"] = "name";
        break;
      case Kind::PerturbedName:
        j["kind"] = "perturbed_name";
        j["letters"] = perturb_letters;
        break;
      case Kind::Keywords:
        j["kind"] = "keywords";
        j["method"] = keyword_method.to_string();
        j["k"] = keyword_k;
        break;
      case Kind::Description:
        j["kind"] = "description";
        j["selector"] = description_selector;
        if (description_selector == "index") j["index"] = description_index;
        break;
      case Kind::Rewritten:
        j["kind"] = "rewritten";
        break;
    }
    return j;
  }

  static PromptModeConfig from_json(const nlohmann::json& j) {
    PromptModeConfig m;
    const std::string kind = to_lower(j.value("kind", "name"));
    if (kind == "name") {
      m.kind = Kind::Name;
    } else if (kind == "perturbed_name") {
      m.kind = Kind::PerturbedName;
      m.perturb_letters = j.value("letters", std::size_t{3});
    } else if (kind == "keywords") {
      m.kind = Kind::Keywords;
      m.keyword_method = RankMethod::parse(j.value("method", "cooc:laion"));
      m.keyword_k = j.value("k", std::size_t{5});
    } else if (kind == "description") {
      m.kind = Kind::Description;
      m.description_selector = to_lower(j.value("selector", "first"));
      m.description_index = j.value("index", std::size_t{0});
    } else if (kind == "rewritten") {
      m.kind = Kind::Rewritten;
    } else {
      throw ParseError("unknown prompt mode '" + kind + "'");
    }
    return m;
  }
};

struct ExperimentConfig {
  std::string character_set_path;
  PromptModeConfig prompt_mode;
  MitigationPolicy policy;
  std::string backend = "mock";  // "mock" or a backend URL
  std::string backend_tag = "mock";
  bool backend_supports_negative = true;
  std::size_t repetitions = 3;
  std::vector<std::int64_t> seeds = {0, 1, 2};
  std::vector<std::size_t> sweep;  // optional k sweep for keyword prompts
  std::map<std::string, std::string> corpora;  // corpus tag -> JSONL path
  std::size_t num_frames = 1;
  // Generation knobs; backends with their own defaults get their own config
  // file rather than a global override.
  std::size_t num_steps = 50;
  double guidance_scale = 3.0;
  std::size_t parallelism = 1;
  std::string out_dir = "runs";
  bool persist_artifacts = false;

  void validate() const {
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (seeds.size() < repetitions) {
      throw ConfigError("need at least one seed per repetition");
    }
    for (std::size_t i = 1; i < sweep.size(); ++i) {
      if (sweep[i] <= sweep[i - 1]) {
        throw ConfigError("sweep values must be strictly increasing");
      }
    }
    if (num_frames < 1) throw ConfigError("num_frames must be >= 1");
    if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  }

  nlohmann::ordered_json to_json() const {
    nlohmann::ordered_json j;
    j["character_set"] = character_set_path;
    j["prompt_mode"] = prompt_mode.to_json();
    j["policy"] = policy.to_json();
    j["backend"] = backend;
    j["backend_tag"] = backend_tag;
    j["backend_supports_negative"] = backend_supports_negative;
    j["repetitions"] = repetitions;
    j["seeds"] = seeds;
    if (!sweep.empty()) j["sweep"] = sweep;
    j["corpora"] = corpora;
    j["num_frames"] = num_frames;
    j["num_steps"] = num_steps;
    j["guidance_scale"] = guidance_scale;
    j["parallelism"] = parallelism;
    return j;
  }

  static ExperimentConfig from_json(const nlohmann::json& j) {
    ExperimentConfig c;
    c.character_set_path = j.at("character_set").get<std::string>();
    if (j.contains("prompt_mode")) {
      c.prompt_mode = PromptModeConfig::from_json(j.at("prompt_mode"));
    }
    if (j.contains("policy")) {
      c.policy = MitigationPolicy::from_json(j.at("policy"));
    }
    c.backend = j.value("backend", std::string("mock"));
    c.backend_tag = j.value("backend_tag",
                            c.backend == "mock" ? std::string("mock")
                                                : std::string("http"));
    c.backend_supports_negative = j.value("backend_supports_negative", true);
    c.repetitions = j.value("repetitions", std::size_t{3});
    if (j.contains("seeds")) {
      c.seeds = j.at("seeds").get<std::vector<std::int64_t>>();
    } else {
      c.seeds.clear();
      for (std::size_t i = 0; i < c.repetitions; ++i) {
        c.seeds.push_back(static_cast<std::int64_t>(i));
      }
    }
    if (j.contains("sweep")) {
      c.sweep = j.at("sweep").get<std::vector<std::size_t>>();
    }
    if (j.contains("corpora")) {
      c.corpora = j.at("corpora").get<std::map<std::string, std::string>>();
    }
    c.num_frames = j.value("num_frames", std::size_t{1});
    c.num_steps = j.value("num_steps", std::size_t{50});
    c.guidance_scale = j.value("guidance_scale", 3.0);
    c.parallelism = j.value("parallelism", std::size_t{1});
    c.out_dir = j.value("out_dir", std::string("runs"));
    c.persist_artifacts = j.value("persist_artifacts", false);
    // The rewritten prompt mode is the name prompt with rewriting forced on.
    if (c.prompt_mode.kind == PromptModeConfig::Kind::Rewritten) {
      c.policy.rewrite = true;
    }
    c.validate();
    return c;
  }

  static ExperimentConfig load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config file: " + path);
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("config " + path + ": " + e.what());
    }
    return from_json(j);
  }
};

// Replaces `letters` distinct alphabetic positions of the name with distinct
// random lowercase letters, each different from the letter it replaces.
inline std::string perturb_name(const std::string& name, std::size_t letters,
                                std::uint64_t seed) {
  std::vector<std::size_t> positions;
  for (std::size_t i = 0; i < name.size(); ++i) {
    if (std::isalpha(static_cast<unsigned char>(name[i]))) positions.push_back(i);
  }
  if (positions.empty() || letters == 0) return name;
  std::mt19937_64 rng(seed);
  const std::size_t count = std::min(letters, positions.size());
  // Partial Fisher-Yates over the alphabetic positions.
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + rng_below(rng, positions.size() - i);
    std::swap(positions[i], positions[j]);
  }
  std::string out = name;
  std::vector<char> used;
  for (std::size_t i = 0; i < count; ++i) {
    const char original = ascii_lower(out[positions[i]]);
    // Replacements stay distinct from each other until the alphabet runs
    // out (names longer than 25 letters).
    if (used.size() >= 25) used.clear();
    char replacement = 0;
    do {
      replacement = static_cast<char>('a' + rng_below(rng, 26));
    } while (replacement == original ||
             std::find(used.begin(), used.end(), replacement) != used.end());
    used.push_back(replacement);
    out[positions[i]] = replacement;
  }
  return out;
}

// Hash of the canonical config, the KB checksum, and the backend tag.
inline std::string config_fingerprint(const ExperimentConfig& config,
                                      std::uint64_t kb_checksum) {
  std::uint64_t h = fnv1a64(config.to_json().dump());
  h = fnv1a64_mix(kb_checksum, h);
  h = fnv1a64(config.backend_tag, h);
  return to_hex(h);
}

// Services an experiment run needs. Desk-scale runs wire the deterministic
// local substitutes; live runs wire the HTTP clients.
struct ExperimentServices {
  Embedder* embedder = nullptr;
  ChatService* rewriter = nullptr;
  ChatService* lm = nullptr;
  VisionJudgeService* judge = nullptr;
  VqaService* vqa = nullptr;
  Backend* backend = nullptr;
};

struct DeskServices {
  explicit DeskServices(const CharacterSet& kb)
      : embedder(kb), rewriter(kb), lm(kb), judge(), vqa() {}

  KbLexiconEmbedder embedder;
  KbRewriteService rewriter;
  KbLmService lm;
  MockJudge judge;
  MockVqa vqa;
};

namespace detail {

// Runs fn(i) for i in [0, n) on up to `threads` workers; exceptions surface
// on the calling thread.
inline void parallel_for(std::size_t n, std::size_t threads,
                         const std::function<void(std::size_t)>& fn) {
  if (n == 0) return;
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> workers;
  std::vector<std::exception_ptr> errors(threads);
  for (std::size_t t = 0; t < threads; ++t) {
    workers.emplace_back([&, t] {
      try {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          fn(i);
        }
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace detail

// Orchestrates one experiment: builds prompts per prompt mode, applies the
// mitigation policy under the intent oracle, submits generations, judges and
// scores every evaluated frame, and aggregates over repetitions.
class ExperimentRunner {
 public:
  ExperimentRunner(const CharacterSet& kb, ExperimentServices services)
      : kb_(&kb), services_(services) {
    if (!services_.judge || !services_.vqa) {
      throw ConfigError("runner needs judge and vqa services");
    }
  }

  void set_backend(Backend* backend) { services_.backend = backend; }

  // Rankings the policy and prompt mode need, computed per character.
  void prepare_rankings(const ExperimentConfig& config) {
    std::vector<RankMethod> needed;
    for (const auto& selector : config.policy.negative_keywords) {
      needed.push_back(selector.method);
    }
    if (config.prompt_mode.kind == PromptModeConfig::Kind::Keywords) {
      needed.push_back(config.prompt_mode.keyword_method);
    }
    // The mock backend anchors on the first co-occurrence ranking; make sure
    // one exists when a corpus is configured.
    if (!config.corpora.empty()) {
      needed.push_back(RankMethod::cooccurrence(config.corpora.begin()->first));
    }

    for (const auto& method : needed) {
      if (rankings_ready_.count(method)) continue;
      switch (method.kind) {
        case RankMethodKind::EmbeddingSim: {
          if (!services_.embedder) {
            throw ConfigError("embeddingsim ranking needs an embedder");
          }
          for (const auto& record : *kb_) {
            rankings_[record.id][method] = rank_by_embedding(
                record, record.keyword_candidates, *services_.embedder);
          }
          break;
        }
        case RankMethodKind::CoOccurrence: {
          const CorpusIndex& index = corpus_index(config, method.corpus_tag);
          for (const auto& record : *kb_) {
            rankings_[record.id][method] = rank_by_cooccurrence(
                record, record.keyword_candidates, index, method.corpus_tag);
          }
          break;
        }
        case RankMethodKind::LmRanked: {
          if (!services_.lm) {
            throw ConfigError("lm ranking needs a chat service");
          }
          const std::size_t k =
              config.prompt_mode.kind == PromptModeConfig::Kind::Keywords
                  ? std::max(config.prompt_mode.keyword_k, max_selector_k(config))
                  : std::max<std::size_t>(5, max_selector_k(config));
          for (const auto& record : *kb_) {
            rankings_[record.id][method] = lm_rank(record, k, *services_.lm).set;
          }
          break;
        }
      }
      rankings_ready_.insert(method);
    }
  }

  // Anchor lists handed to the mock backend: the first co-occurrence ranking
  // if available, else embedding ranking, else the raw candidate order.
  std::map<std::string, std::vector<std::string>> mock_anchors() const {
    std::map<std::string, std::vector<std::string>> anchors;
    for (const auto& record : *kb_) {
      const std::vector<std::string>* chosen = nullptr;
      std::vector<std::string> from_ranking;
      auto it = rankings_.find(record.id);
      if (it != rankings_.end()) {
        const RankedAnchorSet* cooc = nullptr;
        const RankedAnchorSet* embed = nullptr;
        for (const auto& [method, set] : it->second) {
          if (method.kind == RankMethodKind::CoOccurrence && !cooc) cooc = &set;
          if (method.kind == RankMethodKind::EmbeddingSim && !embed) embed = &set;
        }
        if (cooc || embed) {
          from_ranking = (cooc ? cooc : embed)->candidates();
          chosen = &from_ranking;
        }
      }
      anchors[record.id] = chosen ? *chosen : record.keyword_candidates;
    }
    return anchors;
  }

  RunReport run(const ExperimentConfig& config) {
    config.validate();
    if (!services_.backend) throw ConfigError("runner needs a backend");
    if (!config.policy.is_empty() &&
        (config.policy.negative_base != NegativeBase::None ||
         !config.policy.negative_keywords.empty()) &&
        !services_.backend->supports_negative_prompt()) {
      throw ConfigError("backend '" + services_.backend->tag() +
                        "' does not support negative prompts; refusing to "
                        "silently drop them");
    }
    prepare_rankings(config);

    RunReport report;
    report.config = config.to_json();
    report.backend_tag = services_.backend->tag();
    report.prompt_label = config.prompt_mode.label();
    report.negative_label = config.policy.negative_label();
    report.repetitions = config.repetitions;
    report.fingerprint = config_fingerprint(config, kb_->checksum());

    if (config.persist_artifacts) {
      store_ = std::make_unique<ArtifactStore>(
          std::filesystem::path(config.out_dir) / report.fingerprint /
          "artifacts");
    }

    MitigationDeps deps;
    deps.rewriter = services_.rewriter;
    deps.kb = kb_;
    deps.rankings_for =
        [this](const std::string& id) -> const std::map<RankMethod, RankedAnchorSet>* {
      auto it = rankings_.find(id);
      return it == rankings_.end() ? nullptr : &it->second;
    };

    const auto& records = kb_->records();
    std::size_t failed_cells = 0;
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
      const std::int64_t seed = config.seeds[rep];
      std::vector<CellResult> cells(records.size());
      detail::parallel_for(
          records.size(), config.parallelism, [&](std::size_t i) {
            cells[i] = run_cell(config, deps, records[i], rep, seed);
          });

      std::map<std::string, DetectionVerdict> verdicts;
      std::map<std::string, ConsistencyScore> scores;
      for (auto& cell : cells) {
        if (cell.error) ++failed_cells;
        DetectionVerdict verdict;
        verdict.score = cell.detect_score;
        if (verdict.score == 1) verdict.character_guess = cell.character_id;
        verdicts[cell.character_id] = verdict;
        scores[cell.character_id] = {cell.cons_value, ""};
        report.cells.push_back(std::move(cell));
      }
      const double detect =
          static_cast<double>(compute_detect(verdicts, *kb_));
      const double cons = compute_cons(scores, *kb_);
      report.per_repetition.emplace_back(detect, cons);
    }

    const std::size_t total_cells = records.size() * config.repetitions;
    if (total_cells > 0 && failed_cells * 2 > total_cells) {
      throw RunFailure(std::to_string(failed_cells) + " of " +
                       std::to_string(total_cells) + " cells errored");
    }
    report.aggregate = aggregate_runs(report.per_repetition);
    return report;
  }

  const std::map<std::string, std::map<RankMethod, RankedAnchorSet>>& rankings()
      const {
    return rankings_;
  }

 private:
  std::size_t max_selector_k(const ExperimentConfig& config) const {
    std::size_t k = 0;
    for (const auto& sel : config.policy.negative_keywords) {
      k = std::max(k, sel.k);
    }
    return k;
  }

  const CorpusIndex& corpus_index(const ExperimentConfig& config,
                                  const std::string& tag) {
    auto it = indexes_.find(tag);
    if (it != indexes_.end()) return it->second;
    auto path = config.corpora.find(tag);
    if (path == config.corpora.end()) {
      throw ConfigError("no corpus configured for tag '" + tag + "'");
    }
    std::vector<std::string> phrases;
    for (const auto& record : *kb_) {
      phrases.push_back(record.name);
      for (const auto& kw : record.keyword_candidates) phrases.push_back(kw);
    }
    auto [inserted, _] = indexes_.emplace(
        tag, CorpusIndex::ingest_jsonl(path->second, phrases, tag));
    return inserted->second;
  }

  std::string build_prompt(const ExperimentConfig& config,
                           const CharacterRecord& record, std::int64_t seed) {
    switch (config.prompt_mode.kind) {
      case PromptModeConfig::Kind::Name:
      case PromptModeConfig::Kind::Rewritten:
        return record.name;
      case PromptModeConfig::Kind::PerturbedName: {
        const std::uint64_t cell_seed = fnv1a64(
            record.id, fnv1a64_mix(static_cast<std::uint64_t>(seed),
                                   kFnvOffsetBasis));
        return perturb_name(record.name, config.prompt_mode.perturb_letters,
                            cell_seed);
      }
      case PromptModeConfig::Kind::Keywords: {
        auto it = rankings_.find(record.id);
        if (it == rankings_.end() ||
            !it->second.count(config.prompt_mode.keyword_method)) {
          throw MissingRanking("no '" +
                               config.prompt_mode.keyword_method.to_string() +
                               "' ranking for '" + record.id + "'");
        }
        return join(select_top_k(it->second.at(config.prompt_mode.keyword_method),
                                 config.prompt_mode.keyword_k),
                    ", ");
      }
      case PromptModeConfig::Kind::Description: {
        if (record.descriptions.empty()) {
          throw ConfigError("character '" + record.id + "' has no descriptions");
        }
        const std::string& selector = config.prompt_mode.description_selector;
        if (selector == "first") return record.descriptions.front();
        if (selector == "index") {
          return record.descriptions.at(config.prompt_mode.description_index);
        }
        if (selector == "top" || selector == "bottom") {
          if (!services_.embedder) {
            throw ConfigError("description selector '" + selector +
                              "' needs an embedder");
          }
          RankedAnchorSet ranked = rank_by_embedding(
              record, record.descriptions, *services_.embedder);
          return selector == "top" ? ranked.entries.front().candidate
                                   : ranked.entries.back().candidate;
        }
        throw ConfigError("unknown description selector '" + selector + "'");
      }
    }
    throw ConfigError("unhandled prompt mode");
  }

  CellResult run_cell(const ExperimentConfig& config, const MitigationDeps& deps,
                      const CharacterRecord& record, std::size_t rep,
                      std::int64_t seed) {
    CellResult cell;
    cell.character_id = record.id;
    cell.repetition = rep;
    try {
      const std::string base_prompt = build_prompt(config, record, seed);
      // §5.2 oracle assumption: the runner knows the intended character.
      const IntentVerdict intent = IntentVerdict::oracle(record.id);
      const MitigatedRequest mitigated =
          apply_policy(base_prompt, intent, config.policy, deps);
      cell.prompt = mitigated.final_prompt;
      cell.negative_prompt = mitigated.negative_prompt;
      cell.anchor_leak_count = mitigated.provenance.anchor_leak_count;

      GenerationRequest request;
      request.prompt = mitigated.final_prompt;
      request.negative_prompt = mitigated.negative_prompt;
      request.seed = seed;
      request.num_frames = config.num_frames;
      request.num_steps = config.num_steps;
      request.guidance_scale = config.guidance_scale;

      const GenerationResult result =
          submit_generation(*services_.backend, request, store_.get());
      cell.artifact_id = result.artifact_id;

      std::vector<DetectionVerdict> frame_verdicts;
      std::vector<double> frame_scores;
      for (const auto& frame : result.frames) {
        frame_verdicts.push_back(judge_detect(frame, *services_.judge));
        frame_scores.push_back(
            score_consistency(frame, record.key_characteristic, *services_.vqa)
                .value);
      }
      cell.detect_score = combine_frame_verdicts(frame_verdicts).score;
      cell.cons_value = combine_frame_consistency(frame_scores);
    } catch (const PolicyRefusal&) {
      cell.refused = true;
      cell.detect_score = 0;
      cell.cons_value = 0.0;
    } catch (const std::exception& e) {
      cell.error = e.what();
      cell.detect_score = 0;
      cell.cons_value = 0.0;
    }
    return cell;
  }

  const CharacterSet* kb_;
  ExperimentServices services_;
  std::map<std::string, std::map<RankMethod, RankedAnchorSet>> rankings_;
  std::set<RankMethod> rankings_ready_;
  std::map<std::string, CorpusIndex> indexes_;
  std::unique_ptr<ArtifactStore> store_;
};

struct ExperimentOutcome {
  std::vector<RunReport> reports;
};

// Loads the KB, wires services for the configured backend (deterministic
// desk services for "mock", HTTP clients otherwise), and runs the experiment.
// A non-empty sweep produces one report per swept k.
inline ExperimentOutcome run_experiment(const ExperimentConfig& config) {
  ExperimentOutcome outcome;
  CharacterSet kb = load_kb(config.character_set_path);

  DeskServices desk(kb);
  std::unique_ptr<MockBackend> mock_backend;
  std::unique_ptr<HttpBackend> http_backend;
  std::unique_ptr<HttpChatService> http_chat;
  std::unique_ptr<HttpEmbedder> http_embedder;
  std::unique_ptr<HttpVisionJudge> http_judge;
  std::unique_ptr<HttpVqa> http_vqa;

  ExperimentServices services;
  services.embedder = &desk.embedder;
  services.rewriter = &desk.rewriter;
  services.lm = &desk.lm;
  services.judge = &desk.judge;
  services.vqa = &desk.vqa;

  auto run_one = [&](const ExperimentConfig& one) {
    if (config.backend == "mock") {
      ExperimentRunner runner(kb, services);
      runner.prepare_rankings(one);
      mock_backend = std::make_unique<MockBackend>(kb, runner.mock_anchors());
      runner.set_backend(mock_backend.get());
      outcome.reports.push_back(runner.run(one));
    } else {
      ExperimentServices live = services;
      const std::string llm_url = env_or(kEnvLlmUrl);
      if (!llm_url.empty()) {
        http_chat = std::make_unique<HttpChatService>(
            llm_url, env_or("COPYGUARD_LLM_MODEL", "gpt-4"));
        live.rewriter = http_chat.get();
        live.lm = http_chat.get();
      }
      const std::string embedder_url = env_or(kEnvEmbedderUrl);
      if (!embedder_url.empty()) {
        http_embedder = std::make_unique<HttpEmbedder>(
            embedder_url,
            env_or("COPYGUARD_EMBEDDER_MODEL", "text-embedding-3-small"));
        live.embedder = http_embedder.get();
      }
      http_backend = std::make_unique<HttpBackend>(
          config.backend, config.backend_tag, config.backend_supports_negative);
      http_judge = std::make_unique<HttpVisionJudge>(
          env_or("COPYGUARD_JUDGE_URL", config.backend));
      http_vqa = std::make_unique<HttpVqa>(
          env_or("COPYGUARD_VQA_URL", config.backend));
      live.backend = http_backend.get();
      live.judge = http_judge.get();
      live.vqa = http_vqa.get();
      ExperimentRunner live_runner(kb, live);
      outcome.reports.push_back(live_runner.run(one));
    }
  };

  if (!config.sweep.empty()) {
    if (config.prompt_mode.kind != PromptModeConfig::Kind::Keywords) {
      throw ConfigError("sweep requires the keywords prompt mode");
    }
    for (std::size_t k : config.sweep) {
      ExperimentConfig swept = config;
      swept.sweep.clear();
      swept.prompt_mode.keyword_k = k;
      run_one(swept);
    }
  } else {
    run_one(config);
  }
  return outcome;
}

}  // namespace copyguard
