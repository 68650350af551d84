// Acceptance suite: one test per criterion, each printing its own pass/fail
// line via the test runner and enforcing the stated runtime budget.

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <random>

#include <httplib.h>

#include "copyguard/copyguard.hpp"

namespace copyguard {
namespace {

using Clock = std::chrono::steady_clock;

double elapsed_seconds(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixture_path(const std::string& name) {
  return std::string(COPYGUARD_SOURCE_DIR) + "/data/" + name;
}

// ---------------------------------------------------------------------------
// Criterion 1: the Welch statistic reproduces the reference t-values.
TEST(Acceptance, C01_StatisticsReproduction) {
  const auto start = Clock::now();
  EXPECT_NEAR(welch_t(30.33, 1.89, 20.67, 0.47, 3), 8.59, 0.01);
  EXPECT_NEAR(welch_t(14.33, 2.62, 4.33, 0.47, 3), 6.51, 0.01);
  EXPECT_LT(elapsed_seconds(start), 0.001);
}

// ---------------------------------------------------------------------------
// Criterion 2: co-occurrence equals a brute-force per-document scan on 100
// randomized corpora of up to 1,000 documents.
TEST(Acceptance, C02_CooccurrenceOracleEquivalence) {
  const auto start = Clock::now();
  std::mt19937_64 rng(0xace5);
  const std::vector<std::string> vocabulary = {
      "mario", "red",   "hat",  "plumber", "mickey", "mouse", "ears",
      "video", "game",  "blue", "star",    "coin",   "castle", "jump",
      "hero",  "pixel", "kart", "mushroom", "glove",  "cap"};
  const std::vector<std::string> phrases = {"mario",       "red",
                                            "mickey mouse", "video game",
                                            "hat",          "star"};

  for (int corpus_id = 0; corpus_id < 100; ++corpus_id) {
    const std::size_t n_docs = 1 + rng_below(rng, 1000);
    std::vector<std::string> docs;
    docs.reserve(n_docs);
    for (std::size_t d = 0; d < n_docs; ++d) {
      std::string doc;
      const std::size_t words = 1 + rng_below(rng, 10);
      for (std::size_t w = 0; w < words; ++w) {
        if (w > 0) doc.push_back(' ');
        doc += vocabulary[rng_below(rng, vocabulary.size())];
      }
      docs.push_back(std::move(doc));
    }
    const auto index = CorpusIndex::ingest(docs, phrases);
    for (const auto& a : phrases) {
      for (const auto& b : phrases) {
        std::size_t brute = 0;
        for (const auto& doc : docs) {
          if (contains_phrase(doc, a) && contains_phrase(doc, b)) ++brute;
        }
        ASSERT_EQ(index.count_cooccurrence(a, b), brute)
            << "corpus " << corpus_id << " pair (" << a << ", " << b << ")";
      }
    }
  }
  EXPECT_LT(elapsed_seconds(start), 10.0);
}

// ---------------------------------------------------------------------------
// Criterion 3: embedding ranking equals an independent cosine-sort, with the
// lexicographic tie-break, and is permutation-invariant byte for byte.
class SeededStubEmbedder : public Embedder {
 public:
  explicit SeededStubEmbedder(std::uint64_t seed) : seed_(seed) {}
  std::string model_tag() const override { return "stub-seeded"; }

  EmbeddingVector embed(const std::string& text) override {
    // Forced score ties: every "dup" candidate shares one of three vectors.
    const std::string key =
        text.rfind("dup", 0) == 0 ? "shared-" + std::to_string(text.size() % 3)
                                  : text;
    std::mt19937_64 rng(fnv1a64(key, seed_));
    std::vector<double> v(16);
    for (auto& x : v) {
      x = static_cast<double>(rng_below(rng, 2000001)) / 1000000.0 - 1.0;
    }
    if (std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; })) {
      v[0] = 1.0;
    }
    return EmbeddingVector(v);
  }

 private:
  std::uint64_t seed_;
};

TEST(Acceptance, C03_EmbeddingRankDeterminism) {
  const auto start = Clock::now();
  SeededStubEmbedder embedder(1234);
  std::mt19937_64 rng(77);

  for (int character_index = 0; character_index < 50; ++character_index) {
    CharacterRecord record;
    record.id = "char-" + std::to_string(character_index);
    record.name = "Character " + std::to_string(character_index);
    record.key_characteristic = "figure";
    std::vector<std::string> candidates;
    for (int c = 0; c < 50; ++c) {
      candidates.push_back((c % 5 == 0 ? "dup-" : "kw-") +
                           std::to_string(character_index) + "-" +
                           std::to_string(c));
    }

    const auto ranked = rank_by_embedding(record, candidates, embedder);

    // Independent oracle: recompute cosines directly and sort.
    const EmbeddingVector name_vec = embedder.embed(record.name);
    std::vector<std::pair<std::string, double>> oracle;
    for (const auto& candidate : candidates) {
      const EmbeddingVector v = embedder.embed(candidate);
      double dot = 0.0, nn = 0.0, nv = 0.0;
      for (std::size_t i = 0; i < v.dim(); ++i) {
        dot += name_vec[i] * v[i];
        nn += name_vec[i] * name_vec[i];
        nv += v[i] * v[i];
      }
      oracle.emplace_back(candidate, dot / (std::sqrt(nn) * std::sqrt(nv)));
    }
    std::sort(oracle.begin(), oracle.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return ci_less(a.first, b.first);
    });

    ASSERT_EQ(ranked.entries.size(), oracle.size());
    for (std::size_t i = 0; i < oracle.size(); ++i) {
      ASSERT_EQ(ranked.entries[i].candidate, oracle[i].first)
          << "rank " << i << " of character " << character_index;
      ASSERT_NEAR(ranked.entries[i].score, oracle[i].second, 1e-12);
    }

    // Permuting the candidate list leaves the output byte-identical.
    std::vector<std::string> shuffled = candidates;
    for (std::size_t i = shuffled.size(); i > 1; --i) {
      std::swap(shuffled[i - 1], shuffled[rng_below(rng, i)]);
    }
    const auto permuted = rank_by_embedding(record, shuffled, embedder);
    ASSERT_EQ(ranked.to_jsonl(), permuted.to_jsonl());
  }
  EXPECT_LT(elapsed_seconds(start), 5.0);
}

// ---------------------------------------------------------------------------
// Criterion 4: strict > 0.7 retriever semantics and threshold monotonicity.
class OneDescriptionEmbedder : public Embedder {
 public:
  explicit OneDescriptionEmbedder(double similarity) : similarity_(similarity) {}
  std::string model_tag() const override { return "one-desc"; }
  EmbeddingVector embed(const std::string& text) override {
    if (text == "stored description") {
      return EmbeddingVector(
          {similarity_, std::sqrt(std::max(0.0, 1.0 - similarity_ * similarity_))});
    }
    return EmbeddingVector({1.0, 0.0});
  }

 private:
  double similarity_;
};

TEST(Acceptance, C04_RetrieverThresholdSemantics) {
  const auto start = Clock::now();
  CharacterSet kb;
  CharacterRecord record;
  record.id = "target";
  record.name = "Target";
  record.key_characteristic = "figure";
  record.descriptions = {"stored description"};
  kb.add(record);

  {
    OneDescriptionEmbedder embedder(0.70);
    const auto db = DescriptionIndex::build(kb, embedder);
    const auto verdict = detect_retriever("query", db, embedder, 0.7);
    EXPECT_FALSE(verdict.flagged);
    ASSERT_TRUE(verdict.similarity.has_value());
    EXPECT_NEAR(*verdict.similarity, 0.70, 1e-9);
  }
  {
    OneDescriptionEmbedder embedder(0.71);
    const auto db = DescriptionIndex::build(kb, embedder);
    const auto verdict = detect_retriever("query", db, embedder, 0.7);
    EXPECT_TRUE(verdict.flagged);
    ASSERT_TRUE(verdict.matched_character.has_value());
    EXPECT_EQ(*verdict.matched_character, "target");
  }

  std::mt19937_64 rng(4242);
  for (int trial = 0; trial < 1000; ++trial) {
    const double sim = static_cast<double>(rng_below(rng, 1999)) / 1000.0 - 0.999;
    OneDescriptionEmbedder embedder(sim);
    const auto db = DescriptionIndex::build(kb, embedder);
    const double low = static_cast<double>(rng_below(rng, 1000)) / 1000.0;
    const double high = low + static_cast<double>(rng_below(rng, 1000)) / 1000.0;
    const bool flagged_low = detect_retriever("q", db, embedder, low).flagged;
    const bool flagged_high = detect_retriever("q", db, embedder, high).flagged;
    ASSERT_TRUE(flagged_low || !flagged_high)
        << "raising the threshold flipped a verdict to flagged (sim " << sim
        << ", " << low << " -> " << high << ")";
  }
  EXPECT_LT(elapsed_seconds(start), 5.0);
}

// ---------------------------------------------------------------------------
// Criterion 5: mock end-to-end ordering over the prompt-mode and
// negative-prompt corner configurations on the shipped 50-character fixture.
struct CornerRun {
  double detect;
  double cons;
};

CornerRun run_corner(PromptModeConfig::Kind prompt_kind, bool with_name_base,
                     bool with_keywords) {
  ExperimentConfig config;
  config.character_set_path = fixture_path("characters.jsonl");
  config.prompt_mode.kind = prompt_kind;
  config.policy.rewrite = prompt_kind == PromptModeConfig::Kind::Rewritten;
  config.policy.negative_base =
      with_name_base ? NegativeBase::TargetName : NegativeBase::None;
  if (with_keywords) {
    config.policy.negative_keywords = {{RankMethod::embedding_sim(), 5},
                                       {RankMethod::cooccurrence("laion"), 5}};
  }
  config.corpora = {{"laion", fixture_path("corpus_laion_sample.jsonl")}};
  config.repetitions = 3;
  config.seeds = {0, 1, 2};
  const auto outcome = run_experiment(config);
  return {outcome.reports[0].aggregate.detect_mean,
          outcome.reports[0].aggregate.cons_mean};
}

TEST(Acceptance, C05_MockEndToEndOrdering) {
  const auto start = Clock::now();

  const CornerRun no_intervention =
      run_corner(PromptModeConfig::Kind::Name, false, false);
  const CornerRun rewrite_only =
      run_corner(PromptModeConfig::Kind::Rewritten, false, false);
  const CornerRun full_policy =
      run_corner(PromptModeConfig::Kind::Rewritten, true, true);

  EXPECT_GT(no_intervention.detect, rewrite_only.detect);
  EXPECT_GT(rewrite_only.detect, full_policy.detect);

  // Adding the name to any negative prompt never increases DETECT.
  const CornerRun name_kw = run_corner(PromptModeConfig::Kind::Name, false, true);
  const CornerRun name_kw_name =
      run_corner(PromptModeConfig::Kind::Name, true, true);
  const CornerRun name_only_base =
      run_corner(PromptModeConfig::Kind::Name, true, false);
  const CornerRun rewrite_kw =
      run_corner(PromptModeConfig::Kind::Rewritten, false, true);
  EXPECT_LE(name_kw_name.detect, name_kw.detect);
  EXPECT_LE(name_only_base.detect, no_intervention.detect);
  EXPECT_LE(full_policy.detect, rewrite_kw.detect);
  EXPECT_LE(rewrite_kw.detect, rewrite_only.detect);

  // CONS stays within ±0.05 of the no-intervention baseline everywhere.
  for (const CornerRun& run : {rewrite_only, full_policy, name_kw,
                               name_kw_name, name_only_base, rewrite_kw}) {
    EXPECT_NEAR(run.cons, no_intervention.cons, 0.05);
  }
  EXPECT_LT(elapsed_seconds(start), 30.0);
}

// ---------------------------------------------------------------------------
// Criterion 6: perturbing 3 letters of every name collapses DETECT to <= 1.
TEST(Acceptance, C06_NamePerturbationRobustness) {
  const auto start = Clock::now();
  ExperimentConfig config;
  config.character_set_path = fixture_path("characters.jsonl");
  config.prompt_mode.kind = PromptModeConfig::Kind::PerturbedName;
  config.prompt_mode.perturb_letters = 3;
  config.corpora = {{"laion", fixture_path("corpus_laion_sample.jsonl")}};
  config.repetitions = 3;
  config.seeds = {0, 1, 2};
  const auto outcome = run_experiment(config);
  for (const auto& [detect, cons] : outcome.reports[0].per_repetition) {
    EXPECT_LE(detect, 1.0);
    (void)cons;
  }
  EXPECT_LT(elapsed_seconds(start), 10.0);
}

// ---------------------------------------------------------------------------
// Criterion 7: metric algebra property tests and the kappa oracle.
TEST(Acceptance, C07_MetricAlgebra) {
  const auto start = Clock::now();
  std::mt19937_64 rng(0x7777);

  // 10,000 randomized DETECT/CONS cases: bounds, permutation invariance, and
  // additivity over disjoint splits.
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 1 + rng_below(rng, 12);
    CharacterSet kb;
    std::map<std::string, DetectionVerdict> verdicts;
    std::map<std::string, ConsistencyScore> scores;
    double min_cons = 1.0, max_cons = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      CharacterRecord r;
      r.id = "c" + std::to_string(i);
      r.name = "C " + std::to_string(i);
      r.key_characteristic = "figure";
      kb.add(r);
      DetectionVerdict v;
      v.score = static_cast<int>(rng_below(rng, 2));
      if (v.score == 1) v.character_guess = r.name;
      verdicts[r.id] = v;
      const double c = static_cast<double>(rng_below(rng, 1001)) / 1000.0;
      scores[r.id] = {c, "s"};
      min_cons = std::min(min_cons, c);
      max_cons = std::max(max_cons, c);
    }
    const std::size_t detect = compute_detect(verdicts, kb);
    ASSERT_LE(detect, n);
    const double cons = compute_cons(scores, kb);
    ASSERT_GE(cons + 1e-12, min_cons);
    ASSERT_LE(cons - 1e-12, max_cons);

    // Additivity over a disjoint split.
    CharacterSet left, right;
    for (std::size_t i = 0; i < n; ++i) {
      CharacterRecord r;
      r.id = "c" + std::to_string(i);
      r.name = "C " + std::to_string(i);
      r.key_characteristic = "figure";
      if (i % 2 == 0) left.add(r); else right.add(r);
    }
    std::size_t split_sum = 0;
    if (left.size() > 0) split_sum += compute_detect(verdicts, left);
    if (right.size() > 0) split_sum += compute_detect(verdicts, right);
    ASSERT_EQ(split_sum, detect);
    // Permutation invariance: a reversed-insertion map yields the same sums.
    std::map<std::string, DetectionVerdict> reversed(verdicts.rbegin(),
                                                     verdicts.rend());
    ASSERT_EQ(compute_detect(reversed, kb), detect);
  }

  // Kappa against a brute-force confusion-table oracle, 1,000 random pairs.
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng_below(rng, 200);
    std::vector<int> a(n), b(n);
    for (std::size_t i = 0; i < n; ++i) {
      a[i] = static_cast<int>(rng_below(rng, 2));
      b[i] = static_cast<int>(rng_below(rng, 2));
    }
    long double table[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < n; ++i) table[a[i]][b[i]] += 1.0L;
    const long double nn = static_cast<long double>(n);
    const long double p_o = (table[0][0] + table[1][1]) / nn;
    const long double a1 = (table[1][0] + table[1][1]) / nn;
    const long double b1 = (table[0][1] + table[1][1]) / nn;
    const long double p_e = a1 * b1 + (1.0L - a1) * (1.0L - b1);
    const auto impl = cohen_kappa(a, b);
    if (p_e == 1.0L) {
      ASSERT_FALSE(impl.has_value());
    } else {
      ASSERT_TRUE(impl.has_value());
      ASSERT_NEAR(*impl, static_cast<double>((p_o - p_e) / (1.0L - p_e)), 1e-12);
    }
  }
  EXPECT_LT(elapsed_seconds(start), 10.0);
}

// ---------------------------------------------------------------------------
// Criterion 8: detector metric formulas and identities.
TEST(Acceptance, C08_DetectorMetricFormulas) {
  const auto start = Clock::now();

  IntentVerdict flagged;
  flagged.flagged = true;
  flagged.matched_character = "x";
  IntentVerdict clean;
  std::vector<std::pair<IntentVerdict, bool>> fixture;
  for (int i = 0; i < 2; ++i) fixture.push_back({flagged, true});   // tp
  fixture.push_back({clean, true});                                 // fn
  fixture.push_back({flagged, false});                              // fp
  for (int i = 0; i < 4; ++i) fixture.push_back({clean, false});    // tn
  const auto metrics = eval_detector(fixture);
  EXPECT_NEAR(metrics.accuracy, 0.75, 1e-12);
  ASSERT_TRUE(metrics.tpr.has_value());
  EXPECT_NEAR(*metrics.tpr, 0.6667, 5e-5);
  ASSERT_TRUE(metrics.fpr.has_value());
  EXPECT_NEAR(*metrics.fpr, 0.2, 1e-12);

  std::mt19937_64 rng(0x8888);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t tp = rng_below(rng, 20), fp = rng_below(rng, 20);
    const std::size_t tn = rng_below(rng, 20), fn = rng_below(rng, 20);
    if (tp + fp + tn + fn == 0) continue;
    std::vector<std::pair<IntentVerdict, bool>> verdicts;
    for (std::size_t i = 0; i < tp; ++i) verdicts.push_back({flagged, true});
    for (std::size_t i = 0; i < fp; ++i) verdicts.push_back({flagged, false});
    for (std::size_t i = 0; i < tn; ++i) verdicts.push_back({clean, false});
    for (std::size_t i = 0; i < fn; ++i) verdicts.push_back({clean, true});
    const auto m = eval_detector(verdicts);
    ASSERT_EQ(m.tp, tp);
    ASSERT_EQ(m.fp, fp);
    ASSERT_EQ(m.tn, tn);
    ASSERT_EQ(m.fn, fn);
    ASSERT_NEAR(m.accuracy,
                static_cast<double>(tp + tn) / static_cast<double>(tp + fp + tn + fn),
                1e-12);
    if (tp + fn > 0) {
      ASSERT_NEAR(*m.tpr, static_cast<double>(tp) / static_cast<double>(tp + fn),
                  1e-12);
    } else {
      ASSERT_FALSE(m.tpr.has_value());
    }
    if (fp + tn > 0) {
      ASSERT_NEAR(*m.fpr, static_cast<double>(fp) / static_cast<double>(fp + tn),
                  1e-12);
    } else {
      ASSERT_FALSE(m.fpr.has_value());
    }
  }
  EXPECT_LT(elapsed_seconds(start), 1.0);
}

// ---------------------------------------------------------------------------
// Criterion 9 (optional-live): detector accuracy on the shipped 400-prompt
// intent fixture with live embedder and LLM credentials.
TEST(Acceptance, C09_LiveDetectorAccuracy) {
  const std::string llm_url = env_or(kEnvLlmUrl);
  const std::string llm_key = env_or(kEnvLlmKey);
  const std::string embedder_url = env_or(kEnvEmbedderUrl);
  if (llm_url.empty() || llm_key.empty() || embedder_url.empty()) {
    GTEST_SKIP() << "live credentials not configured (" << kEnvLlmUrl << ", "
                 << kEnvLlmKey << ", " << kEnvEmbedderUrl << ")";
  }

  const CharacterSet kb = load_kb(fixture_path("characters.jsonl"));
  HttpEmbedder embedder(embedder_url,
                        env_or("COPYGUARD_EMBEDDER_MODEL", "text-embedding-3-small"));
  EmbeddingCache cache(embedder);
  const auto db = DescriptionIndex::build(kb, cache);
  HttpChatService chat(llm_url, env_or("COPYGUARD_LLM_MODEL", "gpt-4"));

  std::ifstream in(fixture_path("intent_eval.jsonl"));
  ASSERT_TRUE(in.is_open());
  std::vector<std::pair<IntentVerdict, bool>> retriever_verdicts;
  std::vector<std::pair<IntentVerdict, bool>> llm_verdicts;
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const std::string prompt = j.at("prompt").get<std::string>();
    const bool truth = j.at("is_copyright").get<bool>();
    retriever_verdicts.push_back({detect_retriever(prompt, db, cache), truth});
    llm_verdicts.push_back({detect_llm(prompt, chat), truth});
  }
  ASSERT_EQ(retriever_verdicts.size(), 400u);
  EXPECT_GE(eval_detector(retriever_verdicts).accuracy, 0.88);
  EXPECT_GE(eval_detector(llm_verdicts).accuracy, 0.90);
}

// ---------------------------------------------------------------------------
// Criterion 10: wire-protocol conformance against a recorded-response fake,
// including refusal handling and the first/middle/last video frame rule.
TEST(Acceptance, C10_ProtocolConformance) {
  const auto start = Clock::now();

  httplib::Server server;
  std::vector<nlohmann::json> responses = {
      {{"artifact_id", "art-ok"},
       {"media_type", "image/png"},
       {"data_base64", base64_encode("image-bytes")},
       {"refused", false}},
      {{"artifact_id", "art-refused"}, {"refused", true}},
      {{"artifact_id", "art-video"},
       {"media_type", "video/mp4"},
       {"data_base64", base64_encode("video-bytes")},
       {"refused", false}},
  };
  std::size_t cursor = 0;
  nlohmann::json seen_bodies = nlohmann::json::array();
  server.Post("/generate",
              [&](const httplib::Request& req, httplib::Response& res) {
                seen_bodies.push_back(nlohmann::json::parse(req.body));
                res.set_content(responses[cursor++].dump(), "application/json");
              });
  server.Get("/health", [](const httplib::Request&, httplib::Response& res) {
    res.set_content(R"({"status":"ok"})", "application/json");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread serving([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  HttpBackend backend("http://127.0.0.1:" + std::to_string(port), "recorded",
                      true, RetryPolicy{0, std::chrono::milliseconds(0)});
  EXPECT_TRUE(backend.healthy());

  GenerationRequest image_request;
  image_request.prompt = "a quiet meadow";
  const auto image = submit_generation(backend, image_request);
  EXPECT_EQ(image.artifact_id, "art-ok");
  EXPECT_EQ(image.media, "image-bytes");
  ASSERT_EQ(image.frames.size(), 1u);
  EXPECT_EQ(image.frames[0].frame_index, 0u);

  GenerationRequest refused_request;
  refused_request.prompt = "Mario";
  EXPECT_THROW(submit_generation(backend, refused_request), PolicyRefusal);

  GenerationRequest video_request;
  video_request.prompt = "a sailing ship";
  video_request.num_frames = 16;
  const auto video = submit_generation(backend, video_request);
  ASSERT_EQ(video.frames.size(), 3u);
  EXPECT_EQ(video.frames[0].frame_index, 0u);
  EXPECT_EQ(video.frames[1].frame_index, 8u);
  EXPECT_EQ(video.frames[2].frame_index, 15u);

  // The wire schema carried every request field.
  ASSERT_EQ(seen_bodies.size(), 3u);
  for (const auto& body : seen_bodies) {
    EXPECT_TRUE(body.contains("prompt"));
    EXPECT_TRUE(body.contains("negative_prompt"));
    EXPECT_TRUE(body.contains("seed"));
    EXPECT_TRUE(body.contains("num_steps"));
    EXPECT_TRUE(body.contains("guidance_scale"));
    EXPECT_TRUE(body.contains("num_frames"));
  }
  EXPECT_EQ(seen_bodies[2].at("num_frames").get<int>(), 16);

  server.stop();
  serving.join();
  EXPECT_LT(elapsed_seconds(start), 5.0);
}

}  // namespace
}  // namespace copyguard
