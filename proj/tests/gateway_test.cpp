#include "copyguard/gateway.hpp"

#include <gtest/gtest.h>

#include <thread>

#include "copyguard/lexicon_embedder.hpp"
#include "copyguard/mock_services.hpp"

namespace copyguard {
namespace {

struct GatewayFixture {
  GatewayFixture() {
    {
      CharacterRecord r;
      r.id = "mario";
      r.name = "Mario";
      r.key_characteristic = "videogame plumber";
      r.descriptions = {
          "A cheerful videogame plumber with a bushy mustache, a bright red "
          "hat, and blue overalls, always jumping across mushroom worlds."};
      r.keyword_candidates = {"videogame", "plumber", "red hat", "mustache",
                              "overalls",  "mushroom", "jumping", "pipes"};
      kb.add(r);
    }
    embedder = std::make_unique<KbLexiconEmbedder>(kb);
    rewriter = std::make_unique<KbRewriteService>(kb);
    anchors["mario"] = kb.records()[0].keyword_candidates;
    backend = std::make_unique<MockBackend>(kb, anchors);

    RankedAnchorSet cooc;
    cooc.character_id = "mario";
    cooc.method = RankMethod::cooccurrence("laion");
    double score = 10;
    for (const auto& kw : kb.records()[0].keyword_candidates) {
      cooc.entries.push_back({kw, score--});
    }
    rankings["mario"][cooc.method] = cooc;

    MitigationPolicy none;
    MitigationPolicy full;
    full.rewrite = true;
    full.negative_base = NegativeBase::TargetName;
    full.negative_keywords = {{RankMethod::cooccurrence("laion"), 5}};

    GatewayServer::Options options;
    options.kb = &kb;
    options.backend = backend.get();
    options.embedder = embedder.get();
    options.rewriter = rewriter.get();
    options.policies = {{"none", none}, {"full", full}};
    options.default_policy_id = "full";
    options.rankings_for =
        [this](const std::string& id)
        -> const std::map<RankMethod, RankedAnchorSet>* {
      auto it = rankings.find(id);
      return it == rankings.end() ? nullptr : &it->second;
    };
    server = std::make_unique<GatewayServer>(options);
  }

  CharacterSet kb;
  std::unique_ptr<KbLexiconEmbedder> embedder;
  std::unique_ptr<KbRewriteService> rewriter;
  std::map<std::string, std::vector<std::string>> anchors;
  std::unique_ptr<MockBackend> backend;
  std::map<std::string, std::map<RankMethod, RankedAnchorSet>> rankings;
  std::unique_ptr<GatewayServer> server;
};

TEST(Gateway, HandleGenerateAppliesFullPipeline) {
  GatewayFixture fx;
  const auto response = fx.server->handle_generate(
      "A cheerful videogame plumber with a bushy mustache, a bright red hat, "
      "and blue overalls, always jumping across mushroom worlds.",
      "full", 0, 1);
  // The retriever recognizes the description and the policy suppresses.
  EXPECT_TRUE(response.at("intent").at("flagged").get<bool>());
  EXPECT_EQ(response.at("intent").at("matched_character").get<std::string>(),
            "mario");
  const std::string negative =
      response.at("negative_prompt").get<std::string>();
  EXPECT_NE(negative.find("Mario"), std::string::npos);
  EXPECT_FALSE(response.at("refused").get<bool>());
}

TEST(Gateway, UnflaggedPromptDegradesToCharacterIndependentPolicy) {
  GatewayFixture fx;
  const auto response = fx.server->handle_generate(
      "a quiet mountain lake at dawn", "full", 0, 1);
  EXPECT_FALSE(response.at("intent").at("flagged").get<bool>());
  EXPECT_EQ(response.at("negative_prompt").get<std::string>(), "");
  EXPECT_EQ(response.at("final_prompt").get<std::string>(),
            "a quiet mountain lake at dawn");
}

TEST(Gateway, UnknownPolicyIdIsConfigError) {
  GatewayFixture fx;
  EXPECT_THROW(fx.server->handle_generate("prompt", "nope", 0, 1), ConfigError);
}

TEST(Gateway, BackendRefusalIsReportedNotFatal) {
  GatewayFixture fx;
  class RefusingBackend : public Backend {
   public:
    std::string tag() const override { return "refusing"; }
    GenerationResult generate(const GenerationRequest&) override {
      throw PolicyRefusal("content policy");
    }
  } refusing;

  GatewayServer::Options options;
  options.kb = &fx.kb;
  options.backend = &refusing;
  options.embedder = fx.embedder.get();
  options.rewriter = fx.rewriter.get();
  options.policies = {{"none", MitigationPolicy{}}};
  options.default_policy_id = "none";
  GatewayServer server(std::move(options));

  const auto response = server.handle_generate("a quiet lake", "none", 0, 1);
  EXPECT_TRUE(response.at("refused").get<bool>());
  EXPECT_TRUE(response.contains("refusal_reason"));
  EXPECT_FALSE(response.contains("artifact_id"));
}

TEST(Gateway, HttpEndpoints) {
  GatewayFixture fx;
  const int port = fx.server->bind_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread serving([&] { fx.server->listen_after_bind(); });

  httplib::Client client("127.0.0.1", port);
  client.set_read_timeout(10, 0);
  for (int i = 0; i < 100; ++i) {
    if (fx.server->is_running()) break;
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }

  auto health = client.Get("/health");
  ASSERT_TRUE(health);
  EXPECT_EQ(health->status, 200);
  EXPECT_EQ(nlohmann::json::parse(health->body).at("status"), "ok");

  auto policies = client.Get("/v1/policies");
  ASSERT_TRUE(policies);
  const auto list = nlohmann::json::parse(policies->body);
  ASSERT_EQ(list.size(), 2u);
  std::vector<std::string> ids = {list[0].at("id"), list[1].at("id")};
  EXPECT_NE(std::find(ids.begin(), ids.end(), "full"), ids.end());

  const nlohmann::json request = {{"prompt", "Mario"}, {"policy_id", "full"}};
  auto generate = client.Post("/v1/generate", request.dump(), "application/json");
  ASSERT_TRUE(generate);
  EXPECT_EQ(generate->status, 200);
  const auto body = nlohmann::json::parse(generate->body);
  EXPECT_FALSE(contains_ci(body.at("final_prompt").get<std::string>(), "Mario"));
  EXPECT_TRUE(body.contains("provenance"));
  EXPECT_EQ(body.at("provenance").at("original_prompt"), "Mario");

  auto bad = client.Post("/v1/generate", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);

  const nlohmann::json unknown = {{"prompt", "x"}, {"policy_id", "nope"}};
  auto missing = client.Post("/v1/generate", unknown.dump(), "application/json");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);

  fx.server->stop();
  serving.join();
}

}  // namespace
}  // namespace copyguard
