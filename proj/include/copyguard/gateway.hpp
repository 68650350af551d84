#pragma once

#include <map>
#include <memory>
#include <string>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "copyguard/backend.hpp"
#include "copyguard/character_kb.hpp"
#include "copyguard/common.hpp"
#include "copyguard/intent_detection.hpp"
#include "copyguard/mitigation.hpp"
#include "copyguard/services.hpp"

namespace copyguard {

// Moderation gateway in front of a generation backend: every request passes
// intent detection, then the selected mitigation policy, then generation.
class GatewayServer {
 public:
  struct Options {
    const CharacterSet* kb = nullptr;
    Backend* backend = nullptr;
    Embedder* embedder = nullptr;
    ChatService* rewriter = nullptr;
    ChatService* intent_llm = nullptr;  // optional ensemble member
    std::map<std::string, MitigationPolicy> policies;
    std::string default_policy_id;
    double retriever_threshold = kRetrieverThreshold;
    std::function<const std::map<RankMethod, RankedAnchorSet>*(const std::string&)>
        rankings_for;
  };

  explicit GatewayServer(Options options)
      : options_(validated(std::move(options))),
        description_index_(DescriptionIndex::build(*options_.kb,
                                                   *options_.embedder)) {
    register_routes();
  }

  // Blocks serving on the given port.
  void listen(const std::string& host, int port) { server_.listen(host, port); }

  // Binds an ephemeral port and returns it; serving continues until stop().
  int bind_any_port(const std::string& host) {
    return server_.bind_to_any_port(host);
  }
  void listen_after_bind() { server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  bool is_running() const { return server_.is_running(); }

  // Core of POST /v1/generate, exposed for in-process use.
  nlohmann::ordered_json handle_generate(const std::string& prompt,
                                         const std::string& policy_id,
                                         std::int64_t seed,
                                         std::size_t num_frames) {
    auto policy_it = options_.policies.find(policy_id);
    if (policy_it == options_.policies.end()) {
      throw ConfigError("unknown policy id '" + policy_id + "'");
    }
    MitigationPolicy policy = policy_it->second;

    IntentVerdict intent = options_.intent_llm
        ? detect_ensemble(prompt, description_index_, *options_.embedder,
                          options_.intent_llm, options_.retriever_threshold)
        : detect_retriever(prompt, description_index_, *options_.embedder,
                           options_.retriever_threshold);

    // Without an identified character the target-dependent parts cannot
    // apply; degrade to the character-independent remainder of the policy.
    if (!intent.matched_character) {
      if (policy.negative_base == NegativeBase::TargetName) {
        policy.negative_base = NegativeBase::None;
      }
      policy.negative_keywords.clear();
    }

    MitigationDeps deps;
    deps.rewriter = options_.rewriter;
    deps.kb = options_.kb;
    deps.rankings_for = options_.rankings_for;
    const MitigatedRequest mitigated = apply_policy(prompt, intent, policy, deps);

    GenerationRequest request;
    request.prompt = mitigated.final_prompt;
    request.negative_prompt = mitigated.negative_prompt;
    request.seed = seed;
    request.num_frames = num_frames;

    nlohmann::ordered_json response;
    response["policy_id"] = policy_id;
    nlohmann::ordered_json intent_json;
    intent_json["flagged"] = intent.flagged;
    intent_json["method"] = to_string(intent.method);
    if (intent.matched_character) {
      intent_json["matched_character"] = *intent.matched_character;
    }
    if (intent.similarity) intent_json["similarity"] = *intent.similarity;
    response["intent"] = intent_json;
    response["final_prompt"] = mitigated.final_prompt;
    response["negative_prompt"] = mitigated.negative_prompt;
    response["provenance"] = mitigated.provenance.to_json();
    try {
      const GenerationResult result =
          submit_generation(*options_.backend, request, nullptr);
      response["artifact_id"] = result.artifact_id;
      response["media_type"] = result.media_type;
      response["backend_tag"] = result.backend_tag;
      response["refused"] = false;
    } catch (const PolicyRefusal& e) {
      response["refused"] = true;
      response["refusal_reason"] = e.what();
    }
    return response;
  }

 private:
  static Options validated(Options options) {
    if (!options.kb || !options.backend || !options.embedder) {
      throw ConfigError("gateway needs a KB, a backend, and an embedder");
    }
    return options;
  }

  void register_routes() {
    server_.Get("/health", [](const httplib::Request&, httplib::Response& res) {
      res.set_content(R"({"status":"ok"})", "application/json");
    });

    server_.Get("/v1/policies",
                [this](const httplib::Request&, httplib::Response& res) {
                  nlohmann::ordered_json out = nlohmann::ordered_json::array();
                  for (const auto& [id, policy] : options_.policies) {
                    out.push_back({{"id", id}, {"policy", policy.to_json()}});
                  }
                  res.set_content(out.dump(2), "application/json");
                });

    server_.Post("/v1/generate", [this](const httplib::Request& req,
                                        httplib::Response& res) {
      nlohmann::json body;
      try {
        body = nlohmann::json::parse(req.body);
      } catch (const nlohmann::json::exception& e) {
        res.status = 400;
        res.set_content(nlohmann::json({{"error", e.what()}}).dump(),
                        "application/json");
        return;
      }
      try {
        const std::string prompt = body.at("prompt").get<std::string>();
        const std::string policy_id =
            body.value("policy_id", options_.default_policy_id);
        const auto response =
            handle_generate(prompt, policy_id,
                            body.value("seed", std::int64_t{0}),
                            body.value("num_frames", std::size_t{1}));
        res.set_content(response.dump(2), "application/json");
      } catch (const ConfigError& e) {
        res.status = 404;
        res.set_content(nlohmann::json({{"error", e.what()}}).dump(),
                        "application/json");
      } catch (const Error& e) {
        res.status = 422;
        res.set_content(nlohmann::json({{"error", e.what()}}).dump(),
                        "application/json");
      } catch (const std::exception& e) {
        res.status = 500;
        res.set_content(nlohmann::json({{"error", e.what()}}).dump(),
                        "application/json");
      }
    });
  }

  Options options_;
  DescriptionIndex description_index_;
  httplib::Server server_;
};

}  // namespace copyguard
