#pragma once

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <thread>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "copyguard/backend.hpp"
#include "copyguard/common.hpp"
#include "copyguard/embedding.hpp"
#include "copyguard/services.hpp"

namespace copyguard {

inline constexpr const char* kEnvBackendUrl = "COPYGUARD_BACKEND_URL";
inline constexpr const char* kEnvLlmUrl = "COPYGUARD_LLM_URL";
inline constexpr const char* kEnvLlmKey = "COPYGUARD_LLM_KEY";
inline constexpr const char* kEnvEmbedderUrl = "COPYGUARD_EMBEDDER_URL";

inline std::string env_or(const char* name, const std::string& fallback = "") {
  const char* value = std::getenv(name);
  return value ? std::string(value) : fallback;
}

struct RetryPolicy {
  std::size_t retries = 2;
  std::chrono::milliseconds backoff{200};
};

namespace detail {

inline nlohmann::json post_json(httplib::Client& client, const std::string& path,
                                const nlohmann::json& body,
                                const httplib::Headers& headers,
                                const RetryPolicy& retry,
                                const char* what) {
  std::string error;
  for (std::size_t attempt = 0; attempt <= retry.retries; ++attempt) {
    if (attempt > 0 && retry.backoff.count() > 0) {
      std::this_thread::sleep_for(retry.backoff * attempt);
    }
    auto res = client.Post(path, headers, body.dump(), "application/json");
    if (!res) {
      error = "transport error (" + httplib::to_string(res.error()) + ")";
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      error = "status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw ServiceError(std::string(what) + ": status " +
                         std::to_string(res->status) + ": " + res->body);
    }
    try {
      return nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(std::string(what) + ": invalid JSON response: " + e.what());
    }
  }
  throw ServiceError(std::string(what) + ": " + error + " after " +
                     std::to_string(retry.retries + 1) + " attempts");
}

inline std::string frame_base64(const FrameRef& frame) {
  if (!frame.inline_data.empty()) return base64_encode(frame.inline_data);
  std::ifstream in(frame.media_path, std::ios::binary);
  if (!in) throw ServiceError("cannot read frame media: " + frame.media_path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return base64_encode(buffer.str());
}

}  // namespace detail

// OpenAI-compatible chat-completions client.
class HttpChatService : public ChatService {
 public:
  HttpChatService(std::string base_url, std::string model,
                  std::string api_key = env_or(kEnvLlmKey),
                  RetryPolicy retry = {})
      : client_(base_url), model_(std::move(model)),
        api_key_(std::move(api_key)), retry_(retry) {
    client_.set_read_timeout(120, 0);
  }

  std::string complete(const std::string& system_prompt,
                       const std::string& user_prompt,
                       double temperature) override {
    nlohmann::json messages = nlohmann::json::array();
    if (!system_prompt.empty()) {
      messages.push_back({{"role", "system"}, {"content", system_prompt}});
    }
    messages.push_back({{"role", "user"}, {"content", user_prompt}});
    const nlohmann::json body = {{"model", model_},
                                 {"messages", messages},
                                 {"temperature", temperature}};
    const auto response =
        detail::post_json(client_, "/v1/chat/completions", body, headers(),
                          retry_, "chat service");
    try {
      return response.at("choices").at(0).at("message").at("content")
          .get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(std::string("chat service: unexpected response shape: ") +
                         e.what());
    }
  }

 private:
  httplib::Headers headers() const {
    httplib::Headers h;
    if (!api_key_.empty()) h.emplace("Authorization", "Bearer " + api_key_);
    return h;
  }

  httplib::Client client_;
  std::string model_;
  std::string api_key_;
  RetryPolicy retry_;
};

// OpenAI-compatible embeddings client.
class HttpEmbedder : public Embedder {
 public:
  HttpEmbedder(std::string base_url, std::string model,
               std::string api_key = env_or(kEnvLlmKey), RetryPolicy retry = {})
      : client_(base_url), model_(std::move(model)),
        api_key_(std::move(api_key)), retry_(retry) {
    client_.set_read_timeout(120, 0);
  }

  std::string model_tag() const override { return "openai:" + model_; }

  EmbeddingVector embed(const std::string& text) override {
    const nlohmann::json body = {{"model", model_}, {"input", text}};
    httplib::Headers h;
    if (!api_key_.empty()) h.emplace("Authorization", "Bearer " + api_key_);
    const auto response = detail::post_json(client_, "/v1/embeddings", body, h,
                                            retry_, "embedding service");
    try {
      return EmbeddingVector(response.at("data").at(0).at("embedding")
                                 .get<std::vector<double>>());
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(std::string("embedding service: unexpected response "
                                     "shape: ") + e.what());
    }
  }

 private:
  httplib::Client client_;
  std::string model_;
  std::string api_key_;
  RetryPolicy retry_;
};

// Generation backend speaking the gateway wire protocol:
// POST /generate {prompt, negative_prompt, seed, num_steps, guidance_scale,
// num_frames} -> {artifact_id, media_type, data_base64 | path, refused}.
class HttpBackend : public Backend {
 public:
  HttpBackend(std::string base_url, std::string tag,
              bool supports_negative = true, RetryPolicy retry = {})
      : client_(base_url), tag_(std::move(tag)),
        supports_negative_(supports_negative), retry_(retry) {
    client_.set_read_timeout(600, 0);
  }

  std::string tag() const override { return tag_; }
  bool supports_negative_prompt() const override { return supports_negative_; }

  bool healthy() {
    auto res = client_.Get("/health");
    return res && res->status == 200;
  }

  GenerationResult generate(const GenerationRequest& request) override {
    nlohmann::json response;
    try {
      response = detail::post_json(client_, "/generate", request.to_json(), {},
                                   retry_, "generation backend");
    } catch (const ServiceError& e) {
      throw BackendError(e.what());
    }
    if (response.value("refused", false)) {
      throw PolicyRefusal("backend '" + tag_ + "' refused the request");
    }
    GenerationResult result;
    result.backend_tag = tag_;
    try {
      result.artifact_id = response.at("artifact_id").get<std::string>();
      result.media_type = response.value("media_type", "application/octet-stream");
      if (response.contains("data_base64")) {
        result.media = base64_decode(response.at("data_base64").get<std::string>());
      }
      const std::string path = response.value("path", std::string());
      for (std::size_t index : evaluation_frame_indices(request.num_frames)) {
        result.frames.push_back(
            {result.artifact_id, index, result.media_type, result.media, path});
      }
    } catch (const nlohmann::json::exception& e) {
      throw BackendError(std::string("generation backend: unexpected response "
                                     "shape: ") + e.what());
    }
    return result;
  }

 private:
  httplib::Client client_;
  std::string tag_;
  bool supports_negative_;
  RetryPolicy retry_;
};

// Vision judge client: POST /judge {image_base64, prompt} -> {text}.
class HttpVisionJudge : public VisionJudgeService {
 public:
  explicit HttpVisionJudge(std::string base_url, RetryPolicy retry = {})
      : client_(base_url), retry_(retry) {
    client_.set_read_timeout(120, 0);
  }

  std::string judge(const FrameRef& frame, const std::string& prompt) override {
    const nlohmann::json body = {{"image_base64", detail::frame_base64(frame)},
                                 {"prompt", prompt}};
    const auto response =
        detail::post_json(client_, "/judge", body, {}, retry_, "judge service");
    try {
      return response.at("text").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(std::string("judge service: unexpected response "
                                     "shape: ") + e.what());
    }
  }

 private:
  httplib::Client client_;
  RetryPolicy retry_;
};

// VQA client: POST /vqa {image_base64, question} -> {yes_probability}.
class HttpVqa : public VqaService {
 public:
  explicit HttpVqa(std::string base_url, RetryPolicy retry = {})
      : client_(base_url), retry_(retry) {
    client_.set_read_timeout(120, 0);
  }

  double yes_probability(const FrameRef& frame,
                         const std::string& question) override {
    const nlohmann::json body = {{"image_base64", detail::frame_base64(frame)},
                                 {"question", question}};
    const auto response =
        detail::post_json(client_, "/vqa", body, {}, retry_, "vqa service");
    try {
      return response.at("yes_probability").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw ServiceError(std::string("vqa service: unexpected response shape: ") +
                         e.what());
    }
  }

 private:
  httplib::Client client_;
  RetryPolicy retry_;
};

}  // namespace copyguard
