#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "copyguard/character_kb.hpp"
#include "copyguard/common.hpp"
#include "copyguard/services.hpp"
#include "copyguard/text.hpp"

namespace copyguard {

// Wire-level request to a generation backend.
struct GenerationRequest {
  std::string prompt;
  std::string negative_prompt;
  std::int64_t seed = 0;
  std::size_t num_steps = 50;
  double guidance_scale = 3.0;
  std::size_t num_frames = 1;  // 1 = image; 16 = video default

  void validate() const {
    if (num_steps < 1) throw ValidationError("num_steps must be >= 1");
    if (num_frames < 1) throw ValidationError("num_frames must be >= 1");
  }

  nlohmann::ordered_json to_json() const {
    return {{"prompt", prompt},
            {"negative_prompt", negative_prompt},
            {"seed", seed},
            {"num_steps", num_steps},
            {"guidance_scale", guidance_scale},
            {"num_frames", num_frames}};
  }

  static GenerationRequest from_json(const nlohmann::json& j) {
    GenerationRequest r;
    r.prompt = j.at("prompt").get<std::string>();
    r.negative_prompt = j.value("negative_prompt", std::string());
    r.seed = j.value("seed", std::int64_t{0});
    r.num_steps = j.value("num_steps", std::size_t{50});
    r.guidance_scale = j.value("guidance_scale", 3.0);
    r.num_frames = j.value("num_frames", std::size_t{1});
    r.validate();
    return r;
  }
};

// Present only on results from the mock backend.
struct MockMetadata {
  std::optional<std::string> detected_character;
  std::size_t matched_anchor_count = 0;
  // Key characteristic of the best pre-suppression candidate: what the
  // request was "about", even when suppression removed the identity.
  std::optional<std::string> subject_characteristic;
};

struct GenerationResult {
  std::string artifact_id;
  std::string media_type;
  std::string media;  // opaque bytes
  std::vector<FrameRef> frames;
  std::string backend_tag;
  std::optional<MockMetadata> mock_metadata;
};

// Frames evaluated per artifact: the single frame of an image, or the first,
// middle, and last frames of a video.
inline std::vector<std::size_t> evaluation_frame_indices(std::size_t num_frames) {
  if (num_frames == 0) throw ValidationError("num_frames must be >= 1");
  if (num_frames == 1) return {0};
  return {0, num_frames / 2, num_frames - 1};
}

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string tag() const = 0;
  virtual bool supports_negative_prompt() const { return true; }
  virtual GenerationResult generate(const GenerationRequest& request) = 0;
};

// Detection/suppression thresholds for the mock backend.
struct MockRules {
  std::size_t top_anchor_window = 20;
  std::size_t positive_threshold = 3;  // anchors in prompt to trigger
  std::size_t negative_threshold = 5;  // anchors in negative prompt to suppress
};

// Deterministic generation stand-in. A character is generated iff its name
// appears in the prompt as an exact whole-phrase match (misspellings never
// match) or at least positive_threshold of its top anchors do; it is
// suppressed when the negative prompt carries its name or at least
// negative_threshold of its top anchors. Among surviving candidates the one
// with most matches wins, a name hit counting above any anchor count; ties
// break lexicographically.
inline GenerationResult mock_generate(
    const GenerationRequest& request, const CharacterSet& kb,
    const std::map<std::string, std::vector<std::string>>& anchors,
    const MockRules& rules = {}) {
  request.validate();

  struct Candidate {
    const CharacterRecord* record;
    std::size_t anchor_hits;
    std::size_t score;
  };
  std::optional<Candidate> best_any;        // before suppression
  std::optional<Candidate> best_surviving;  // after suppression

  auto better = [](const Candidate& a, const Candidate& b) {
    if (a.score != b.score) return a.score > b.score;
    return ci_less(a.record->name, b.record->name);
  };

  for (const auto& record : kb) {
    const bool name_hit = contains_phrase(request.prompt, record.name);
    std::size_t anchor_hits = 0;
    auto it = anchors.find(record.id);
    if (it != anchors.end()) {
      const std::size_t window = std::min(rules.top_anchor_window, it->second.size());
      for (std::size_t i = 0; i < window; ++i) {
        if (contains_phrase(request.prompt, it->second[i])) ++anchor_hits;
      }
    }
    if (!name_hit && anchor_hits < rules.positive_threshold) continue;

    // A name hit outranks any achievable anchor count.
    const std::size_t score =
        anchor_hits + (name_hit ? rules.top_anchor_window + 1 : 0);
    const Candidate candidate{&record, anchor_hits, score};
    if (!best_any || better(candidate, *best_any)) best_any = candidate;

    bool suppressed = contains_phrase(request.negative_prompt, record.name);
    if (!suppressed && it != anchors.end()) {
      std::size_t negative_hits = 0;
      const std::size_t window = std::min(rules.top_anchor_window, it->second.size());
      for (std::size_t i = 0; i < window && !suppressed; ++i) {
        if (contains_phrase(request.negative_prompt, it->second[i])) {
          if (++negative_hits >= rules.negative_threshold) suppressed = true;
        }
      }
    }
    if (!suppressed && (!best_surviving || better(candidate, *best_surviving))) {
      best_surviving = candidate;
    }
  }

  GenerationResult result;
  result.backend_tag = "mock";
  result.media_type = "application/json";

  MockMetadata meta;
  if (best_surviving) {
    meta.detected_character = best_surviving->record->name;
    meta.matched_anchor_count = best_surviving->anchor_hits;
  }
  if (best_any) {
    meta.subject_characteristic = best_any->record->key_characteristic;
  }
  result.mock_metadata = meta;

  nlohmann::ordered_json media;
  media["final_prompt"] = request.prompt;
  media["negative_prompt"] = request.negative_prompt;
  media["seed"] = request.seed;
  media["detected_character"] =
      meta.detected_character ? nlohmann::json(*meta.detected_character)
                              : nlohmann::json(nullptr);
  media["subject_characteristic"] =
      meta.subject_characteristic ? nlohmann::json(*meta.subject_characteristic)
                                  : nlohmann::json(nullptr);
  media["matched_anchor_count"] = meta.matched_anchor_count;
  media["num_frames"] = request.num_frames;
  result.media = media.dump();

  std::uint64_t h = fnv1a64(request.prompt);
  h = fnv1a64(request.negative_prompt, h);
  h = fnv1a64_mix(static_cast<std::uint64_t>(request.seed), h);
  h = fnv1a64_mix(request.num_steps, h);
  h = fnv1a64_mix(request.num_frames, h);
  result.artifact_id = "mock-" + to_hex(h);

  for (std::size_t index : evaluation_frame_indices(request.num_frames)) {
    result.frames.push_back(
        {result.artifact_id, index, result.media_type, result.media, ""});
  }
  return result;
}

class MockBackend : public Backend {
 public:
  MockBackend(const CharacterSet& kb,
              std::map<std::string, std::vector<std::string>> anchors,
              MockRules rules = {})
      : kb_(&kb), anchors_(std::move(anchors)), rules_(rules) {}

  std::string tag() const override { return "mock"; }

  GenerationResult generate(const GenerationRequest& request) override {
    return mock_generate(request, *kb_, anchors_, rules_);
  }

  const MockRules& rules() const { return rules_; }

 private:
  const CharacterSet* kb_;
  std::map<std::string, std::vector<std::string>> anchors_;
  MockRules rules_;
};

// Content-addressed artifact directory; media files are named by artifact id.
class ArtifactStore {
 public:
  explicit ArtifactStore(std::filesystem::path dir) : dir_(std::move(dir)) {
    std::filesystem::create_directories(dir_);
  }

  const std::filesystem::path& dir() const { return dir_; }

  std::filesystem::path save(const GenerationResult& result) const {
    const std::filesystem::path media_path = dir_ / (result.artifact_id + ".bin");
    // Content-addressed: an existing artifact already has these bytes.
    if (std::filesystem::exists(media_path)) return media_path;
    {
      std::ofstream out(media_path, std::ios::binary);
      if (!out) throw Error("cannot write artifact: " + media_path.string());
      out.write(result.media.data(),
                static_cast<std::streamsize>(result.media.size()));
    }
    nlohmann::ordered_json meta;
    meta["artifact_id"] = result.artifact_id;
    meta["media_type"] = result.media_type;
    meta["backend_tag"] = result.backend_tag;
    nlohmann::ordered_json frames = nlohmann::ordered_json::array();
    for (const auto& frame : result.frames) frames.push_back(frame.frame_index);
    meta["frames"] = frames;
    std::ofstream meta_out(dir_ / (result.artifact_id + ".json"));
    meta_out << meta.dump(2) << '\n';
    return media_path;
  }

 private:
  std::filesystem::path dir_;
};

// Sends a request to a backend and persists the result. Frame extraction
// follows the first/middle/last rule; PolicyRefusal and BackendError
// propagate to the caller.
inline GenerationResult submit_generation(Backend& backend,
                                          const GenerationRequest& request,
                                          ArtifactStore* store = nullptr) {
  request.validate();
  GenerationResult result = backend.generate(request);
  if (result.frames.empty()) {
    const auto indices = evaluation_frame_indices(request.num_frames);
    for (std::size_t index : indices) {
      result.frames.push_back(
          {result.artifact_id, index, result.media_type, result.media, ""});
    }
  }
  if (store) store->save(result);
  return result;
}

}  // namespace copyguard
