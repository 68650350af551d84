#pragma once

#include <string>

namespace copyguard {

// Chat-completion service handle (LLM behind a wire protocol or a local
// deterministic substitute).
class ChatService {
 public:
  virtual ~ChatService() = default;
  virtual std::string complete(const std::string& system_prompt,
                               const std::string& user_prompt,
                               double temperature) = 0;
};

// Reference to one evaluated frame of a generation artifact. `inline_data`
// carries the media bytes when the backend returned them inline; otherwise
// `media_path` points at the stored file.
struct FrameRef {
  std::string artifact_id;
  std::size_t frame_index = 0;
  std::string media_type;
  std::string inline_data;
  std::string media_path;
};

// Vision judge: answers a text prompt about an image.
class VisionJudgeService {
 public:
  virtual ~VisionJudgeService() = default;
  virtual std::string judge(const FrameRef& frame, const std::string& prompt) = 0;
};

// VQA scorer: yes-probability for a yes/no question about an image.
class VqaService {
 public:
  virtual ~VqaService() = default;
  virtual double yes_probability(const FrameRef& frame,
                                 const std::string& question) = 0;
};

}  // namespace copyguard
