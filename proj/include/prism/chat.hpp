#pragma once

#include <memory>
#include <string>
#include <vector>

#include "prism/calllog.hpp"

namespace prism::chat {

struct ChatBackendConfig {
  enum class Kind { http_chat, mock };
  Kind kind = Kind::mock;
  std::string endpoint;
  std::string model_id = "mock";
  double temperature = 0.0;
  int max_inflight = 4;
  std::string fixture_path;  // mock only; may be empty for synthesized replies
  int retry_attempts = 3;
  int retry_backoff_ms = 1000;
};

ChatBackendConfig::Kind parse_chat_kind(const std::string& name);

struct ChatRequest {
  // Which pipeline step issued the call: caption | label | validate | window |
  // merge | final | judge. Drives fixture lookup and call accounting.
  std::string purpose;
  std::string prompt;
  std::vector<std::string> image_paths;
  // Stable lookup key for mock fixtures (image hash, caption text, ...).
  // Falls back to the prompt hash when empty.
  std::string key_hint;
};

class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual std::string id() const = 0;
  // Completes the request or throws BackendError. Retries are handled inside
  // the backend per its config.
  virtual std::string complete(const ChatRequest& request) = 0;
  virtual CallLog* call_log() { return nullptr; }
};

std::unique_ptr<ChatBackend> make_chat_backend(const ChatBackendConfig& config,
                                               CallLog* log = nullptr);

// Disk cache keyed by (prompt hash, image hashes, model id) so re-runs and
// ablation sweeps reuse completions:
//   <cache_dir>/chat/<backend-id>/<sha256>.txt
class CachedChatBackend : public ChatBackend {
 public:
  CachedChatBackend(std::unique_ptr<ChatBackend> inner, std::string cache_dir);

  std::string id() const override;
  std::string complete(const ChatRequest& request) override;
  CallLog* call_log() override;

 private:
  std::unique_ptr<ChatBackend> inner_;
  std::string cache_dir_;
};

// sha256 hex of the rendered prompt; recorded next to captions so fixture
// drift is detectable.
std::string prompt_hash(const std::string& rendered_prompt);

}  // namespace prism::chat
