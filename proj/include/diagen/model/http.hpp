#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "diagen/model/chat.hpp"

namespace diagen::model {

enum class ImageMode {
  DataUri,    // image parts as base64 data URIs
  InlineSvg,  // SVG source appended to the message text, for text-only endpoints
};

struct ModelEndpoint {
  std::string name;
  std::string base_url;  // e.g. https://openrouter.ai/api/v1
  std::string model;
  double temperature = 0.0;
  int max_tokens = 2048;
  std::string api_key_ref;  // environment variable holding the key; empty for none
  ImageMode image_mode = ImageMode::DataUri;

  /// Throws std::invalid_argument on a negative temperature or max_tokens <= 0.
  void validate() const;
};

struct HttpOptions {
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{1000};
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
  std::optional<std::string> audit_path;                 // JSONL, one line per attempt
  std::chrono::seconds timeout{120};
};

/// Client for `POST <base_url>/chat/completions`. Network errors, 5xx and 429
/// are retried with backoff base * 2^i; 401/403 and 413 fail immediately.
class HttpChatClient final : public ChatClient {
 public:
  HttpChatClient(ModelEndpoint endpoint, HttpOptions options = {});
  ~HttpChatClient() override;

  Completion complete(std::span<const ChatMessage> messages) override;
  const std::string& name() const override { return endpoint_.name; }

  /// The JSON request body for `messages` (exposed for tests).
  std::string request_body(std::span<const ChatMessage> messages) const;

 private:
  struct Impl;
  ModelEndpoint endpoint_;
  HttpOptions options_;
  std::unique_ptr<Impl> impl_;
};

std::string base64_encode(std::string_view bytes);

}  // namespace diagen::model
