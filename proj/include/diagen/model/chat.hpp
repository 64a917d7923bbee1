#pragma once

#include <cstdint>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace diagen::model {

enum class Role { System, User, Assistant };

std::string_view to_string(Role role);

/// An attached image: media type plus raw bytes (SVG text for our diagrams).
struct ImagePart {
  std::string media_type = "image/svg+xml";
  std::string data;

  friend bool operator==(const ImagePart&, const ImagePart&) = default;
};

struct ChatMessage {
  Role role = Role::User;
  std::string text;
  std::vector<ImagePart> images;  // user messages only

  static ChatMessage system(std::string text) { return {Role::System, std::move(text), {}}; }
  static ChatMessage user(std::string text, std::vector<ImagePart> images = {}) {
    return {Role::User, std::move(text), std::move(images)};
  }
  static ChatMessage assistant(std::string text) { return {Role::Assistant, std::move(text), {}}; }

  friend bool operator==(const ChatMessage&, const ChatMessage&) = default;
};

struct UsageTally {
  std::uint64_t input_tokens = 0;
  std::uint64_t output_tokens = 0;
  std::uint64_t requests = 0;

  UsageTally& operator+=(const UsageTally& o) {
    input_tokens += o.input_tokens;
    output_tokens += o.output_tokens;
    requests += o.requests;
    return *this;
  }
  friend UsageTally operator+(UsageTally a, const UsageTally& b) { return a += b; }
  friend bool operator==(const UsageTally&, const UsageTally&) = default;
};

struct Completion {
  std::string text;
  UsageTally usage;
};

class ClientError : public std::runtime_error {
 public:
  enum class Kind { Network, Authentication, PayloadTooLarge, Protocol, ScriptExhausted, InvalidRequest };
  ClientError(Kind kind, const std::string& message) : std::runtime_error(message), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Throws ClientError(InvalidRequest) unless the list is non-empty and images
/// appear on user messages only.
void validate_messages(std::span<const ChatMessage> messages);

/// Chat-completion contract shared by the planner, coder, judge and QA roles.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual Completion complete(std::span<const ChatMessage> messages) = 0;
  virtual const std::string& name() const = 0;
};

/// Run-wide usage accumulator; the single owner every worker reports to.
class UsageLedger {
 public:
  void add(const UsageTally& delta) {
    std::lock_guard lock(mutex_);
    total_ += delta;
  }
  UsageTally total() const {
    std::lock_guard lock(mutex_);
    return total_;
  }

 private:
  mutable std::mutex mutex_;
  UsageTally total_;
};

/// `client.complete(messages)`, adding the usage to `ledger` when given.
inline Completion complete_recorded(ChatClient& client, std::span<const ChatMessage> messages,
                                    UsageLedger* ledger) {
  Completion c = client.complete(messages);
  if (ledger != nullptr) ledger->add(c.usage);
  return c;
}

}  // namespace diagen::model
