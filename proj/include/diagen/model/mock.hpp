#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "diagen/model/chat.hpp"

namespace diagen::model {

/// Returns scripted responses in order, whatever the input, and records every
/// call. Token counts are estimated as characters / 4.
class MockClient final : public ChatClient {
 public:
  MockClient(std::string name, std::vector<std::string> script)
      : name_(std::move(name)), script_(std::move(script)) {}

  Completion complete(std::span<const ChatMessage> messages) override;
  const std::string& name() const override { return name_; }

  std::vector<std::vector<ChatMessage>> calls() const;
  std::size_t call_count() const;
  std::size_t remaining() const;

 private:
  std::string name_;
  std::vector<std::string> script_;
  mutable std::mutex mutex_;
  std::size_t next_ = 0;
  std::vector<std::vector<ChatMessage>> calls_;
};

/// Scripted responses for every role of a pipeline run, loaded from JSON:
/// {"planner": [...], "coder": [...], "judges": {"name": [...]}, "qa": [...], "eval": [...]}
/// An entry may be {"text": "...", "repeat": n} for n copies.
struct MockScript {
  std::vector<std::string> planner;
  std::vector<std::string> coder;
  std::map<std::string, std::vector<std::string>> judges;
  std::vector<std::string> qa;
  std::vector<std::string> eval;
};

MockScript parse_mock_script(const std::string& json_text);
MockScript load_mock_script(const std::string& path);

std::uint64_t estimate_tokens(std::string_view text);

}  // namespace diagen::model
