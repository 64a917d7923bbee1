#include "diagen/model/mock.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace diagen::model {

std::uint64_t estimate_tokens(std::string_view text) { return (text.size() + 3) / 4; }

Completion MockClient::complete(std::span<const ChatMessage> messages) {
  validate_messages(messages);
  std::lock_guard lock(mutex_);
  calls_.emplace_back(messages.begin(), messages.end());
  if (next_ >= script_.size()) {
    throw ClientError(ClientError::Kind::ScriptExhausted, "script exhausted");
  }
  Completion c;
  c.text = script_[next_++];
  for (const ChatMessage& m : messages) c.usage.input_tokens += estimate_tokens(m.text);
  c.usage.output_tokens = estimate_tokens(c.text);
  c.usage.requests = 1;
  return c;
}

std::vector<std::vector<ChatMessage>> MockClient::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

std::size_t MockClient::call_count() const {
  std::lock_guard lock(mutex_);
  return calls_.size();
}

std::size_t MockClient::remaining() const {
  std::lock_guard lock(mutex_);
  return script_.size() - next_;
}

MockScript parse_mock_script(const std::string& json_text) {
  const nlohmann::json j = nlohmann::json::parse(json_text);
  MockScript s;
  auto expand = [](const nlohmann::json& arr) {
    std::vector<std::string> out;
    for (const auto& item : arr) {
      if (item.is_string()) {
        out.push_back(item.get<std::string>());
      } else {
        const int n = item.value("repeat", 1);
        for (int i = 0; i < n; ++i) out.push_back(item.at("text").get<std::string>());
      }
    }
    return out;
  };
  auto list = [&](const char* key) {
    return j.contains(key) ? expand(j.at(key)) : std::vector<std::string>{};
  };
  s.planner = list("planner");
  s.coder = list("coder");
  s.qa = list("qa");
  s.eval = list("eval");
  if (j.contains("judges")) {
    for (const auto& [name, responses] : j.at("judges").items()) {
      s.judges[name] = expand(responses);
    }
  }
  return s;
}

MockScript load_mock_script(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mock script " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_mock_script(buf.str());
}

}  // namespace diagen::model
