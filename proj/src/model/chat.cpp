#include "diagen/model/chat.hpp"

#include <fmt/format.h>

namespace diagen::model {

std::string_view to_string(Role role) {
  switch (role) {
    case Role::System: return "system";
    case Role::User: return "user";
    case Role::Assistant: return "assistant";
  }
  return "user";
}

void validate_messages(std::span<const ChatMessage> messages) {
  if (messages.empty()) {
    throw ClientError(ClientError::Kind::InvalidRequest, "a completion needs at least one message");
  }
  for (std::size_t i = 0; i < messages.size(); ++i) {
    if (!messages[i].images.empty() && messages[i].role != Role::User) {
      throw ClientError(ClientError::Kind::InvalidRequest,
                        fmt::format("message {} is a {} message with images; only user messages may carry images",
                                    i, to_string(messages[i].role)));
    }
  }
}

}  // namespace diagen::model
