#include "diagen/model/http.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <httplib.h>
#include <json.hpp>
#include <openssl/evp.h>
#include <spdlog/spdlog.h>

namespace diagen::model {

using nlohmann::json;

void ModelEndpoint::validate() const {
  if (temperature < 0.0) {
    throw std::invalid_argument(fmt::format("endpoint {}: temperature must be >= 0", name));
  }
  if (max_tokens <= 0) {
    throw std::invalid_argument(fmt::format("endpoint {}: max_tokens must be > 0", name));
  }
  if (base_url.find("://") == std::string::npos) {
    throw std::invalid_argument(fmt::format("endpoint {}: base_url needs a scheme", name));
  }
}

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  const int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                                reinterpret_cast<const unsigned char*>(bytes.data()),
                                static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

struct HttpChatClient::Impl {
  std::string scheme_host_port;
  std::string path;
};

namespace {
// Clients may share one audit file.
std::mutex audit_mutex;
}  // namespace

HttpChatClient::HttpChatClient(ModelEndpoint endpoint, HttpOptions options)
    : endpoint_(std::move(endpoint)), options_(std::move(options)), impl_(std::make_unique<Impl>()) {
  endpoint_.validate();
  const std::string& url = endpoint_.base_url;
  const std::size_t scheme_end = url.find("://") + 3;
  const std::size_t path_start = url.find('/', scheme_end);
  impl_->scheme_host_port = url.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  impl_->path = prefix + "/chat/completions";
  if (!options_.sleep) {
    options_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
  }
}

HttpChatClient::~HttpChatClient() = default;

std::string HttpChatClient::request_body(std::span<const ChatMessage> messages) const {
  json msgs = json::array();
  for (const ChatMessage& m : messages) {
    json entry{{"role", std::string(to_string(m.role))}};
    if (m.images.empty()) {
      entry["content"] = m.text;
    } else if (endpoint_.image_mode == ImageMode::InlineSvg) {
      std::string text = m.text;
      for (const ImagePart& img : m.images) {
        text += fmt::format("\n\n[attached image, {}]\n{}", img.media_type, img.data);
      }
      entry["content"] = text;
    } else {
      json parts = json::array();
      parts.push_back({{"type", "text"}, {"text", m.text}});
      for (const ImagePart& img : m.images) {
        parts.push_back({{"type", "image_url"},
                         {"image_url",
                          {{"url", fmt::format("data:{};base64,{}", img.media_type, base64_encode(img.data))}}}});
      }
      entry["content"] = parts;
    }
    msgs.push_back(std::move(entry));
  }
  json body{{"model", endpoint_.model},
            {"temperature", endpoint_.temperature},
            {"max_tokens", endpoint_.max_tokens},
            {"messages", msgs}};
  return body.dump();
}

Completion HttpChatClient::complete(std::span<const ChatMessage> messages) {
  validate_messages(messages);
  const std::string body = request_body(messages);

  httplib::Headers headers;
  if (!endpoint_.api_key_ref.empty()) {
    const char* key = std::getenv(endpoint_.api_key_ref.c_str());
    if (key == nullptr || *key == '\0') {
      throw ClientError(ClientError::Kind::Authentication,
                        fmt::format("endpoint {}: environment variable {} is not set", endpoint_.name,
                                    endpoint_.api_key_ref));
    }
    headers.emplace("Authorization", fmt::format("Bearer {}", key));
  }

  auto audit = [&](int status, const std::string& response) {
    if (!options_.audit_path) return;
    json line{{"endpoint", endpoint_.name},
              {"request", json::parse(body)},
              {"status", status},
              {"response", response}};
    std::lock_guard lock(audit_mutex);
    std::ofstream out(*options_.audit_path, std::ios::app);
    out << line.dump() << '\n';
  };

  Completion result;
  for (int attempt = 0;; ++attempt) {
    httplib::Client cli(impl_->scheme_host_port);
    cli.set_connection_timeout(options_.timeout);
    cli.set_read_timeout(options_.timeout);
    cli.set_write_timeout(options_.timeout);
    ++result.usage.requests;
    httplib::Result res = cli.Post(impl_->path, headers, body, "application/json");

    std::string failure;
    if (!res) {
      failure = fmt::format("network error: {}", httplib::to_string(res.error()));
      audit(0, failure);
    } else {
      audit(res->status, res->body);
      const int status = res->status;
      if (status == 200) {
        try {
          const json reply = json::parse(res->body);
          result.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
          if (reply.contains("usage")) {
            const json& u = reply.at("usage");
            result.usage.input_tokens += u.value("prompt_tokens", std::uint64_t{0});
            result.usage.output_tokens += u.value("completion_tokens", std::uint64_t{0});
          }
        } catch (const json::exception& e) {
          throw ClientError(ClientError::Kind::Protocol,
                            fmt::format("endpoint {}: malformed response: {}", endpoint_.name, e.what()));
        }
        return result;
      }
      if (status == 401 || status == 403) {
        throw ClientError(ClientError::Kind::Authentication,
                          fmt::format("endpoint {}: authentication failed (HTTP {})", endpoint_.name, status));
      }
      if (status == 413) {
        throw ClientError(ClientError::Kind::PayloadTooLarge,
                          fmt::format("endpoint {}: payload too large", endpoint_.name));
      }
      if (status != 429 && status < 500) {
        throw ClientError(ClientError::Kind::Protocol,
                          fmt::format("endpoint {}: HTTP {}: {}", endpoint_.name, status,
                                      res->body.substr(0, 200)));
      }
      failure = fmt::format("HTTP {}", status);
    }

    if (attempt >= options_.max_retries) {
      throw ClientError(ClientError::Kind::Network,
                        fmt::format("endpoint {}: {} after {} retries", endpoint_.name, failure, attempt));
    }
    const auto delay = options_.backoff_base * (1 << attempt);
    spdlog::warn("endpoint {}: {}; retrying in {} ms", endpoint_.name, failure, delay.count());
    options_.sleep(delay);
  }
}

}  // namespace diagen::model
