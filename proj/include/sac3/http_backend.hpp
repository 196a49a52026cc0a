#pragma once

#include <atomic>
#include <cstdint>
#include <string>

#include "sac3/backend.hpp"

namespace sac3 {

struct HttpBackendOptions {
  std::string base_url;  // e.g. "https://api.openai.com/v1" or "http://host:port/v1"
  std::string api_key;   // sent as a bearer token when non-empty
  int max_attempts = 3;  // total attempts per request
  int retry_base_delay_ms = 250;  // doubled per retry
  int timeout_sec = 120;
};

// OpenAI-compatible chat-completions client: POST {base_url}/chat/completions
// with a single user message, answer read from choices[0].message.content.
// Transport failures and HTTP 429/5xx are retried with exponential backoff;
// any other 4xx is terminal.
class HttpBackend : public Backend {
public:
  explicit HttpBackend(HttpBackendOptions options);

  std::string complete(const CompletionRequest& request) override;
  std::uint64_t calls() const override { return calls_.load(); }

private:
  HttpBackendOptions options_;
  std::string host_;       // scheme://host[:port]
  std::string path_base_;  // path prefix of base_url, without trailing slash
  std::atomic<std::uint64_t> calls_{0};
};

// Extracts the assistant text from a chat-completions response body.
// Throws BackendError when the body is not valid JSON or lacks
// choices[0].message.content.
std::string parse_chat_completion_body(const std::string& body);

}  // namespace sac3
