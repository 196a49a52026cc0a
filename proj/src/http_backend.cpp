#include "sac3/http_backend.hpp"

#include <chrono>
#include <thread>

#include <nlohmann/json.hpp>

#include "httplib.h"

namespace sac3 {

namespace {

bool retryable_status(int status) {
  return status == 429 || (status >= 500 && status < 600);
}

}  // namespace

HttpBackend::HttpBackend(HttpBackendOptions options) : options_(std::move(options)) {
  std::string url = options_.base_url;
  if (url.empty()) throw ConfigError("http backend needs a base URL");
  while (!url.empty() && url.back() == '/') url.pop_back();

  const auto scheme_end = url.find("://");
  const std::size_t host_begin = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_begin = url.find('/', host_begin);
  if (path_begin == std::string::npos) {
    host_ = url;
  } else {
    host_ = url.substr(0, path_begin);
    path_base_ = url.substr(path_begin);
  }
  if (options_.max_attempts < 1) options_.max_attempts = 1;
}

std::string parse_chat_completion_body(const std::string& body) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(body);
  } catch (const nlohmann::json::exception& ex) {
    throw BackendError("malformed completion body: " + std::string(ex.what()));
  }
  if (!j.contains("choices") || !j.at("choices").is_array() ||
      j.at("choices").empty()) {
    throw BackendError("completion body has no choices");
  }
  const auto& choice = j.at("choices").at(0);
  if (!choice.contains("message") || !choice.at("message").contains("content") ||
      !choice.at("message").at("content").is_string()) {
    throw BackendError("completion body has no message content");
  }
  return choice.at("message").at("content").get<std::string>();
}

std::string HttpBackend::complete(const CompletionRequest& request) {
  if (request.prompt.empty()) throw BackendError("empty prompt");

  const nlohmann::json body{
      {"model", request.model},
      {"messages",
       nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
      {"temperature", request.temperature},
      {"max_tokens", request.max_tokens},
  };
  const std::string payload = body.dump();
  const std::string path = path_base_ + "/chat/completions";

  std::string last_error;
  for (int attempt = 0; attempt < options_.max_attempts; ++attempt) {
    if (attempt > 0) {
      const auto delay = std::chrono::milliseconds(
          static_cast<long long>(options_.retry_base_delay_ms) << (attempt - 1));
      std::this_thread::sleep_for(delay);
    }

    httplib::Client client(host_);
    client.set_connection_timeout(options_.timeout_sec, 0);
    client.set_read_timeout(options_.timeout_sec, 0);
    httplib::Headers headers;
    if (!options_.api_key.empty()) {
      headers.emplace("Authorization", "Bearer " + options_.api_key);
    }

    calls_.fetch_add(1);
    auto res = client.Post(path, headers, payload, "application/json");
    if (!res) {
      last_error = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status >= 200 && res->status < 300) {
      return parse_chat_completion_body(res->body);
    }
    const std::string detail =
        "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200);
    if (!retryable_status(res->status)) {
      throw BackendError(detail);
    }
    last_error = detail;
  }
  throw BackendError("retry budget exhausted; last error: " + last_error);
}

}  // namespace sac3
