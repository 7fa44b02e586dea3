#include <cstdlib>

#include <httplib.h>

#include "unipar/error.hpp"
#include "unipar/llm.hpp"

namespace unipar {

using nlohmann::json;

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) {
    if (const char* base = std::getenv("UNIPAR_API_BASE")) config_.base_url = base;
  }
  if (config_.base_url.empty()) throw ConfigError("HTTP backend needs a base URL (set UNIPAR_API_BASE)");
  if (const char* key = std::getenv("UNIPAR_API_KEY")) api_key_ = key;
}

json HttpBackend::request_body(const PromptBundle& bundle, const GenerationConfig& config) const {
  json messages = json::array();
  if (!bundle.system.empty()) messages.push_back({{"role", "system"}, {"content", bundle.system}});
  for (const Turn& turn : bundle.turns) {
    messages.push_back(
        {{"role", turn.role == Turn::Role::instruction ? "user" : "assistant"}, {"content", turn.text}});
  }
  json body{{"messages", messages},
            {"temperature", config.temperature},
            {"top_p", config.top_p},
            {"max_tokens", config.max_tokens}};
  const std::string& model = config_.model.empty() ? config.model_id : config_.model;
  if (!model.empty()) body["model"] = model;
  return body;
}

std::string HttpBackend::chat(const PromptBundle& bundle, const GenerationConfig& config, const CallContext&) {
  httplib::Client client(config_.base_url);
  const auto timeout = config_.timeout.count();
  client.set_connection_timeout(30, 0);
  client.set_read_timeout(timeout, 0);
  client.set_write_timeout(timeout, 0);

  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace(config_.auth_header, config_.auth_prefix + api_key_);

  const std::string payload = request_body(bundle, config).dump(-1, ' ', false, json::error_handler_t::replace);
  auto res = client.Post(config_.path, headers, payload, "application/json");
  if (!res) {
    throw LlmError(LlmError::Kind::Transport, "request to " + config_.base_url + config_.path +
                                                  " failed: " + httplib::to_string(res.error()));
  }
  if (res->status == 429) throw LlmError(LlmError::Kind::RateLimited, "rate limited (HTTP 429)");
  if (res->status >= 500) {
    throw LlmError(LlmError::Kind::Transport, "server error (HTTP " + std::to_string(res->status) + ")");
  }
  if (res->status != 200) {
    // Providers report oversized prompts as 400 with a context-length code.
    if (res->status == 400 && res->body.find("context_length") != std::string::npos) {
      throw LlmError(LlmError::Kind::ContextOverflow, "provider rejected prompt: context length exceeded");
    }
    throw LlmError(LlmError::Kind::BadResponse,
                   "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 512));
  }

  const json doc = json::parse(res->body, nullptr, false);
  if (doc.is_discarded()) throw LlmError(LlmError::Kind::BadResponse, "response body is not JSON");
  const json* content = nullptr;
  if (doc.contains("choices") && doc["choices"].is_array() && !doc["choices"].empty()) {
    const json& choice = doc["choices"][0];
    if (choice.contains("message") && choice["message"].contains("content")) {
      content = &choice["message"]["content"];
    } else if (choice.contains("text")) {
      content = &choice["text"];
    }
  }
  if (content == nullptr || content->is_null()) {
    throw LlmError(LlmError::Kind::EmptyCompletion, "response has no message content");
  }
  if (!content->is_string()) throw LlmError(LlmError::Kind::BadResponse, "message content is not a string");
  return content->get<std::string>();
}

}  // namespace unipar
