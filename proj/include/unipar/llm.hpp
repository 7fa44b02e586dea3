#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "unipar/prompting.hpp"
#include "unipar/tokens.hpp"

namespace unipar {

struct GenerationConfig {
  double temperature = 0.2;
  double top_p = 0.9;
  int max_tokens = 15000;
  std::string model_id;

  // Throws ConfigError on out-of-range values.
  void validate() const;
  friend bool operator==(const GenerationConfig&, const GenerationConfig&) = default;
};

nlohmann::json to_json(const GenerationConfig& config);
GenerationConfig generation_config_from_json(const nlohmann::json& j);

// Pipeline stage a completion belongs to. Ordered as the stages occur.
enum class Stage { translate, compile_repair, transplant_repair, exec_repair };

const char* to_string(Stage stage);
std::optional<Stage> parse_stage(std::string_view text);

// Identifies a call for scripted backends and the completion log.
struct CallContext {
  std::string task_id;
  Stage stage = Stage::translate;
  int round = 0;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string provider() const = 0;
  // Context window in tokens used for the overflow guard.
  virtual std::size_t context_tokens() const { return std::numeric_limits<std::size_t>::max() / 2; }
  // One attempt; throws LlmError. Must be safe to call concurrently.
  virtual std::string chat(const PromptBundle& bundle, const GenerationConfig& config, const CallContext& ctx) = 0;
};

struct ScriptedBehavior {
  std::string task_id;
  Stage stage = Stage::translate;
  int round = 0;
  std::string response;
};

// Deterministic backend answering from a script keyed by (task, stage, round).
class MockBackend : public Backend {
 public:
  enum class MissPolicy { error, echo_input };

  explicit MockBackend(std::vector<ScriptedBehavior> script, MissPolicy policy = MissPolicy::error);
  // JSONL of {"task_id", "stage", "round", "response"}; duplicate keys are a ConfigError.
  static MockBackend from_file(const std::filesystem::path& path, MissPolicy policy = MissPolicy::error);

  std::string provider() const override { return "mock"; }
  std::size_t context_tokens() const override { return context_tokens_; }
  void set_context_tokens(std::size_t tokens) { context_tokens_ = tokens; }
  std::string chat(const PromptBundle& bundle, const GenerationConfig& config, const CallContext& ctx) override;

  std::size_t calls() const;

 private:
  using Key = std::tuple<std::string, Stage, int>;
  std::map<Key, std::string> script_;
  MissPolicy policy_;
  std::size_t context_tokens_ = Backend::context_tokens();
  mutable std::mutex mutex_;
  std::size_t calls_ = 0;
};

// Reads a JSONL script; malformed records are a ConfigError.
std::vector<ScriptedBehavior> read_script(const std::filesystem::path& path);
void write_script(const std::filesystem::path& path, const std::vector<ScriptedBehavior>& script);

struct HttpBackendConfig {
  std::string base_url;  // scheme://host[:port]; falls back to UNIPAR_API_BASE
  std::string path = "/v1/chat/completions";
  std::string model;     // request "model" field; overrides GenerationConfig::model_id when set
  std::string auth_header = "Authorization";
  std::string auth_prefix = "Bearer ";
  std::size_t context_tokens = 128000;
  std::chrono::seconds timeout{600};
};

// OpenAI-compatible chat-completions adapter. The API key is read from
// UNIPAR_API_KEY at construction; it is never taken from config files.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  std::string provider() const override { return "http:" + config_.base_url; }
  std::size_t context_tokens() const override { return config_.context_tokens; }
  std::string chat(const PromptBundle& bundle, const GenerationConfig& config, const CallContext& ctx) override;

  // Request body for a bundle; exposed for tests and docs.
  nlohmann::json request_body(const PromptBundle& bundle, const GenerationConfig& config) const;

 private:
  HttpBackendConfig config_;
  std::string api_key_;
};

struct CompletionRecord {
  std::string prompt_hash;  // sha256 of the bundle transcript
  std::string response;
  std::int64_t latency_ms = 0;
  std::string provider;
  GenerationConfig config;
  std::string task_id;
  Stage stage = Stage::translate;
  int round = 0;
  int attempts = 0;
  std::string error;  // empty on success
};

nlohmann::json to_json(const CompletionRecord& record);

// Serialized append channel for completion records; optionally mirrored to a JSONL file.
class CompletionLog {
 public:
  CompletionLog() = default;
  explicit CompletionLog(const std::filesystem::path& file);

  void append(const CompletionRecord& record);
  std::vector<CompletionRecord> records() const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::vector<CompletionRecord> records_;
  std::optional<std::ofstream> file_;
};

struct RetryPolicy {
  int retries = 3;
  std::chrono::milliseconds backoff_base{2000};
};

std::string sha256_hex(std::string_view text);

std::size_t estimate_context(const PromptBundle& bundle, const TokenCounter& counter = TokenCounter::approx());

// Sends the bundle to the backend, retrying retryable failures with
// exponential backoff. Exactly one CompletionRecord is logged per call,
// whether it succeeds or throws.
std::string complete(Backend& backend, const PromptBundle& bundle, const GenerationConfig& config,
                     const CallContext& ctx, CompletionLog& log, const RetryPolicy& retry = {});

}  // namespace unipar
