#include "unipar/llm.hpp"

#include <openssl/evp.h>

#include <array>
#include <thread>

#include "unipar/error.hpp"

namespace unipar {

using nlohmann::json;

void GenerationConfig::validate() const {
  if (!(temperature >= 0.0)) throw ConfigError("temperature must be >= 0");
  if (!(top_p > 0.0 && top_p <= 1.0)) throw ConfigError("top_p must be in (0, 1]");
  if (max_tokens <= 0) throw ConfigError("max_tokens must be positive");
}

json to_json(const GenerationConfig& config) {
  return json{{"temperature", config.temperature},
              {"top_p", config.top_p},
              {"max_tokens", config.max_tokens},
              {"model_id", config.model_id}};
}

GenerationConfig generation_config_from_json(const json& j) {
  GenerationConfig c;
  c.temperature = j.value("temperature", c.temperature);
  c.top_p = j.value("top_p", c.top_p);
  c.max_tokens = j.value("max_tokens", c.max_tokens);
  c.model_id = j.value("model_id", c.model_id);
  return c;
}

const char* to_string(Stage stage) {
  switch (stage) {
    case Stage::translate: return "translate";
    case Stage::compile_repair: return "compile_repair";
    case Stage::transplant_repair: return "transplant_repair";
    case Stage::exec_repair: return "exec_repair";
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view text) {
  for (Stage s : {Stage::translate, Stage::compile_repair, Stage::transplant_repair, Stage::exec_repair}) {
    if (text == to_string(s)) return s;
  }
  return std::nullopt;
}

MockBackend::MockBackend(std::vector<ScriptedBehavior> script, MissPolicy policy) : policy_(policy) {
  for (ScriptedBehavior& b : script) {
    Key key{b.task_id, b.stage, b.round};
    if (!script_.emplace(key, std::move(b.response)).second) {
      throw ConfigError("duplicate script key (" + b.task_id + ", " + to_string(b.stage) + ", " +
                        std::to_string(b.round) + ")");
    }
  }
}

MockBackend MockBackend::from_file(const std::filesystem::path& path, MissPolicy policy) {
  return MockBackend(read_script(path), policy);
}

std::vector<ScriptedBehavior> read_script(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("mock script not found: " + path.string());
  std::vector<ScriptedBehavior> script;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    const auto where = path.string() + ":" + std::to_string(line_no);
    if (!j.is_object()) throw ConfigError("malformed script record at " + where);
    const auto stage = parse_stage(j.value("stage", ""));
    if (!stage) throw ConfigError("unknown stage at " + where);
    script.push_back({j.value("task_id", ""), *stage, j.value("round", 0), j.value("response", "")});
  }
  return script;
}

std::string MockBackend::chat(const PromptBundle& bundle, const GenerationConfig&, const CallContext& ctx) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
  }
  const auto it = script_.find(Key{ctx.task_id, ctx.stage, ctx.round});
  if (it != script_.end()) return it->second;
  if (policy_ == MissPolicy::echo_input && !bundle.turns.empty()) return bundle.turns.back().text;
  throw LlmError(LlmError::Kind::ScriptMiss, "no scripted response for (" + ctx.task_id + ", " +
                                                 to_string(ctx.stage) + ", " + std::to_string(ctx.round) + ")");
}

std::size_t MockBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

void write_script(const std::filesystem::path& path, const std::vector<ScriptedBehavior>& script) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  for (const ScriptedBehavior& b : script) {
    out << json{{"task_id", b.task_id}, {"stage", to_string(b.stage)}, {"round", b.round}, {"response", b.response}}
               .dump()
        << "\n";
  }
  if (!out) throw Error("cannot write mock script " + path.string());
}

json to_json(const CompletionRecord& r) {
  json j{{"prompt_hash", r.prompt_hash}, {"response", r.response}, {"latency_ms", r.latency_ms},
         {"provider", r.provider},       {"config", to_json(r.config)}, {"task_id", r.task_id},
         {"stage", to_string(r.stage)},  {"round", r.round},         {"attempts", r.attempts}};
  if (!r.error.empty()) j["error"] = r.error;
  return j;
}

CompletionLog::CompletionLog(const std::filesystem::path& file) {
  if (file.has_parent_path()) std::filesystem::create_directories(file.parent_path());
  file_.emplace(file, std::ios::binary | std::ios::app);
  if (!*file_) throw Error("cannot open completion log " + file.string());
}

void CompletionLog::append(const CompletionRecord& record) {
  std::lock_guard lock(mutex_);
  records_.push_back(record);
  if (file_) {
    *file_ << to_json(record).dump(-1, ' ', false, json::error_handler_t::replace) << "\n";
    file_->flush();
  }
}

std::vector<CompletionRecord> CompletionLog::records() const {
  std::lock_guard lock(mutex_);
  return records_;
}

std::size_t CompletionLog::size() const {
  std::lock_guard lock(mutex_);
  return records_.size();
}

std::string sha256_hex(std::string_view text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr);
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

std::size_t estimate_context(const PromptBundle& bundle, const TokenCounter& counter) {
  return counter.count(bundle.transcript());
}

std::string complete(Backend& backend, const PromptBundle& bundle, const GenerationConfig& config,
                     const CallContext& ctx, CompletionLog& log, const RetryPolicy& retry) {
  CompletionRecord record;
  record.prompt_hash = sha256_hex(bundle.transcript());
  record.provider = backend.provider();
  record.config = config;
  record.task_id = ctx.task_id;
  record.stage = ctx.stage;
  record.round = ctx.round;

  const auto start = std::chrono::steady_clock::now();
  auto finish = [&](const std::string& error) {
    record.latency_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    record.error = error;
    log.append(record);
  };

  try {
    const std::size_t needed = estimate_context(bundle) + static_cast<std::size_t>(config.max_tokens);
    if (needed > backend.context_tokens()) {
      throw LlmError(LlmError::Kind::ContextOverflow,
                     "prompt estimate plus max_tokens (" + std::to_string(needed) + ") exceeds the context window of " +
                         std::to_string(backend.context_tokens()) + " tokens");
    }
    for (int attempt = 0;; ++attempt) {
      record.attempts = attempt + 1;
      try {
        std::string text = backend.chat(bundle, config, ctx);
        if (text.find_first_not_of(" \t\r\n") == std::string::npos) {
          throw LlmError(LlmError::Kind::EmptyCompletion, "backend returned an empty completion");
        }
        record.response = text;
        finish("");
        return text;
      } catch (const LlmError& e) {
        if (!e.retryable() || attempt >= retry.retries) throw;
        std::this_thread::sleep_for(retry.backoff_base * (1LL << attempt));
      }
    }
  } catch (const LlmError& e) {
    finish(std::string(to_string(e.kind())) + ": " + e.what());
    throw;
  } catch (const std::exception& e) {
    finish(e.what());
    throw;
  }
}

}  // namespace unipar
