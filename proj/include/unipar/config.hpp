#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "unipar/agents.hpp"
#include "unipar/llm.hpp"
#include "unipar/metrics.hpp"
#include "unipar/toolchain.hpp"

namespace unipar {

// Small TOML subset: [section] / [a.b] headers, `key = value` with basic
// strings, integers, floats, booleans and single-line arrays of those, and
// `#` comments. Enough for human-edited run configs.
namespace toml {

struct Value;
using Array = std::vector<Value>;
struct Value {
  std::variant<std::string, std::int64_t, double, bool, Array> v;
  int line = 0;
};

// Dotted key ("section.key") -> value. Duplicate keys and syntax errors
// throw ConfigError with the line number.
std::map<std::string, Value> parse(std::string_view text);

}  // namespace toml

struct BackendSpec {
  std::string kind = "mock";  // mock | http
  std::string script;         // mock: JSONL script path
  std::string miss_policy = "error";
  HttpBackendConfig http;
};

struct AppConfig {
  std::string run_id;
  std::uint64_t seed = 0;
  std::size_t parallelism = 1;
  std::string runs_dir = "runs";

  std::string corpus_root;
  std::string corpus_dir = "corpus";
  std::string split_file = "split.json";
  std::size_t cutoff = kDefaultTokenCutoff;
  std::string counter = "approx";
  std::string vocab;
  bool verify = false;
  std::string categories;
  std::string ratio = "9:1";

  ToolchainConfig toolchain;
  PipelineConfig pipeline;
  BackendSpec questioner;
  BackendSpec repair;
  bool repair_configured = false;  // otherwise the questioner backend also repairs
  SweepSpec sweep;
  std::string prompts_dir;
};

// Applies a config file's keys on top of `base`. Unknown keys are a ConfigError.
AppConfig apply_config(std::string_view text, AppConfig base = {});
AppConfig load_config(const std::filesystem::path& file, AppConfig base = {});

// Snapshot embedded in run manifests. Contains no credentials.
nlohmann::json to_json(const AppConfig& config);

}  // namespace unipar
