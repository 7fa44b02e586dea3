#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "unipar/api.hpp"

namespace unipar {

struct Turn {
  enum class Role { instruction, assistant };
  Role role = Role::instruction;
  std::string text;

  friend bool operator==(const Turn&, const Turn&) = default;
};

struct PromptBundle {
  std::string system;
  std::vector<Turn> turns;
  std::size_t rendered_token_estimate = 0;

  // Canonical text form: "System: ...\n" then "Instruction: ...\n" /
  // "Assistant: ...\n" per turn. Used for golden files, hashing and
  // context estimation. An empty bundle renders as "".
  std::string transcript() const;
};

struct ShotExample {
  Api from_api = Api::Serial;
  Api to_api = Api::OpenMP;
  std::string from_code;
  std::string to_code;
  std::string benchmark_id;
};

// Plain-text templates with {placeholder} substitution. The inference shot
// response and the fine-tuning response are kept as separate templates.
struct PromptTemplates {
  std::string system =
      "You are an HPC expert specializing in translating between parallel programming APIs.";
  std::string instruction = "Translate the following code from {from_api} to {to_api}\nCode: {from_code}";
  std::string shot_response = "Here is the translated code: {to_code}";
  std::string finetune_response = "{to_code}";
  std::string compile_repair =
      "The following {to_api} code, translated from {from_api}, fails to compile.\n"
      "Code: {code}\n"
      "Compiler diagnostics:\n{diagnostics}\n"
      "Fix the errors and return the complete corrected {to_api} code only.";
  std::string runtime_repair =
      "The following {to_api} code, translated from {from_api}, compiles but fails at runtime.\n"
      "Code: {code}\n"
      "Observed behavior:\n{diagnostics}\n"
      "Fix the errors and return the complete corrected {to_api} code only.";

  // Reads `<name>.txt` files from dir for any of the six template names;
  // missing files keep the defaults. Unknown .txt files are a ConfigError.
  static PromptTemplates with_overrides(const std::filesystem::path& dir);
};

// Single-pass {key} substitution; substituted text is never rescanned.
// Unknown placeholders are left as written.
std::string substitute(std::string_view tmpl, const std::map<std::string, std::string>& values);

PromptBundle render_translation_prompt(const TranslationTask& task, std::span<const ShotExample> shots,
                                       const PromptTemplates& templates = {});

// Seeded sample without replacement from `candidates` restricted to `direction`,
// excluding `exclude_benchmark`. Throws Error when fewer than n remain or n is
// outside [0, max_shots].
std::vector<ShotExample> select_shots(std::span<const ShotExample> candidates, Direction direction, int n,
                                      std::uint64_t seed, std::string_view exclude_benchmark,
                                      int max_shots = 3);

enum class RepairKind { compile, runtime };

inline constexpr std::size_t kDiagnosticsBudget = 16 * 1024;

// Keeps the last `budget` bytes, moved forward to a UTF-8 boundary.
std::string truncate_tail(std::string_view text, std::size_t budget);

PromptBundle render_repair_prompt(RepairKind kind, std::string_view current_code, std::string_view diagnostics,
                                  Direction direction, std::size_t budget = kDiagnosticsBudget,
                                  const PromptTemplates& templates = {});

// Longest fenced block if any; otherwise the response with leading and
// trailing prose lines (no `;`, `{`, `}` or `#`) removed. Throws
// LlmError(EmptyCompletion) for an empty or blank response.
std::string extract_code(std::string_view response, Api target);

struct FinetuneRecord {
  std::string system;
  std::string instruction;
  std::string response;
};

FinetuneRecord render_finetune_record(const ShotExample& pair, const PromptTemplates& templates = {});

}  // namespace unipar
