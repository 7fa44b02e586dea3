#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "unipar/api.hpp"
#include "unipar/llm.hpp"
#include "unipar/prompting.hpp"

namespace unipar {

enum class CompileStatus { ok, failed, toolchain_missing };
enum class Verdict { pass, fail, timeout, crash };

const char* to_string(CompileStatus status);
const char* to_string(Verdict verdict);

struct CompileResult {
  CompileStatus status = CompileStatus::failed;
  std::string diagnostics;
  std::optional<std::filesystem::path> artifact_path;
  std::int64_t duration_ms = 0;
};

struct RunResult {
  int exit_code = -1;
  std::string stdout_text;
  std::string stderr_text;
  Verdict verdict = Verdict::fail;
  std::int64_t duration_ms = 0;
};

// Self-check verdict detector: output must match one pass pattern and no
// fail pattern (ECMAScript regex, case-insensitive, searched in stdout and stderr).
struct Detector {
  std::vector<std::string> pass_patterns{"PASS", R"(Verification\s*:?\s*(pass|passed|success))"};
  std::vector<std::string> fail_patterns{"FAIL", "error"};

  bool matches(std::string_view out, std::string_view err) const;
};

struct ToolchainConfig {
  // {src} and {out} are replaced by shell-quoted paths relative to the workspace.
  std::map<Api, std::string> commands{
      {Api::Serial, "g++ -O2 {src} -o {out}"},
      {Api::OpenMP, "g++ -O2 -fopenmp {src} -o {out}"},
      {Api::CUDA, "nvcc -O2 {src} -o {out}"},
  };
  std::chrono::seconds compile_timeout{120};
  std::chrono::seconds run_timeout{300};
  std::size_t output_cap = 4u << 20;
  unsigned device_slots = 1;  // concurrent CUDA executions
  Detector detector;
  std::map<std::string, Detector> benchmark_detectors;
};

class Toolchain {
 public:
  explicit Toolchain(ToolchainConfig config = {});

  const ToolchainConfig& config() const { return config_; }
  // First word of the configured command, e.g. "g++".
  std::string program(Api api) const;
  bool available(Api api) const;
  // First line of `<program> --version`, or empty when unavailable.
  std::string version(Api api) const;
  const Detector& detector_for(const std::string& benchmark_id) const;

  // Writes <workspace>/src/main.{cpp,cu}, builds <workspace>/bin, logs to
  // <workspace>/compile.log. Compile failures are data, never exceptions.
  CompileResult compile(std::string_view source, Api api, const std::filesystem::path& workspace) const;

  // Runs the artifact in its directory under the timeout and output caps;
  // logs to <dir>/run.log. CUDA runs take a device slot.
  RunResult run_and_verify(const std::filesystem::path& artifact, std::chrono::milliseconds timeout,
                           std::span<const std::string> args, const Detector& detector, Api api) const;
  RunResult run_and_verify(const std::filesystem::path& artifact, Api api, const std::string& benchmark_id) const;

 private:
  ToolchainConfig config_;
  std::shared_ptr<std::counting_semaphore<>> device_slots_;
};

enum class KernelGuard { unchanged, changed, not_checked };
const char* to_string(KernelGuard guard);

// Compares comment- and whitespace-insensitive token streams of every
// function definition except top-level main. Unlexable input counts as changed.
KernelGuard kernel_guard_check(std::string_view before, std::string_view after);

struct RepairAttempt {
  int round = 0;
  std::string prompt_hash;
  std::string response_hash;
  CompileResult compile;
  std::string workspace;  // relative to the task directory
};

struct TransplantOutcome {
  std::string merged_source;
  bool main_replaced = false;
  int repair_rounds_used = 0;
  KernelGuard kernel_guard = KernelGuard::not_checked;
  bool compiled = false;
  std::optional<CompileResult> final_compile;
  std::vector<RepairAttempt> attempts;
  std::vector<std::string> diagnostics;  // every failed compile, oldest first
};

// Replaces generated main with the ground-truth main; all other generated
// bytes are kept verbatim. A generated program without main gets the
// ground-truth main appended (main_replaced = false). Throws
// MainNotFound(ground_truth) when the ground truth has no main, and Error on
// empty inputs.
TransplantOutcome transplant_main(std::string_view generated, std::string_view ground_truth);

struct RepairEnv {
  Backend& backend;
  CompletionLog& log;
  const Toolchain& toolchain;
  std::string task_id;
  Direction direction;
  GenerationConfig gen{};
  RetryPolicy retry{};
  PromptTemplates templates{};
  std::size_t diagnostics_budget = kDiagnosticsBudget;
  // Returns a fresh workspace directory and its name relative to the task directory.
  std::function<std::pair<std::filesystem::path, std::string>()> next_workspace;
  std::function<void(const RepairAttempt&)> on_attempt;
};

// Up to `budget` compile-repair rounds on a transplanted program that no
// longer compiles. After a successful repair the kernel guard compares the
// repaired program against `merged`. Backend failures other than empty
// completions propagate.
TransplantOutcome repair_transplant(const std::string& merged, const std::string& diagnostics, RepairEnv& env,
                                    int budget = 3);

nlohmann::json to_json(const CompileResult& r, std::size_t text_cap = 16 * 1024);
nlohmann::json to_json(const RunResult& r, std::size_t text_cap = 4 * 1024);
CompileResult compile_result_from_json(const nlohmann::json& j);
RunResult run_result_from_json(const nlohmann::json& j);

}  // namespace unipar
