#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "unipar/api.hpp"
#include "unipar/llm.hpp"
#include "unipar/outcome.hpp"
#include "unipar/prompting.hpp"
#include "unipar/toolchain.hpp"

namespace unipar {

struct PipelineConfig {
  GenerationConfig gen;
  int shots = 0;
  int compile_rounds = 3;
  int exec_rounds = 3;
  int transplant_rounds = 3;
  // false runs the plain n-shot baseline: no compile or exec repair rounds.
  bool agentic = true;
  std::uint64_t seed = 0;
  RetryPolicy retry;
  PromptTemplates templates;
  std::size_t diagnostics_budget = kDiagnosticsBudget;

  int effective_compile_rounds() const { return agentic ? compile_rounds : 0; }
  int effective_exec_rounds() const { return agentic ? exec_rounds : 0; }
  // Throws ConfigError on budgets outside 0..3 or a bad GenerationConfig.
  void validate() const;
};

nlohmann::json to_json(const PipelineConfig& config);

// Shot seed for one task: the run seed mixed with the task id.
std::uint64_t shot_seed(std::uint64_t run_seed, const std::string& task_id);

struct PipelineEnv {
  Backend& questioner;
  Backend& repair;
  CompletionLog& log;
  const Toolchain& toolchain;
  std::span<const ShotExample> shot_pool;  // train-split pairs of any direction
};

// Runs one task. Round workspaces go under task_dir/round_<k>/ and every
// finished round is appended to task_dir/trace.jsonl.
PipelineOutcome run_pipeline(const TranslationTask& task, const PipelineConfig& config, PipelineEnv& env,
                             const std::filesystem::path& task_dir);

struct BatchOptions {
  std::filesystem::path run_dir;
  std::size_t parallelism = 1;
  // Called after each outcome is sealed, with the number sealed so far in this invocation.
  std::function<void(const PipelineOutcome&, std::size_t)> on_sealed;
};

// Outcomes in task order. Sealed outcomes (run_dir/<task_id>/outcome.json)
// are loaded instead of recomputed. Writes run_dir/outcomes.jsonl at the end.
std::vector<PipelineOutcome> run_batch(std::span<const TranslationTask> tasks, const PipelineConfig& config,
                                       PipelineEnv& env, const BatchOptions& options);

// Atomically writes text to path (temp file + rename).
void write_atomic(const std::filesystem::path& path, std::string_view text);

// Reads outcomes.jsonl.
std::vector<PipelineOutcome> read_outcomes(const std::filesystem::path& file);

}  // namespace unipar
