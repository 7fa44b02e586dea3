#pragma once

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "unipar/api.hpp"
#include "unipar/llm.hpp"
#include "unipar/toolchain.hpp"

namespace unipar {

struct RoundRecord {
  Stage stage = Stage::translate;
  int round_index = 0;
  std::string prompt_hash;
  std::string response_hash;
  std::optional<CompileResult> compile;
  std::optional<RunResult> run;
  std::string workspace;  // relative to the task directory
  std::string note;       // e.g. "empty completion"
};

struct StagePoint {
  Stage stage = Stage::translate;
  int round = 0;
  friend auto operator<=>(const StagePoint&, const StagePoint&) = default;
};

// Main transplant applied to the first compiling candidate.
struct TransplantSummary {
  bool attempted = false;
  bool main_replaced = false;
  KernelGuard kernel_guard = KernelGuard::not_checked;
  int repair_rounds_used = 0;
  bool compiled = false;
  std::optional<CompileResult> compile;  // the unrepaired merged program
  std::optional<RunResult> run;          // first run of the compiled merged program
  std::string workspace;
};

struct PipelineOutcome {
  std::string task_id;
  std::string benchmark_id;
  Direction direction;
  std::string category;
  bool compiled = false;
  bool validated = false;
  std::optional<StagePoint> success_stage;     // earliest compile success
  std::optional<StagePoint> validation_stage;  // candidate that passed verification
  std::vector<RoundRecord> trace;
  TransplantSummary transplant;
  std::optional<std::string> skipped_reason;
  std::int64_t duration_ms = 0;

  bool skipped() const { return skipped_reason.has_value(); }
};

nlohmann::json to_json(const RoundRecord& r);
RoundRecord round_record_from_json(const nlohmann::json& j);
nlohmann::json to_json(const PipelineOutcome& o);
PipelineOutcome outcome_from_json(const nlohmann::json& j);

// Copy of an outcome JSON with duration_ms / latency_ms fields removed at any depth.
nlohmann::json without_timing(const nlohmann::json& j);

}  // namespace unipar
