#pragma once

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "unipar/agents.hpp"
#include "unipar/corpus.hpp"
#include "unipar/outcome.hpp"

namespace unipar {

// Exact rate; den == 0 means undefined.
struct Rational {
  std::uint64_t num = 0;
  std::uint64_t den = 0;

  bool defined() const { return den != 0; }
  double value() const { return den ? static_cast<double>(num) / static_cast<double>(den) : 0.0; }
  // Rounded half-up to three decimals ("0.800"), or "n/a".
  std::string fixed3() const;
  friend bool operator==(const Rational&, const Rational&) = default;
};

// Earliest compile success per stage and round.
using Attribution = std::map<StagePoint, std::size_t>;

// Attribution cells reported in tables, in order.
std::vector<StagePoint> attribution_columns();

struct RateStats {
  std::size_t n_tasks = 0;
  std::size_t n_compiled = 0;
  std::size_t n_validated = 0;
  std::size_t n_skipped = 0;
  Attribution round_attribution;

  std::size_t denominator() const { return n_tasks - n_skipped; }
  Rational compilation_rate() const { return {n_compiled, denominator()}; }
  Rational validation_rate() const { return {n_validated, denominator()}; }
  // Alternative convention: validated among compiled.
  Rational validation_rate_of_compiled() const { return {n_validated, n_compiled}; }
};

struct DirectionStats : RateStats {
  Direction direction;
};

struct Aggregate {
  std::map<Direction, DirectionStats> by_direction;
  std::map<std::string, RateStats> by_category;  // empty category omitted
  std::vector<std::string> warnings;
};

// Skipped outcomes count toward n_tasks and n_skipped only. Expected
// directions without outcomes are omitted and produce a warning.
Aggregate aggregate(std::span<const PipelineOutcome> outcomes, std::span<const Direction> expected = {});

struct AttributionTable {
  Attribution cells;  // every attribution column present, zeros included
  std::size_t n_compiled = 0;
};

AttributionTable attribute_rounds(std::span<const PipelineOutcome> outcomes);

struct GridPoint {
  double temperature = 0.2;
  int max_tokens = 15000;
  double top_p = 0.9;
  int shots = 0;

  // Directory-safe key, e.g. "t0.2_m5000_p0.8_s1".
  std::string key() const;
  friend auto operator<=>(const GridPoint&, const GridPoint&) = default;
};

struct SweepSpec {
  std::vector<double> temperatures{0.2, 0.6, 0.9};
  std::vector<int> max_tokens{5000, 10000, 15000};
  double top_p = 0.8;
  std::vector<int> shots{0, 1, 2, 3};

  // Cartesian product, sorted and without duplicates.
  std::vector<GridPoint> points() const;
};

struct PointResult {
  GridPoint point;
  std::string run_dir;  // relative to the manifest
  std::size_t n_outcomes = 0;
  Aggregate stats;
  AttributionTable attribution;
};

struct RunManifest {
  std::string run_id;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json provenance = nlohmann::json::object();
  std::vector<PointResult> points;  // sorted by point
};

nlohmann::json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const nlohmann::json& j);

PointResult summarize_point(const GridPoint& point, std::string run_dir, std::span<const PipelineOutcome> outcomes,
                            std::span<const Direction> directions);

// One run_batch per grid point under sweep_dir/<point key>/. Completed points
// resume from their sealed outcomes.
RunManifest run_sweep(const SweepSpec& spec, std::span<const TranslationTask> tasks, const PipelineConfig& base,
                      PipelineEnv& env, const std::filesystem::path& sweep_dir, std::size_t parallelism,
                      std::span<const Direction> directions);

enum class ReportFormat { markdown, csv, json };
const char* extension(ReportFormat format);
std::optional<ReportFormat> parse_report_format(std::string_view text);

std::string render_report(const RunManifest& manifest, ReportFormat format);
void emit_report(const RunManifest& manifest, ReportFormat format, const std::filesystem::path& file);

struct CsvRow {
  std::string point;
  double temperature = 0;
  int max_tokens = 0;
  double top_p = 0;
  int shots = 0;
  Direction direction;
  std::size_t n_tasks = 0;
  std::size_t n_skipped = 0;
  std::size_t n_compiled = 0;
  std::size_t n_validated = 0;
  std::string compilation_rate;
  std::string validation_rate;
  std::vector<std::size_t> attribution;  // attribution_columns() order
};

std::vector<CsvRow> parse_report_csv(std::string_view text);

struct FinetuneOptions {
  std::size_t context_limit = 16384;
  bool drop_oversize = true;
  TokenCounter counter = TokenCounter::approx();
  PromptTemplates templates;
};

struct FinetuneExport {
  std::vector<FinetuneRecord> records;
  std::vector<std::string> flagged;  // "<task id>: <estimate> tokens"
  std::size_t dropped = 0;
};

// One record per train entry of the split, in manifest order.
FinetuneExport export_finetune(const std::vector<KernelTuple>& tuples, const SplitManifest& split,
                               const FinetuneOptions& options = {});
std::string finetune_jsonl(const FinetuneExport& data);
nlohmann::json finetune_schema();

}  // namespace unipar
