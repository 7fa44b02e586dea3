#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "unipar/api.hpp"
#include "unipar/tokens.hpp"

namespace unipar {

class Toolchain;

enum class Verification { unverified, passed, failed };
const char* to_string(Verification v);

struct BenchmarkSource {
  std::string benchmark_id;
  Api api = Api::OpenMP;
  std::filesystem::path main_file_path;  // relative to the scanned root
  std::string source_text;
  std::size_t token_count = 0;
  Verification verified = Verification::unverified;
  std::vector<std::string> notes;  // flags such as retained omp_* runtime calls
};

struct KernelTuple {
  std::string benchmark_id;
  std::map<Api, BenchmarkSource> members;
  std::optional<std::string> category;
};

// ---------------------------------------------------------------------------
// Scanning

struct ScanOptions {
  // Directory name suffix -> api; `<benchmark><suffix>/`.
  std::map<std::string, Api> suffixes{{"-cuda", Api::CUDA}, {"-omp", Api::OpenMP}};
  // Basename stems that never hold the primary logic (case-insensitive).
  std::vector<std::string> excluded_stems{"utils", "reference"};
  std::vector<std::string> source_extensions{".c", ".cc", ".cpp", ".cxx", ".cu"};
};

struct ScanSkip {
  std::filesystem::path directory;  // relative to root
  std::string reason;
};

struct ScanReport {
  std::vector<ScanSkip> skipped;
  std::vector<std::string> warnings;
};

struct ScanResult {
  std::vector<BenchmarkSource> sources;  // sorted by (benchmark_id, api)
  ScanReport report;
};

// Throws CorpusError when root does not exist.
ScanResult scan_benchmarks(const std::filesystem::path& root, const std::set<Api>& apis,
                           const ScanOptions& options = {});

// ---------------------------------------------------------------------------
// Preprocessing

struct SerialDerivation {
  std::string source;
  std::size_t pragmas_removed = 0;        // logical `#pragma omp` lines
  std::size_t omp_includes_removed = 0;
  std::vector<std::string> runtime_calls;  // distinct omp_* calls left in place
};

SerialDerivation derive_serial(std::string_view openmp_source);

std::size_t count_tokens(std::string_view source_text, const TokenCounter& counter);

struct PruneResult {
  std::vector<BenchmarkSource> kept;
  std::vector<BenchmarkSource> dropped;
};

inline constexpr std::size_t kDefaultTokenCutoff = 7500;

// Keeps token_count <= cutoff.
PruneResult prune_by_tokens(std::vector<BenchmarkSource> sources, std::size_t cutoff = kDefaultTokenCutoff);

struct VerifyResult {
  Verification verdict = Verification::unverified;
  std::string diagnostics;
};

// Compiles and runs a source in `workspace` and applies the self-check detector.
VerifyResult verify_kernel(const BenchmarkSource& source, const Toolchain& toolchain, std::chrono::seconds timeout,
                           const std::filesystem::path& workspace);

struct TupleOptions {
  bool derive_serial = true;
  TokenCounter counter = TokenCounter::approx();
  std::map<std::string, std::string> categories;  // benchmark_id -> tag
};

// Groups by benchmark; derives Serial from OpenMP when missing; drops groups
// with neither OpenMP nor CUDA. Throws CorpusError on duplicate (id, api).
std::vector<KernelTuple> build_tuples(std::vector<BenchmarkSource> sources, const TupleOptions& options = {});

// ---------------------------------------------------------------------------
// Splitting

// Train:test parts, e.g. {9, 1}.
struct SplitRatio {
  std::uint64_t train = 9;
  std::uint64_t test = 1;

  double train_fraction() const { return static_cast<double>(train) / static_cast<double>(train + test); }
  friend bool operator==(const SplitRatio&, const SplitRatio&) = default;
};

// "9:1", "898:76" or a train fraction such as "0.9".
SplitRatio parse_ratio(std::string_view text);

struct SplitEntry {
  std::string benchmark_id;
  Direction direction;
  friend auto operator<=>(const SplitEntry&, const SplitEntry&) = default;
};

struct SplitManifest {
  std::vector<SplitEntry> train;
  std::vector<SplitEntry> test;
  std::uint64_t seed = 0;
  SplitRatio ratio;
  std::vector<std::string> warnings;

  std::vector<std::string> ids(Direction d, bool test_half) const;
};

// Number of test items for n tasks: round-half-up of n * test / (train + test),
// clamped to [1, n - 1] for n >= 2. Directions with fewer than 2 tasks go wholly to train.
std::size_t test_size(std::size_t n, SplitRatio ratio);

// Per-direction deterministic split of benchmark ids.
SplitManifest split_tasks(const std::map<Direction, std::vector<std::string>>& ids_by_direction, SplitRatio ratio,
                          std::uint64_t seed);

// Directions whose (from, to) members both exist in a tuple become tasks.
SplitManifest split_corpus(const std::vector<KernelTuple>& tuples, std::span<const Direction> directions,
                           SplitRatio ratio, std::uint64_t seed);

std::vector<TranslationTask> make_tasks(const std::vector<KernelTuple>& tuples, Direction direction);
// Tasks for the given split half, in manifest order. Unknown ids are a CorpusError.
std::vector<TranslationTask> tasks_for(const std::vector<KernelTuple>& tuples, const SplitManifest& split,
                                       bool test_half, std::optional<Direction> direction = std::nullopt);

// ---------------------------------------------------------------------------
// Curation and persistence

struct CurateOptions {
  std::filesystem::path root;
  std::set<Api> apis{Api::OpenMP, Api::CUDA};
  ScanOptions scan;
  std::size_t cutoff = kDefaultTokenCutoff;
  TokenCounter counter = TokenCounter::approx();
  bool verify = false;
  std::chrono::seconds verify_timeout{300};
  std::filesystem::path verify_workspace;  // required when verify is on
  std::size_t workers = 1;
  std::optional<std::filesystem::path> categories_file;  // default: <root>/categories.json if present
};

struct CurateReport {
  ScanReport scan;
  std::vector<std::pair<std::string, std::size_t>> pruned;  // "id/api", token count
  std::vector<std::string> verification_failed;            // "id/api"
  std::vector<std::string> verification_skipped;           // "id/api": toolchain missing
  std::vector<std::string> flags;                          // derived-serial notes
  std::size_t scanned = 0;
};

struct CurateResult {
  std::vector<KernelTuple> tuples;
  CurateReport report;
};

// scan -> strip comments -> count -> prune -> tuples (serial derivation) -> verify.
CurateResult curate(const CurateOptions& options, const Toolchain* toolchain);

// corpus/<id>/<api>.{cpp,cu}, corpus.jsonl, curate_report.json
void write_corpus(const std::filesystem::path& dir, const CurateResult& result);
std::vector<KernelTuple> load_corpus(const std::filesystem::path& dir);

nlohmann::json to_json(const SplitManifest& split);
SplitManifest split_from_json(const nlohmann::json& j);
void write_split(const std::filesystem::path& file, const SplitManifest& split);
SplitManifest read_split(const std::filesystem::path& file);

}  // namespace unipar
