// unipar command-line entry point.
//
// Exit codes: 0 success, 1 task-level failure under --strict (or a runtime
// failure), 2 configuration or usage errors.

#include <unistd.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "unipar/agents.hpp"
#include "unipar/config.hpp"
#include "unipar/corpus.hpp"
#include "unipar/error.hpp"
#include "unipar/llm.hpp"
#include "unipar/metrics.hpp"
#include "unipar/process.hpp"
#include "unipar/toolchain.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace unipar;

namespace {

struct TaskFailure {
  std::size_t failed;
};

bool on_off(const std::string& flag, const std::string& value) {
  if (value == "on" || value == "true" || value == "1") return true;
  if (value == "off" || value == "false" || value == "0") return false;
  throw ConfigError(flag + " expects on|off, got '" + value + "'");
}

// "mock:<script>", "mock-echo:<script>", "http" or "http:<model>".
BackendSpec parse_backend_flag(const std::string& text, BackendSpec base) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
  if (kind == "mock" || kind == "mock-echo") {
    if (arg.empty()) throw ConfigError("--backend mock needs a script: mock:<file.jsonl>");
    base.kind = "mock";
    base.script = arg;
    base.miss_policy = kind == "mock" ? "error" : "echo";
  } else if (kind == "http") {
    base.kind = "http";
    if (!arg.empty()) base.http.model = arg;
  } else {
    throw ConfigError("unknown backend '" + text + "' (expected mock:<script> or http[:<model>])");
  }
  return base;
}

std::unique_ptr<Backend> make_backend(const BackendSpec& spec) {
  if (spec.kind == "http") return std::make_unique<HttpBackend>(spec.http);
  if (spec.script.empty()) throw ConfigError("mock backend needs a script file (--backend mock:<file.jsonl>)");
  auto policy = spec.miss_policy == "echo" ? MockBackend::MissPolicy::echo_input : MockBackend::MissPolicy::error;
  return std::make_unique<MockBackend>(read_script(spec.script), policy);
}

std::vector<Direction> parse_directions(const std::vector<std::string>& flags) {
  if (flags.empty()) return {kDirections.begin(), kDirections.end()};
  std::vector<Direction> out;
  for (const std::string& f : flags) {
    const auto d = parse_direction(f);
    if (!d) throw ConfigError("unknown direction '" + f + "' (e.g. serial-to-omp, cuda-to-omp)");
    if (std::find(out.begin(), out.end(), *d) == out.end()) out.push_back(*d);
  }
  return out;
}

TokenCounter make_counter(const AppConfig& c) {
  if (c.counter == "approx") return TokenCounter::approx();
  if (c.counter == "vocab") {
    if (c.vocab.empty()) throw ConfigError("--counter vocab needs --vocab <file>");
    return TokenCounter::from_vocab_file(c.vocab);
  }
  throw ConfigError("unknown counter '" + c.counter + "' (approx|vocab)");
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw ConfigError("bad number '" + item + "' in list '" + text + "'");
    }
  }
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (double d : parse_doubles(text)) out.push_back(static_cast<int>(d));
  return out;
}

void write_text(const fs::path& path, const std::string& text) { write_atomic(path, text); }

json provenance(const Toolchain& toolchain, const std::vector<Direction>& directions, const Backend& q,
                const Backend& r) {
  json p = json::object();
  std::set<Api> targets;
  for (Direction d : directions) targets.insert(d.to);
  for (Api api : targets) {
    const std::string v = toolchain.version(api);
    p[std::string(api_key(api)) + " compiler"] = v.empty() ? "missing (" + toolchain.program(api) + ")" : v;
  }
  p["questioner"] = q.provider();
  p["repair"] = r.provider();
  return p;
}

void write_reports(const RunManifest& m, const fs::path& dir) {
  for (ReportFormat f : {ReportFormat::markdown, ReportFormat::csv, ReportFormat::json}) {
    emit_report(m, f, dir / (std::string("report.") + extension(f)));
  }
}

// ---------------------------------------------------------------------------

struct Common {
  std::string config_file;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallelism;
  std::optional<std::string> run_id;
  std::optional<std::string> runs_dir;
  std::optional<std::string> corpus_dir;
  std::optional<std::string> split_file;
};

struct PipelineFlags {
  std::optional<std::string> backend;
  std::optional<std::string> repair_backend;
  std::optional<int> shots;
  std::optional<int> compile_rounds;
  std::optional<int> exec_rounds;
  std::optional<std::string> agentic;
  std::optional<double> temperature;
  std::optional<double> top_p;
  std::optional<int> max_tokens;
  std::optional<std::string> model;
  std::optional<std::string> prompts;
  std::vector<std::string> directions;
  bool strict = false;
};

void add_common(CLI::App* cmd, Common& c, bool corpus, bool split, bool run) {
  cmd->add_option("--config", c.config_file, "TOML config file");
  if (corpus) cmd->add_option("--corpus", c.corpus_dir, "Curated corpus directory");
  if (split) cmd->add_option("--split", c.split_file, "Split manifest (split.json)");
  if (run) {
    cmd->add_option("--seed", c.seed, "Seed for shot selection");
    cmd->add_option("--parallelism", c.parallelism, "Concurrent tasks");
    cmd->add_option("--run-id", c.run_id, "Run directory name");
    cmd->add_option("--runs-dir", c.runs_dir, "Parent of run directories");
  }
}

void add_pipeline(CLI::App* cmd, PipelineFlags& p) {
  cmd->add_option("--backend", p.backend, "mock:<script.jsonl>, mock-echo:<script.jsonl>, http or http:<model>");
  cmd->add_option("--repair-backend", p.repair_backend, "Backend for the repair agents (default: --backend)");
  cmd->add_option("--shots", p.shots, "In-context examples (0-3)");
  cmd->add_option("--compile-rounds", p.compile_rounds, "Compilation agent budget (0-3)");
  cmd->add_option("--exec-rounds", p.exec_rounds, "Execution agent budget (0-3)");
  cmd->add_option("--agentic", p.agentic, "on|off; off disables repair agents");
  cmd->add_option("--temperature", p.temperature);
  cmd->add_option("--top-p", p.top_p);
  cmd->add_option("--max-tokens", p.max_tokens);
  cmd->add_option("--model", p.model, "model_id sent to the backend");
  cmd->add_option("--prompts", p.prompts, "Directory of prompt template overrides");
  cmd->add_option("--direction", p.directions, "Direction filter, repeatable (e.g. cuda-to-omp)");
  cmd->add_flag("--strict", p.strict, "Exit 1 when any task fails");
}

AppConfig resolve(const Common& c) {
  AppConfig cfg;
  if (!c.config_file.empty()) cfg = load_config(c.config_file);
  if (c.seed) cfg.seed = *c.seed;
  if (c.parallelism) cfg.parallelism = *c.parallelism;
  if (c.run_id) cfg.run_id = *c.run_id;
  if (c.runs_dir) cfg.runs_dir = *c.runs_dir;
  if (c.corpus_dir) cfg.corpus_dir = *c.corpus_dir;
  if (c.split_file) cfg.split_file = *c.split_file;
  return cfg;
}

void apply_pipeline(AppConfig& cfg, const PipelineFlags& p) {
  if (p.backend) cfg.questioner = parse_backend_flag(*p.backend, cfg.questioner);
  if (p.repair_backend) {
    cfg.repair = parse_backend_flag(*p.repair_backend, cfg.repair);
    cfg.repair_configured = true;
  }
  if (p.shots) cfg.pipeline.shots = *p.shots;
  if (p.compile_rounds) cfg.pipeline.compile_rounds = *p.compile_rounds;
  if (p.exec_rounds) cfg.pipeline.exec_rounds = *p.exec_rounds;
  if (p.agentic) cfg.pipeline.agentic = on_off("--agentic", *p.agentic);
  if (p.temperature) cfg.pipeline.gen.temperature = *p.temperature;
  if (p.top_p) cfg.pipeline.gen.top_p = *p.top_p;
  if (p.max_tokens) cfg.pipeline.gen.max_tokens = *p.max_tokens;
  if (p.model) cfg.pipeline.gen.model_id = *p.model;
  if (p.prompts) cfg.prompts_dir = *p.prompts;
  if (!cfg.prompts_dir.empty()) cfg.pipeline.templates = PromptTemplates::with_overrides(cfg.prompts_dir);
  cfg.pipeline.seed = cfg.seed;
  cfg.pipeline.validate();
}

// Loaded corpus, split, tasks and shot pool for run-like commands.
struct Workload {
  std::vector<KernelTuple> tuples;
  SplitManifest split;
  std::vector<TranslationTask> tasks;
  std::vector<ShotExample> shot_pool;
  std::vector<Direction> directions;
};

Workload load_workload(const AppConfig& cfg, const std::vector<Direction>& directions, int max_shots) {
  Workload w;
  w.tuples = load_corpus(cfg.corpus_dir);
  w.split = read_split(cfg.split_file);
  w.directions = directions;
  for (Direction d : directions) {
    auto tasks = tasks_for(w.tuples, w.split, true, d);
    w.tasks.insert(w.tasks.end(), tasks.begin(), tasks.end());
    std::size_t pool = 0;
    for (const TranslationTask& t : tasks_for(w.tuples, w.split, false, d)) {
      w.shot_pool.push_back({t.direction.from, t.direction.to, t.source_code, t.ground_truth, t.benchmark_id});
      ++pool;
    }
    if (!tasks.empty() && static_cast<std::size_t>(max_shots) > pool) {
      throw ConfigError(std::to_string(max_shots) + " shots requested but the train split has only " +
                        std::to_string(pool) + " " + direction_label(d) + " pairs");
    }
  }
  return w;
}

struct Backends {
  std::unique_ptr<Backend> questioner;
  std::unique_ptr<Backend> repair_owned;
  Backend* repair = nullptr;
};

Backends make_backends(const AppConfig& cfg) {
  Backends b;
  b.questioner = make_backend(cfg.questioner);
  if (cfg.repair_configured) {
    b.repair_owned = make_backend(cfg.repair);
    b.repair = b.repair_owned.get();
  } else {
    b.repair = b.questioner.get();
  }
  return b;
}

std::size_t count_failures(const std::vector<PipelineOutcome>& outcomes) {
  std::size_t n = 0;
  for (const PipelineOutcome& o : outcomes) n += (!o.skipped() && !o.validated) ? 1 : 0;
  return n;
}

void print_stats(const PointResult& p) {
  for (const auto& [d, s] : p.stats.by_direction) {
    std::cout << direction_label(d) << ": tasks " << s.n_tasks << ", skipped " << s.n_skipped << ", compiled "
              << s.n_compiled << ", validated " << s.n_validated << ", compilation rate "
              << s.compilation_rate().fixed3() << ", validation rate " << s.validation_rate().fixed3() << "\n";
  }
  for (const std::string& w : p.stats.warnings) std::cerr << "warning: " << w << "\n";
}

// ---------------------------------------------------------------------------

int cmd_curate(const Common& common, const std::optional<std::string>& root, const std::optional<std::size_t>& cutoff,
               const std::optional<std::string>& counter, const std::optional<std::string>& vocab,
               const std::optional<std::string>& verify, const std::optional<std::string>& categories,
               const std::optional<std::string>& out) {
  AppConfig cfg = resolve(common);
  if (root) cfg.corpus_root = *root;
  if (cutoff) cfg.cutoff = *cutoff;
  if (counter) cfg.counter = *counter;
  if (vocab) cfg.vocab = *vocab;
  if (verify) cfg.verify = on_off("--verify", *verify);
  if (categories) cfg.categories = *categories;
  if (out) cfg.corpus_dir = *out;
  if (cfg.corpus_root.empty()) throw ConfigError("curate needs --root <benchmark tree>");

  CurateOptions opts;
  opts.root = cfg.corpus_root;
  opts.cutoff = cfg.cutoff;
  opts.counter = make_counter(cfg);
  opts.verify = cfg.verify;
  opts.workers = cfg.parallelism;
  if (!cfg.categories.empty()) opts.categories_file = cfg.categories;
  Toolchain toolchain(cfg.toolchain);
  std::optional<fs::path> scratch;
  if (opts.verify) {
    scratch = fs::temp_directory_path() / ("unipar-verify-" + std::to_string(::getpid()));
    opts.verify_workspace = *scratch;
  }
  CurateResult result = curate(opts, &toolchain);
  if (scratch) fs::remove_all(*scratch);
  write_corpus(cfg.corpus_dir, result);

  const CurateReport& r = result.report;
  std::cout << "scanned " << r.scanned << " sources; " << r.scan.skipped.size() << " directories skipped; "
            << r.pruned.size() << " pruned over " << cfg.cutoff << " tokens\n";
  for (const ScanSkip& s : r.scan.skipped) std::cout << "  skip " << s.directory.string() << ": " << s.reason << "\n";
  for (const auto& [label, n] : r.pruned) std::cout << "  pruned " << label << " (" << n << " tokens)\n";
  for (const std::string& f : r.verification_failed) std::cout << "  verification failed: " << f << "\n";
  for (const std::string& f : r.verification_skipped) std::cout << "  unverified (no toolchain): " << f << "\n";
  for (const std::string& f : r.flags) std::cout << "  flag " << f << "\n";
  for (const std::string& w : r.scan.warnings) std::cerr << "warning: " << w << "\n";
  std::size_t members = 0;
  for (const KernelTuple& t : result.tuples) members += t.members.size();
  std::cout << result.tuples.size() << " tuples, " << members << " members written to " << cfg.corpus_dir << "\n";
  return 0;
}

int cmd_split(const Common& common, const std::optional<std::string>& ratio, const std::vector<std::string>& dflags,
              const std::optional<std::string>& out) {
  AppConfig cfg = resolve(common);
  if (ratio) cfg.ratio = *ratio;
  if (out) cfg.split_file = *out;
  const auto tuples = load_corpus(cfg.corpus_dir);
  const auto directions = parse_directions(dflags);
  const SplitManifest m = split_corpus(tuples, directions, parse_ratio(cfg.ratio), cfg.seed);
  write_split(cfg.split_file, m);
  for (Direction d : directions) {
    std::cout << direction_label(d) << ": train " << m.ids(d, false).size() << ", test " << m.ids(d, true).size()
              << "\n";
  }
  for (const std::string& w : m.warnings) std::cerr << "warning: " << w << "\n";
  std::cout << "wrote " << cfg.split_file << "\n";
  return 0;
}

int cmd_translate(const Common& common, const PipelineFlags& pf, const std::string& benchmark,
                  const std::optional<std::string>& out_dir) {
  AppConfig cfg = resolve(common);
  apply_pipeline(cfg, pf);
  const auto directions = parse_directions(pf.directions);
  if (directions.size() != 1) throw ConfigError("translate needs exactly one --direction");
  const Direction d = directions.front();
  const auto tuples = load_corpus(cfg.corpus_dir);
  const auto all = make_tasks(tuples, d);
  const auto it = std::find_if(all.begin(), all.end(), [&](const TranslationTask& t) { return t.benchmark_id == benchmark; });
  if (it == all.end()) throw ConfigError("no " + direction_label(d) + " task for benchmark '" + benchmark + "'");

  std::vector<ShotExample> pool;
  if (cfg.pipeline.shots > 0) {
    const SplitManifest split = read_split(cfg.split_file);
    for (const TranslationTask& t : tasks_for(tuples, split, false, d)) {
      pool.push_back({t.direction.from, t.direction.to, t.source_code, t.ground_truth, t.benchmark_id});
    }
  }
  Backends b = make_backends(cfg);
  const fs::path dir = out_dir ? fs::path(*out_dir) : fs::path(cfg.runs_dir) / "translate" / it->id();
  fs::remove_all(dir);
  CompletionLog log(dir / "completions.jsonl");
  Toolchain toolchain(cfg.toolchain);
  PipelineEnv env{*b.questioner, *b.repair, log, toolchain, pool};
  const PipelineOutcome o = run_pipeline(*it, cfg.pipeline, env, dir);
  write_atomic(dir / "outcome.json", to_json(o).dump(2) + "\n");
  std::cout << to_json(o).dump(2) << "\n";
  if (pf.strict && !o.skipped() && !o.validated) throw TaskFailure{1};
  return 0;
}

int cmd_run(const Common& common, const PipelineFlags& pf, const std::optional<std::string>& half) {
  AppConfig cfg = resolve(common);
  apply_pipeline(cfg, pf);
  if (cfg.run_id.empty()) cfg.run_id = "default";
  const bool test_half = !half || *half == "test";
  if (half && *half != "test" && *half != "train") throw ConfigError("--half expects test|train");
  const auto directions = parse_directions(pf.directions);
  Workload w = load_workload(cfg, directions, cfg.pipeline.shots);
  if (!test_half) {
    w.tasks.clear();
    for (Direction d : directions) {
      auto t = tasks_for(w.tuples, w.split, false, d);
      w.tasks.insert(w.tasks.end(), t.begin(), t.end());
    }
  }
  Backends b = make_backends(cfg);
  const fs::path run_dir = fs::path(cfg.runs_dir) / cfg.run_id;
  fs::create_directories(run_dir);
  write_text(run_dir / "config.json", to_json(cfg).dump(2) + "\n");
  CompletionLog log(run_dir / "completions.jsonl");
  Toolchain toolchain(cfg.toolchain);
  PipelineEnv env{*b.questioner, *b.repair, log, toolchain, w.shot_pool};
  const auto outcomes = run_batch(w.tasks, cfg.pipeline, env, {run_dir, cfg.parallelism, {}});

  RunManifest m;
  m.run_id = cfg.run_id;
  m.config = to_json(cfg);
  m.provenance = provenance(toolchain, directions, *b.questioner, *b.repair);
  const GridPoint point{cfg.pipeline.gen.temperature, cfg.pipeline.gen.max_tokens, cfg.pipeline.gen.top_p,
                        cfg.pipeline.shots};
  m.points.push_back(summarize_point(point, ".", outcomes, directions));
  write_text(run_dir / "manifest.json", to_json(m).dump(2) + "\n");
  write_reports(m, run_dir);
  print_stats(m.points.front());
  std::cout << "outcomes: " << (run_dir / "outcomes.jsonl").string() << "\n";
  if (pf.strict) {
    if (const std::size_t failed = count_failures(outcomes)) throw TaskFailure{failed};
  }
  return 0;
}

int cmd_sweep(const Common& common, const PipelineFlags& pf, const std::optional<std::string>& temps,
              const std::optional<std::string>& tokens, const std::optional<std::string>& shots,
              const std::optional<double>& sweep_top_p) {
  AppConfig cfg = resolve(common);
  apply_pipeline(cfg, pf);
  if (cfg.run_id.empty()) cfg.run_id = "sweep";
  if (temps) cfg.sweep.temperatures = parse_doubles(*temps);
  if (tokens) cfg.sweep.max_tokens = parse_ints(*tokens);
  if (shots) cfg.sweep.shots = parse_ints(*shots);
  if (sweep_top_p) cfg.sweep.top_p = *sweep_top_p;
  const auto directions = parse_directions(pf.directions);
  const int max_shots = cfg.sweep.shots.empty() ? 0 : *std::max_element(cfg.sweep.shots.begin(), cfg.sweep.shots.end());
  Workload w = load_workload(cfg, directions, max_shots);
  Backends b = make_backends(cfg);
  const fs::path run_dir = fs::path(cfg.runs_dir) / cfg.run_id;
  fs::create_directories(run_dir);
  write_text(run_dir / "config.json", to_json(cfg).dump(2) + "\n");
  CompletionLog log(run_dir / "completions.jsonl");
  Toolchain toolchain(cfg.toolchain);
  PipelineEnv env{*b.questioner, *b.repair, log, toolchain, w.shot_pool};
  RunManifest m = run_sweep(cfg.sweep, w.tasks, cfg.pipeline, env, run_dir, cfg.parallelism, directions);
  m.run_id = cfg.run_id;
  json sweep = m.config["sweep"];
  m.config = to_json(cfg);
  m.config["sweep"] = sweep;
  m.provenance = provenance(toolchain, directions, *b.questioner, *b.repair);
  write_text(run_dir / "manifest.json", to_json(m).dump(2) + "\n");
  write_reports(m, run_dir);
  for (const PointResult& p : m.points) {
    std::cout << "[" << p.point.key() << "]\n";
    print_stats(p);
  }
  if (pf.strict) {
    std::size_t failed = 0;
    for (const PointResult& p : m.points)
      for (const auto& [d, s] : p.stats.by_direction) failed += s.denominator() - s.n_validated;
    if (failed) throw TaskFailure{failed};
  }
  return 0;
}

int cmd_report(const std::string& run_dir, const std::vector<std::string>& formats, const std::optional<std::string>& out) {
  std::ifstream in(fs::path(run_dir) / "manifest.json");
  if (!in) throw ConfigError("no manifest.json in " + run_dir);
  const RunManifest m = manifest_from_json(json::parse(in));
  const fs::path dest = out ? fs::path(*out) : fs::path(run_dir);
  std::vector<ReportFormat> fs_list;
  if (formats.empty()) fs_list = {ReportFormat::markdown, ReportFormat::csv, ReportFormat::json};
  for (const std::string& f : formats) {
    const auto rf = parse_report_format(f);
    if (!rf) throw ConfigError("unknown report format '" + f + "' (md|csv|json)");
    fs_list.push_back(*rf);
  }
  for (ReportFormat f : fs_list) {
    const fs::path file = dest / (std::string("report.") + extension(f));
    emit_report(m, f, file);
    std::cout << file.string() << "\n";
  }
  return 0;
}

int cmd_export(const Common& common, const std::optional<std::string>& out, std::size_t max_context,
               const std::string& drop, const std::optional<std::string>& counter,
               const std::optional<std::string>& vocab) {
  AppConfig cfg = resolve(common);
  if (counter) cfg.counter = *counter;
  if (vocab) cfg.vocab = *vocab;
  const auto tuples = load_corpus(cfg.corpus_dir);
  const SplitManifest split = read_split(cfg.split_file);
  FinetuneOptions opts;
  opts.context_limit = max_context;
  opts.drop_oversize = on_off("--drop", drop);
  opts.counter = make_counter(cfg);
  if (!cfg.prompts_dir.empty()) opts.templates = PromptTemplates::with_overrides(cfg.prompts_dir);
  const FinetuneExport data = export_finetune(tuples, split, opts);
  const fs::path file = out ? fs::path(*out) : fs::path("finetune.jsonl");
  write_atomic(file, finetune_jsonl(data));
  write_atomic(file.parent_path() / "finetune.schema.json", finetune_schema().dump(2) + "\n");
  std::cout << data.records.size() << " records written to " << file.string() << "\n";
  for (const std::string& f : data.flagged) {
    std::cout << "  over " << max_context << " tokens" << (opts.drop_oversize ? " (dropped)" : "") << ": " << f << "\n";
  }
  return 0;
}

std::string probe_program(Api api) {
  switch (api) {
    case Api::Serial: return "#include <cstdio>\nint main() { std::puts(\"PASS\"); return 0; }\n";
    case Api::OpenMP:
      return "#include <omp.h>\n#include <cstdio>\nint main() {\n  int n = 0;\n#pragma omp parallel reduction(+ : n)\n"
             "  n += 1;\n  std::printf(n >= 1 ? \"PASS\\n\" : \"FAIL\\n\");\n  return 0;\n}\n";
    case Api::CUDA:
      return "#include <cstdio>\n__global__ void k(int* x) { *x = 1; }\nint main() {\n  int* d; int h = 0;\n"
             "  cudaMalloc(&d, sizeof(int));\n  k<<<1, 1>>>(d);\n  cudaMemcpy(&h, d, sizeof(int), cudaMemcpyDeviceToHost);\n"
             "  std::printf(h == 1 ? \"PASS\\n\" : \"FAIL\\n\");\n  return 0;\n}\n";
  }
  return {};
}

int cmd_verify_env(const Common& common, const std::optional<std::string>& backend) {
  AppConfig cfg = resolve(common);
  if (backend) cfg.questioner = parse_backend_flag(*backend, cfg.questioner);
  Toolchain toolchain(cfg.toolchain);
  const fs::path scratch = fs::temp_directory_path() / ("unipar-env-" + std::to_string(::getpid()));
  std::printf("%-16s %-9s %s\n", "component", "status", "detail");
  for (Api api : kAllApis) {
    std::string status = "missing";
    std::string detail = toolchain.program(api) + " not found";
    if (toolchain.available(api)) {
      const CompileResult c = toolchain.compile(probe_program(api), api, scratch / std::string(api_key(api)));
      if (c.status != CompileStatus::ok) {
        status = "broken";
        detail = "probe failed to compile: " + truncate_tail(c.diagnostics, 200);
      } else {
        const RunResult r = toolchain.run_and_verify(*c.artifact_path, std::chrono::seconds(30), {}, Detector{}, api);
        status = r.verdict == Verdict::pass ? "ok" : "no-run";
        detail = toolchain.version(api);
        if (r.verdict != Verdict::pass) detail += " (probe compiled but did not run: " + std::string(to_string(r.verdict)) + ")";
      }
    }
    for (char& ch : detail) ch = ch == '\n' ? ' ' : ch;
    std::printf("%-16s %-9s %s\n", std::string(api_name(api)).c_str(), status.c_str(), detail.c_str());
  }
  fs::remove_all(scratch);

  std::string bstatus = "ok";
  std::string bdetail;
  try {
    if (cfg.questioner.kind == "mock" && cfg.questioner.script.empty()) {
      bstatus = "unset";
      bdetail = "no backend configured (--backend mock:<script> or http)";
    } else {
      bdetail = make_backend(cfg.questioner)->provider();
    }
  } catch (const Error& e) {
    bstatus = "error";
    bdetail = e.what();
  }
  std::printf("%-16s %-9s %s\n", "backend", bstatus.c_str(), bdetail.c_str());
  std::printf("%-16s %-9s %s\n", "UNIPAR_API_KEY", std::getenv("UNIPAR_API_KEY") ? "set" : "unset", "");
  const char* base = std::getenv("UNIPAR_API_BASE");
  std::printf("%-16s %-9s %s\n", "UNIPAR_API_BASE", base ? "set" : "unset", base ? base : "");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"unipar: curate kernel corpora and run LLM translation with compiler and execution feedback"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  Common common;
  PipelineFlags pf;

  auto* curate = app.add_subcommand("curate", "Build the aligned corpus from a benchmark tree");
  std::optional<std::string> root, counter, vocab, verify, categories, out, ratio, half, temps, tokens, shots_list,
      backend_flag;
  std::optional<std::size_t> cutoff;
  std::optional<double> sweep_top_p;
  add_common(curate, common, false, false, false);
  curate->add_option("--root", root, "Benchmark tree (<bench>-cuda/, <bench>-omp/)");
  curate->add_option("--out", out, "Corpus output directory (default corpus)");
  curate->add_option("--cutoff", cutoff, "Keep sources with at most this many tokens");
  curate->add_option("--counter", counter, "approx|vocab");
  curate->add_option("--vocab", vocab, "Vocabulary file for --counter vocab");
  curate->add_option("--verify", verify, "on|off: compile and run every kernel");
  curate->add_option("--categories", categories, "Category sidecar JSON (default <root>/categories.json)");
  curate->add_option("--workers", common.parallelism, "Concurrent verifications");

  auto* split = app.add_subcommand("split", "Split the corpus into train/test per direction");
  std::vector<std::string> split_dirs;
  add_common(split, common, true, false, false);
  split->add_option("--ratio", ratio, "Train fraction (0.9) or train:test (9:1)");
  split->add_option("--seed", common.seed, "Shuffle seed");
  split->add_option("--direction", split_dirs, "Directions to split, repeatable (default all four)");
  split->add_option("--out", out, "Output manifest (default split.json)");

  auto* translate = app.add_subcommand("translate", "Run the pipeline on one task and print its outcome");
  std::string benchmark;
  add_common(translate, common, true, true, true);
  add_pipeline(translate, pf);
  translate->add_option("--benchmark", benchmark, "Benchmark id")->required();
  translate->add_option("--out", out, "Task directory");

  auto* run = app.add_subcommand("run", "Run the pipeline over a split half");
  add_common(run, common, true, true, true);
  add_pipeline(run, pf);
  run->add_option("--half", half, "test|train (default test)");

  auto* sweep = app.add_subcommand("sweep", "Run a temperature x max-tokens x shots grid");
  add_common(sweep, common, true, true, true);
  add_pipeline(sweep, pf);
  sweep->add_option("--temperatures", temps, "Comma list (default 0.2,0.6,0.9)");
  sweep->add_option("--max-tokens-grid", tokens, "Comma list (default 5000,10000,15000)");
  sweep->add_option("--shots-grid", shots_list, "Comma list (default 0,1,2,3)");
  sweep->add_option("--sweep-top-p", sweep_top_p, "Fixed top_p for the grid (default 0.8)");

  auto* report = app.add_subcommand("report", "Regenerate reports from a run directory");
  std::string run_dir;
  std::vector<std::string> formats;
  report->add_option("run_dir", run_dir, "Run directory with manifest.json")->required();
  report->add_option("--format", formats, "md|csv|json, repeatable (default all)");
  report->add_option("--out", out, "Output directory (default the run directory)");

  auto* exportf = app.add_subcommand("export-finetune", "Write instruction-format training pairs");
  std::size_t max_context = 16384;
  std::string drop = "on";
  add_common(exportf, common, true, true, false);
  exportf->add_option("--out", out, "Output JSONL (default finetune.jsonl)");
  exportf->add_option("--max-context", max_context, "Token limit per record");
  exportf->add_option("--drop", drop, "on|off: drop records over the limit (always flagged)");
  exportf->add_option("--counter", counter, "approx|vocab");
  exportf->add_option("--vocab", vocab, "Vocabulary file for --counter vocab");

  auto* env = app.add_subcommand("verify-env", "Check compilers and backends");
  add_common(env, common, false, false, false);
  env->add_option("--backend", backend_flag, "Backend to check");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*curate) return cmd_curate(common, root, cutoff, counter, vocab, verify, categories, out);
    if (*split) return cmd_split(common, ratio, split_dirs, out);
    if (*translate) return cmd_translate(common, pf, benchmark, out);
    if (*run) return cmd_run(common, pf, half);
    if (*sweep) return cmd_sweep(common, pf, temps, tokens, shots_list, sweep_top_p);
    if (*report) return cmd_report(run_dir, formats, out);
    if (*exportf) return cmd_export(common, out, max_context, drop, counter, vocab);
    if (*env) return cmd_verify_env(common, backend_flag);
  } catch (const TaskFailure& f) {
    std::cerr << f.failed << " task(s) failed\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const CorpusError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
