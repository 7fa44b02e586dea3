#include "unipar/agents.hpp"

#include <atomic>
#include <chrono>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>

#include "unipar/error.hpp"
#include "unipar/parallel.hpp"
#include "unipar/random.hpp"

namespace unipar {

namespace fs = std::filesystem;
using nlohmann::json;

void PipelineConfig::validate() const {
  gen.validate();
  auto check = [](const char* name, int value, int hi) {
    if (value < 0 || value > hi) {
      throw ConfigError(std::string(name) + " must be in [0, " + std::to_string(hi) + "], got " +
                        std::to_string(value));
    }
  };
  check("compile_rounds", compile_rounds, 3);
  check("exec_rounds", exec_rounds, 3);
  check("transplant_rounds", transplant_rounds, 3);
  check("shots", shots, 3);
}

json to_json(const PipelineConfig& c) {
  return json{{"generation", to_json(c.gen)},
              {"shots", c.shots},
              {"compile_rounds", c.compile_rounds},
              {"exec_rounds", c.exec_rounds},
              {"transplant_rounds", c.transplant_rounds},
              {"agentic", c.agentic},
              {"seed", c.seed},
              {"shot_seed", "seed ^ fnv1a(task_id)"},
              {"retries", c.retry.retries},
              {"backoff_base_ms", c.retry.backoff_base.count()},
              {"diagnostics_budget", c.diagnostics_budget}};
}

std::uint64_t shot_seed(std::uint64_t run_seed, const std::string& task_id) { return run_seed ^ fnv1a(task_id); }

namespace {

std::string run_summary(const RunResult& run) {
  std::ostringstream s;
  s << "exit code: " << run.exit_code << "\nverdict: " << to_string(run.verdict) << "\n";
  if (!run.stdout_text.empty()) s << "stdout:\n" << run.stdout_text << (run.stdout_text.ends_with('\n') ? "" : "\n");
  if (!run.stderr_text.empty()) s << "stderr:\n" << run.stderr_text << (run.stderr_text.ends_with('\n') ? "" : "\n");
  return s.str();
}

class TaskRunner {
 public:
  TaskRunner(const TranslationTask& task, const PipelineConfig& config, PipelineEnv& env, const fs::path& task_dir)
      : task_(task), config_(config), env_(env), task_dir_(task_dir), target_(task.direction.to) {
    fs::create_directories(task_dir_);
    trace_.open(task_dir_ / "trace.jsonl", std::ios::app);
    out_.task_id = task.id();
    out_.benchmark_id = task.benchmark_id;
    out_.direction = task.direction;
    out_.category = task.category;
  }

  PipelineOutcome run() {
    const auto start = std::chrono::steady_clock::now();
    try {
      if (!env_.toolchain.available(target_)) {
        skip("toolchain_missing: '" + env_.toolchain.program(target_) + "' not found");
      } else {
        stages();
      }
    } catch (const LlmError& e) {
      out_.skipped_reason = std::string("backend error (") + to_string(e.kind()) + "): " + e.what();
    } catch (const MainNotFound& e) {
      out_.skipped_reason = e.what();
    } catch (const Skip&) {
    }
    out_.duration_ms =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    return std::move(out_);
  }

 private:
  struct Skip {};

  [[noreturn]] void skip(std::string reason) {
    out_.skipped_reason = std::move(reason);
    throw Skip{};
  }

  std::pair<fs::path, std::string> next_workspace() {
    std::string rel = "round_" + std::to_string(next_round_++);
    return {task_dir_ / rel, rel};
  }

  void push(RoundRecord record) {
    trace_ << to_json(record).dump() << "\n";
    trace_.flush();
    out_.trace.push_back(std::move(record));
  }

  // Sends a prompt; an empty completion is recorded and leaves `code` as it was.
  void ask(Backend& backend, const PromptBundle& bundle, Stage stage, int round, RoundRecord& rec,
           std::string& code) {
    rec.stage = stage;
    rec.round_index = round;
    rec.prompt_hash = sha256_hex(bundle.transcript());
    try {
      const std::string response =
          complete(backend, bundle, config_.gen, CallContext{out_.task_id, stage, round}, env_.log, config_.retry);
      rec.response_hash = sha256_hex(response);
      code = extract_code(response, target_);
    } catch (const LlmError& e) {
      if (e.kind() != LlmError::Kind::EmptyCompletion) throw;
      if (rec.response_hash.empty()) rec.response_hash = sha256_hex("");
      rec.note = "empty completion";
    }
  }

  CompileResult compile(const std::string& code, RoundRecord& rec) {
    auto [path, rel] = next_workspace();
    rec.workspace = rel;
    CompileResult result = env_.toolchain.compile(code, target_, path);
    rec.compile = result;
    return result;
  }

  void stages() {
    // Questioner.
    const auto shots = select_shots(env_.shot_pool, task_.direction, config_.shots,
                                    shot_seed(config_.seed, out_.task_id), task_.benchmark_id);
    std::string code;
    RoundRecord rec;
    ask(env_.questioner, render_translation_prompt(task_, shots, config_.templates), Stage::translate, 0, rec, code);
    CompileResult compiled = compile(code, rec);
    push(rec);

    // Compilation agent.
    for (int k = 1; compiled.status == CompileStatus::failed && k <= config_.effective_compile_rounds(); ++k) {
      RoundRecord r;
      ask(env_.repair,
          render_repair_prompt(RepairKind::compile, code, compiled.diagnostics, task_.direction,
                               config_.diagnostics_budget, config_.templates),
          Stage::compile_repair, k, r, code);
      compiled = compile(code, r);
      push(r);
    }
    if (compiled.status == CompileStatus::toolchain_missing) skip("toolchain_missing: " + compiled.diagnostics);
    if (compiled.status != CompileStatus::ok) return;
    out_.compiled = true;
    out_.success_stage = StagePoint{out_.trace.back().stage, out_.trace.back().round_index};

    // Ground-truth main transplant, with its own repair budget.
    TransplantSummary& ts = out_.transplant;
    ts.attempted = true;
    const TransplantOutcome merged = transplant_main(code, task_.ground_truth);
    ts.main_replaced = merged.main_replaced;
    std::string current = merged.merged_source;
    auto [path, rel] = next_workspace();
    ts.workspace = rel;
    CompileResult mc = env_.toolchain.compile(current, target_, path);
    ts.compile = mc;
    if (mc.status == CompileStatus::toolchain_missing) skip("toolchain_missing: " + mc.diagnostics);
    std::filesystem::path artifact;
    if (mc.status == CompileStatus::ok) {
      ts.compiled = true;
      artifact = *mc.artifact_path;
    } else {
      auto record_attempt = [this](const RepairAttempt& a) {
        RoundRecord r;
        r.stage = Stage::transplant_repair;
        r.round_index = a.round;
        r.prompt_hash = a.prompt_hash;
        r.response_hash = a.response_hash;
        r.compile = a.compile;
        r.workspace = a.workspace;
        push(std::move(r));
      };
      RepairEnv renv{env_.repair,          env_.log,         env_.toolchain,
                     out_.task_id,         task_.direction,  config_.gen,
                     config_.retry,        config_.templates, config_.diagnostics_budget,
                     [this] { return next_workspace(); }, record_attempt};
      const TransplantOutcome repaired = repair_transplant(current, mc.diagnostics, renv, config_.transplant_rounds);
      ts.repair_rounds_used = repaired.repair_rounds_used;
      ts.kernel_guard = repaired.kernel_guard;
      ts.compiled = repaired.compiled;
      if (!repaired.compiled && repaired.final_compile &&
          repaired.final_compile->status == CompileStatus::toolchain_missing) {
        skip("toolchain_missing during transplant repair");
      }
      if (!repaired.compiled || repaired.kernel_guard == KernelGuard::changed) return;
      current = repaired.merged_source;
      artifact = *repaired.final_compile->artifact_path;
    }

    // Verification run, then the execution agent.
    const Detector& detector = env_.toolchain.detector_for(task_.benchmark_id);
    const auto timeout = std::chrono::duration_cast<std::chrono::milliseconds>(env_.toolchain.config().run_timeout);
    RunResult run = env_.toolchain.run_and_verify(artifact, timeout, {}, detector, target_);
    ts.run = run;
    if (run.verdict == Verdict::pass) {
      out_.validated = true;
      out_.validation_stage = StagePoint{out_.trace.back().stage, out_.trace.back().round_index};
      return;
    }
    std::string feedback = run_summary(run);
    for (int k = 1; k <= config_.effective_exec_rounds(); ++k) {
      RoundRecord r;
      std::string candidate = current;
      ask(env_.repair,
          render_repair_prompt(RepairKind::runtime, current, feedback, task_.direction, config_.diagnostics_budget,
                               config_.templates),
          Stage::exec_repair, k, r, candidate);
      // The verification main goes back in so the benchmark's own check still runs.
      current = transplant_main(candidate, task_.ground_truth).merged_source;
      const CompileResult c = compile(current, r);
      if (c.status == CompileStatus::toolchain_missing) {
        push(r);
        skip("toolchain_missing: " + c.diagnostics);
      }
      if (c.status != CompileStatus::ok) {
        feedback = c.diagnostics;
        push(r);
        continue;
      }
      run = env_.toolchain.run_and_verify(*c.artifact_path, timeout, {}, detector, target_);
      r.run = run;
      push(r);
      if (run.verdict == Verdict::pass) {
        out_.validated = true;
        out_.validation_stage = StagePoint{Stage::exec_repair, k};
        return;
      }
      feedback = run_summary(run);
    }
  }

  const TranslationTask& task_;
  const PipelineConfig& config_;
  PipelineEnv& env_;
  fs::path task_dir_;
  Api target_;
  std::ofstream trace_;
  PipelineOutcome out_;
  int next_round_ = 0;
};

}  // namespace

PipelineOutcome run_pipeline(const TranslationTask& task, const PipelineConfig& config, PipelineEnv& env,
                             const fs::path& task_dir) {
  return TaskRunner(task, config, env, task_dir).run();
}

void write_atomic(const fs::path& path, std::string_view text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<PipelineOutcome> read_outcomes(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error("outcomes file not found: " + file.string());
  std::vector<PipelineOutcome> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty()) out.push_back(outcome_from_json(json::parse(line)));
  }
  return out;
}

namespace {

std::optional<PipelineOutcome> load_sealed(const fs::path& file, const std::string& task_id) {
  std::ifstream in(file);
  if (!in) return std::nullopt;
  try {
    PipelineOutcome o = outcome_from_json(json::parse(in));
    if (o.task_id == task_id) return o;
  } catch (const std::exception&) {
  }
  return std::nullopt;
}

}  // namespace

std::vector<PipelineOutcome> run_batch(std::span<const TranslationTask> tasks, const PipelineConfig& config,
                                       PipelineEnv& env, const BatchOptions& options) {
  config.validate();
  fs::create_directories(options.run_dir);
  std::set<std::string> ids;
  for (const TranslationTask& t : tasks) {
    if (!ids.insert(t.id()).second) throw Error("duplicate task id in batch: " + t.id());
  }

  std::vector<std::optional<PipelineOutcome>> results(tasks.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    results[i] = load_sealed(options.run_dir / tasks[i].id() / "outcome.json", tasks[i].id());
    if (!results[i]) pending.push_back(i);
  }

  std::mutex sealed_mutex;
  std::size_t sealed = 0;
  parallel_for(pending.size(), options.parallelism, [&](std::size_t j) {
    const TranslationTask& task = tasks[pending[j]];
    const fs::path task_dir = options.run_dir / task.id();
    // Leftovers of an interrupted attempt are discarded; the task reruns from scratch.
    fs::remove_all(task_dir);
    PipelineOutcome outcome = run_pipeline(task, config, env, task_dir);
    write_atomic(task_dir / "outcome.json", to_json(outcome).dump(2) + "\n");
    std::lock_guard lock(sealed_mutex);
    results[pending[j]] = outcome;
    ++sealed;
    if (options.on_sealed) options.on_sealed(outcome, sealed);
  });

  std::vector<PipelineOutcome> outcomes;
  std::string jsonl;
  for (auto& r : results) {
    jsonl += to_json(*r).dump() + "\n";
    outcomes.push_back(std::move(*r));
  }
  write_atomic(options.run_dir / "outcomes.jsonl", jsonl);
  return outcomes;
}

}  // namespace unipar
