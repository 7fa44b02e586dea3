#include "unipar/toolchain.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include "unipar/error.hpp"
#include "unipar/lexer.hpp"
#include "unipar/process.hpp"

namespace unipar {

namespace fs = std::filesystem;
using nlohmann::json;

const char* to_string(CompileStatus status) {
  switch (status) {
    case CompileStatus::ok: return "ok";
    case CompileStatus::failed: return "failed";
    case CompileStatus::toolchain_missing: return "toolchain_missing";
  }
  return "?";
}

const char* to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::timeout: return "timeout";
    case Verdict::crash: return "crash";
  }
  return "?";
}

const char* to_string(KernelGuard guard) {
  switch (guard) {
    case KernelGuard::unchanged: return "unchanged";
    case KernelGuard::changed: return "changed";
    case KernelGuard::not_checked: return "not_checked";
  }
  return "?";
}

namespace {

bool search_any(const std::vector<std::string>& patterns, const std::string& text) {
  for (const std::string& p : patterns) {
    if (std::regex_search(text, std::regex(p, std::regex::ECMAScript | std::regex::icase))) return true;
  }
  return false;
}

void write_file(const fs::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string first_word(const std::string& cmd) {
  std::istringstream in(cmd);
  std::string word;
  in >> word;
  return word;
}

template <typename T>
T enum_from(const std::string& text, std::initializer_list<T> values) {
  for (T v : values) {
    if (text == to_string(v)) return v;
  }
  throw Error("unknown value '" + text + "'");
}

}  // namespace

bool Detector::matches(std::string_view out, std::string_view err) const {
  std::string text(out);
  text += '\n';
  text.append(err);
  return search_any(pass_patterns, text) && !search_any(fail_patterns, text);
}

Toolchain::Toolchain(ToolchainConfig config)
    : config_(std::move(config)),
      device_slots_(std::make_shared<std::counting_semaphore<>>(std::max(1u, config_.device_slots))) {}

std::string Toolchain::program(Api api) const {
  const auto it = config_.commands.find(api);
  return it == config_.commands.end() ? std::string() : first_word(it->second);
}

bool Toolchain::available(Api api) const { return program_exists(program(api)); }

std::string Toolchain::version(Api api) const {
  if (!available(api)) return "";
  ProcessOptions opts;
  opts.argv = {program(api), "--version"};
  opts.timeout = std::chrono::seconds(20);
  opts.merge_stderr = true;
  const ProcessResult r = run_process(opts);
  std::string line = r.out.substr(0, r.out.find('\n'));
  return line;
}

const Detector& Toolchain::detector_for(const std::string& benchmark_id) const {
  const auto it = config_.benchmark_detectors.find(benchmark_id);
  return it == config_.benchmark_detectors.end() ? config_.detector : it->second;
}

CompileResult Toolchain::compile(std::string_view source, Api api, const fs::path& workspace) const {
  CompileResult result;
  fs::create_directories(workspace / "src");
  const std::string src_rel = "src/main" + std::string(source_extension(api));
  write_file(workspace / src_rel, source);

  const auto cmd_it = config_.commands.find(api);
  if (cmd_it == config_.commands.end() || !available(api)) {
    result.status = CompileStatus::toolchain_missing;
    result.diagnostics = "no " + std::string(api_name(api)) + " compiler available (command: " +
                         (cmd_it == config_.commands.end() ? std::string("none") : cmd_it->second) + ")";
    write_file(workspace / "compile.log", result.diagnostics);
    return result;
  }

  const std::string cmd =
      substitute(cmd_it->second, {{"src", shell_quote(src_rel)}, {"out", shell_quote("bin")}});
  ProcessOptions opts;
  opts.argv = {"/bin/sh", "-c", cmd};
  opts.cwd = workspace;
  opts.timeout = config_.compile_timeout;
  opts.output_cap = config_.output_cap;
  opts.merge_stderr = true;
  const ProcessResult p = run_process(opts);

  result.duration_ms = p.elapsed.count();
  result.diagnostics = p.out;
  if (p.timed_out) {
    result.status = CompileStatus::failed;
    result.diagnostics += "\ncompilation timed out after " + std::to_string(config_.compile_timeout.count()) + " s";
  } else if (p.exit_code == 127) {
    result.status = CompileStatus::toolchain_missing;
  } else if (p.exit_code == 0 && fs::exists(workspace / "bin")) {
    result.status = CompileStatus::ok;
    result.artifact_path = fs::absolute(workspace / "bin");
  } else {
    result.status = CompileStatus::failed;
    if (result.diagnostics.empty()) result.diagnostics = "compiler exited with status " + std::to_string(p.exit_code);
  }
  write_file(workspace / "compile.log", "$ " + cmd + "\n" + result.diagnostics);
  return result;
}

RunResult Toolchain::run_and_verify(const fs::path& artifact, std::chrono::milliseconds timeout,
                                    std::span<const std::string> args, const Detector& detector, Api api) const {
  ProcessOptions opts;
  opts.argv.push_back(fs::absolute(artifact).string());
  opts.argv.insert(opts.argv.end(), args.begin(), args.end());
  opts.cwd = artifact.parent_path();
  opts.timeout = timeout;
  opts.output_cap = config_.output_cap;

  ProcessResult p;
  if (api == Api::CUDA) {
    device_slots_->acquire();
    p = run_process(opts);
    device_slots_->release();
  } else {
    p = run_process(opts);
  }

  RunResult r;
  r.exit_code = p.exit_code;
  r.stdout_text = std::move(p.out);
  r.stderr_text = std::move(p.err);
  r.duration_ms = p.elapsed.count();
  if (p.timed_out) {
    r.verdict = Verdict::timeout;
  } else if (!p.spawned || p.term_signal != 0) {
    r.verdict = Verdict::crash;
  } else if (p.exit_code != 0) {
    r.verdict = Verdict::fail;
  } else {
    r.verdict = detector.matches(r.stdout_text, r.stderr_text) ? Verdict::pass : Verdict::fail;
  }

  std::ostringstream log;
  log << "verdict: " << to_string(r.verdict) << "\nexit_code: " << r.exit_code << "\nsignal: " << p.term_signal
      << "\n--- stdout ---\n"
      << r.stdout_text << (p.out_truncated ? "\n[truncated]" : "") << "\n--- stderr ---\n"
      << r.stderr_text << (p.err_truncated ? "\n[truncated]" : "") << "\n";
  write_file(artifact.parent_path() / "run.log", log.str());
  return r;
}

RunResult Toolchain::run_and_verify(const fs::path& artifact, Api api, const std::string& benchmark_id) const {
  return run_and_verify(artifact, config_.run_timeout, {}, detector_for(benchmark_id), api);
}

namespace {

using TokenStream = std::vector<std::string>;

std::vector<std::pair<std::string, TokenStream>> kernel_streams(std::string_view src) {
  const auto tokens = lex::tokenize(src);
  std::vector<std::pair<std::string, TokenStream>> out;
  for (const lex::FunctionDef& def : lex::find_function_definitions(src, tokens)) {
    if (def.top_level && def.name == "main") continue;
    TokenStream stream;
    for (std::size_t i = def.first_token; i <= def.last_token; ++i) stream.emplace_back(tokens[i].text);
    out.emplace_back(def.name, std::move(stream));
  }
  return out;
}

}  // namespace

KernelGuard kernel_guard_check(std::string_view before, std::string_view after) {
  try {
    return kernel_streams(before) == kernel_streams(after) ? KernelGuard::unchanged : KernelGuard::changed;
  } catch (const LexError&) {
    return KernelGuard::changed;
  }
}

TransplantOutcome transplant_main(std::string_view generated, std::string_view ground_truth) {
  if (generated.empty() || ground_truth.empty()) throw Error("transplant_main needs non-empty sources");
  const auto truth_main = lex::find_main(ground_truth);
  if (!truth_main) throw MainNotFound(MainNotFound::Which::ground_truth);
  const std::string_view main_text = ground_truth.substr(truth_main->begin, truth_main->end - truth_main->begin);

  TransplantOutcome out;
  std::optional<lex::FunctionDef> gen_main;
  try {
    gen_main = lex::find_main(generated);
  } catch (const LexError&) {
    gen_main.reset();
  }
  if (gen_main) {
    out.main_replaced = true;
    out.merged_source.reserve(generated.size() + main_text.size());
    out.merged_source.append(generated.substr(0, gen_main->begin));
    out.merged_source.append(main_text);
    out.merged_source.append(generated.substr(gen_main->end));
  } else {
    out.merged_source.assign(generated);
    if (out.merged_source.back() != '\n') out.merged_source += '\n';
    out.merged_source += '\n';
    out.merged_source.append(main_text);
    out.merged_source += '\n';
  }
  return out;
}

TransplantOutcome repair_transplant(const std::string& merged, const std::string& diagnostics, RepairEnv& env,
                                    int budget) {
  TransplantOutcome out;
  out.merged_source = merged;
  out.diagnostics.push_back(diagnostics);
  std::string current = merged;
  std::string current_diag = diagnostics;

  for (int round = 1; round <= budget; ++round) {
    const PromptBundle prompt = render_repair_prompt(RepairKind::compile, current, current_diag, env.direction,
                                                     env.diagnostics_budget, env.templates);
    RepairAttempt attempt;
    attempt.round = round;
    attempt.prompt_hash = sha256_hex(prompt.transcript());
    auto [workspace, rel] = env.next_workspace();
    attempt.workspace = rel;
    out.repair_rounds_used = round;
    // An empty completion is a failed round; the candidate stays as it was.
    try {
      const std::string response = complete(env.backend, prompt, env.gen,
                                            CallContext{env.task_id, Stage::transplant_repair, round}, env.log,
                                            env.retry);
      attempt.response_hash = sha256_hex(response);
      current = extract_code(response, env.direction.to);
      attempt.compile = env.toolchain.compile(current, env.direction.to, workspace);
    } catch (const LlmError& e) {
      if (e.kind() != LlmError::Kind::EmptyCompletion) throw;
      if (attempt.response_hash.empty()) attempt.response_hash = sha256_hex("");
      attempt.compile.status = CompileStatus::failed;
      attempt.compile.diagnostics = e.what();
    }
    out.attempts.push_back(attempt);
    if (env.on_attempt) env.on_attempt(attempt);

    if (attempt.compile.status == CompileStatus::ok) {
      out.compiled = true;
      out.merged_source = current;
      out.final_compile = attempt.compile;
      out.kernel_guard = kernel_guard_check(merged, current);
      return out;
    }
    if (attempt.compile.status == CompileStatus::toolchain_missing) break;
    current_diag = attempt.compile.diagnostics;
    out.diagnostics.push_back(current_diag);
  }
  out.merged_source = current;
  return out;
}

json to_json(const CompileResult& r, std::size_t text_cap) {
  return json{{"status", to_string(r.status)},
              {"diagnostics", truncate_tail(r.diagnostics, text_cap)},
              {"duration_ms", r.duration_ms}};
}

json to_json(const RunResult& r, std::size_t text_cap) {
  return json{{"exit_code", r.exit_code},
              {"verdict", to_string(r.verdict)},
              {"stdout", truncate_tail(r.stdout_text, text_cap)},
              {"stderr", truncate_tail(r.stderr_text, text_cap)},
              {"duration_ms", r.duration_ms}};
}

CompileResult compile_result_from_json(const json& j) {
  CompileResult r;
  r.status = enum_from(j.at("status").get<std::string>(),
                       {CompileStatus::ok, CompileStatus::failed, CompileStatus::toolchain_missing});
  r.diagnostics = j.value("diagnostics", "");
  r.duration_ms = j.value("duration_ms", 0);
  return r;
}

RunResult run_result_from_json(const json& j) {
  RunResult r;
  r.exit_code = j.value("exit_code", -1);
  r.verdict = enum_from(j.at("verdict").get<std::string>(),
                        {Verdict::pass, Verdict::fail, Verdict::timeout, Verdict::crash});
  r.stdout_text = j.value("stdout", "");
  r.stderr_text = j.value("stderr", "");
  r.duration_ms = j.value("duration_ms", 0);
  return r;
}

}  // namespace unipar
