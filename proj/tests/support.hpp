#pragma once

// Shared helpers for the unit and acceptance tests.

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "unipar/agents.hpp"
#include "unipar/api.hpp"
#include "unipar/llm.hpp"
#include "unipar/toolchain.hpp"

namespace unipar::test {

namespace fs = std::filesystem;

inline fs::path testdata() { return fs::path(UNIPAR_TESTDATA_DIR); }

inline std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

inline void write_file(const fs::path& p, std::string_view text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(std::string_view tag = "t") {
    std::random_device rd;
    path_ = fs::temp_directory_path() /
            ("unipar-" + std::string(tag) + "-" + std::to_string(rd()) + std::to_string(rd()));
    fs::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

// Every api compiles with the stand-in compiler from testdata/fake_cc.sh.
inline ToolchainConfig fake_toolchain_config() {
  ToolchainConfig c;
  const std::string cmd = (testdata() / "fake_cc.sh").string() + " {src} {out}";
  for (Api a : kAllApis) c.commands[a] = cmd;
  c.compile_timeout = std::chrono::seconds(30);
  c.run_timeout = std::chrono::seconds(30);
  return c;
}

inline PipelineConfig fast_config() {
  PipelineConfig c;
  c.retry.retries = 0;
  c.retry.backoff_base = std::chrono::milliseconds(0);
  return c;
}

// Candidate code for the fake compiler.
inline std::string good_code(const std::string& tag = "k") {
  return "void " + tag + "(int* a) { a[0] = 1; }\nint main() { return 0; }\n";
}
inline std::string broken_code(const std::string& tag = "k") {
  return "void " + tag + "(int* a) { a[0] = 1; SYNTAX_ERROR }\nint main() { return 0; }\n";
}
inline std::string wrong_output_code(const std::string& tag = "k") {
  return "void " + tag + "(int* a) { a[0] = 2; /* WRONG_OUTPUT */ }\nint main() { return 0; }\n";
}

inline TranslationTask synthetic_task(const std::string& benchmark, Direction d = {Api::Serial, Api::OpenMP},
                                      const std::string& category = "") {
  TranslationTask t;
  t.benchmark_id = benchmark;
  t.direction = d;
  t.source_code = "void " + benchmark + "(int* a) { a[0] = 1; }\nint main() { return 0; }\n";
  t.ground_truth = "void ref(int* a) { a[0] = 1; }\nint main() {\n  int a[1];\n  ref(a);\n  return 0;\n}\n";
  t.category = category;
  return t;
}

// Script for one task: translate responds with `first`, compile repair round k with `repairs[k-1]`.
inline void script_task(std::vector<ScriptedBehavior>& script, const std::string& task_id, const std::string& first,
                        const std::vector<std::string>& repairs = {}) {
  script.push_back({task_id, Stage::translate, 0, first});
  for (std::size_t k = 0; k < repairs.size(); ++k) {
    script.push_back({task_id, Stage::compile_repair, static_cast<int>(k + 1), repairs[k]});
  }
}

}  // namespace unipar::test
