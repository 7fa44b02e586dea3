#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

namespace unipar {

struct ProcessOptions {
  std::vector<std::string> argv;
  std::filesystem::path cwd;  // empty: inherit
  std::chrono::milliseconds timeout{std::chrono::seconds(300)};
  std::size_t output_cap = 4u << 20;  // per stream
  bool merge_stderr = false;          // stderr goes to the stdout capture
};

struct ProcessResult {
  bool spawned = false;
  int exit_code = -1;     // valid when the process exited normally
  int term_signal = 0;    // nonzero when killed by a signal
  bool timed_out = false;
  std::string out;
  std::string err;
  bool out_truncated = false;
  bool err_truncated = false;
  std::chrono::milliseconds elapsed{0};
};

// Runs argv[0] (PATH lookup) in its own process group with stdin from /dev/null.
// On timeout the whole group is killed. Output beyond the cap is discarded
// (the head is kept) and flagged as truncated.
ProcessResult run_process(const ProcessOptions& options);

// Resolves a program name against PATH; absolute/relative paths are checked directly.
bool program_exists(const std::string& program);

// Single-quotes a string for /bin/sh.
std::string shell_quote(const std::string& text);

}  // namespace unipar
