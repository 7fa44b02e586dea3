#include "unipar/process.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <cstdlib>
#include <sstream>

namespace unipar {

namespace {

using Clock = std::chrono::steady_clock;

struct Pipe {
  int read = -1;
  int write = -1;

  Pipe() {
    int fds[2];
    if (::pipe2(fds, O_CLOEXEC) == 0) {
      read = fds[0];
      write = fds[1];
    }
  }
  Pipe(const Pipe&) = delete;
  Pipe& operator=(const Pipe&) = delete;
  ~Pipe() {
    close_read();
    close_write();
  }
  bool ok() const { return read >= 0 && write >= 0; }
  void close_read() {
    if (read >= 0) ::close(read);
    read = -1;
  }
  void close_write() {
    if (write >= 0) ::close(write);
    write = -1;
  }
};

void append_capped(std::string& sink, const char* data, std::size_t n, std::size_t cap, bool& truncated) {
  if (sink.size() < cap) {
    const std::size_t room = cap - sink.size();
    sink.append(data, std::min(room, n));
    if (n > room) truncated = true;
  } else if (n > 0) {
    truncated = true;
  }
}

}  // namespace

std::string shell_quote(const std::string& text) {
  std::string out = "'";
  for (char c : text) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += "'";
  return out;
}

bool program_exists(const std::string& program) {
  if (program.empty()) return false;
  auto executable = [](const std::string& path) {
    struct stat st {};
    return ::stat(path.c_str(), &st) == 0 && S_ISREG(st.st_mode) && ::access(path.c_str(), X_OK) == 0;
  };
  if (program.find('/') != std::string::npos) return executable(program);
  const char* path_env = std::getenv("PATH");
  std::stringstream dirs(path_env ? path_env : "/usr/local/bin:/usr/bin:/bin");
  std::string dir;
  while (std::getline(dirs, dir, ':')) {
    if (dir.empty()) dir = ".";
    if (executable(dir + "/" + program)) return true;
  }
  return false;
}

ProcessResult run_process(const ProcessOptions& options) {
  ProcessResult result;
  if (options.argv.empty()) return result;

  Pipe out_pipe;
  Pipe err_pipe;
  if (!out_pipe.ok() || !err_pipe.ok()) return result;

  // Everything the child touches is prepared before fork.
  std::vector<char*> argv;
  argv.reserve(options.argv.size() + 1);
  for (const std::string& arg : options.argv) argv.push_back(const_cast<char*>(arg.c_str()));
  argv.push_back(nullptr);
  const std::string cwd = options.cwd.string();
  const int err_target = options.merge_stderr ? out_pipe.write : err_pipe.write;

  const auto start = Clock::now();
  const pid_t pid = ::fork();
  if (pid < 0) return result;
  if (pid == 0) {
    ::setpgid(0, 0);
    const int devnull = ::open("/dev/null", O_RDONLY);
    if (devnull >= 0) ::dup2(devnull, STDIN_FILENO);
    ::dup2(out_pipe.write, STDOUT_FILENO);
    ::dup2(err_target, STDERR_FILENO);
    if (!cwd.empty() && ::chdir(cwd.c_str()) != 0) ::_exit(126);
    ::execvp(argv[0], argv.data());
    ::_exit(127);
  }
  ::setpgid(pid, pid);
  result.spawned = true;
  out_pipe.close_write();
  err_pipe.close_write();

  const auto deadline = start + options.timeout;
  std::array<char, 65536> buffer{};
  bool exited = false;
  int status = 0;

  auto reap = [&](int flags) {
    if (exited) return;
    const pid_t r = ::waitpid(pid, &status, flags);
    if (r == pid) exited = true;
  };

  while (out_pipe.read >= 0 || err_pipe.read >= 0) {
    const auto now = Clock::now();
    if (now >= deadline) {
      result.timed_out = true;
      break;
    }
    std::array<pollfd, 2> fds{};
    nfds_t count = 0;
    if (out_pipe.read >= 0) fds[count++] = pollfd{out_pipe.read, POLLIN, 0};
    if (err_pipe.read >= 0) fds[count++] = pollfd{err_pipe.read, POLLIN, 0};
    const auto wait_ms = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - now).count();
    const int ready = ::poll(fds.data(), count, static_cast<int>(std::min<long long>(wait_ms, 100)));
    if (ready < 0 && errno != EINTR) break;
    for (nfds_t k = 0; k < count; ++k) {
      if (fds[k].revents == 0) continue;
      const bool is_out = fds[k].fd == out_pipe.read;
      const ssize_t n = ::read(fds[k].fd, buffer.data(), buffer.size());
      if (n > 0) {
        if (is_out) {
          append_capped(result.out, buffer.data(), static_cast<std::size_t>(n), options.output_cap,
                        result.out_truncated);
        } else {
          append_capped(result.err, buffer.data(), static_cast<std::size_t>(n), options.output_cap,
                        result.err_truncated);
        }
      } else if (n == 0 || (errno != EINTR && errno != EAGAIN)) {
        if (is_out) {
          out_pipe.close_read();
        } else {
          err_pipe.close_read();
        }
      }
    }
    // Background grandchildren may keep the pipes open after the child exits.
    reap(WNOHANG);
    if (exited) {
      ::kill(-pid, SIGKILL);
    }
  }

  if (!exited) {
    while (Clock::now() < deadline) {
      reap(WNOHANG);
      if (exited) break;
      ::usleep(2000);
    }
    if (!exited) {
      result.timed_out = true;
      ::kill(-pid, SIGKILL);
      reap(0);
    }
  }
  ::kill(-pid, SIGKILL);

  result.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - start);
  if (result.timed_out) {
    result.term_signal = SIGKILL;
  } else if (WIFEXITED(status)) {
    result.exit_code = WEXITSTATUS(status);
  } else if (WIFSIGNALED(status)) {
    result.term_signal = WTERMSIG(status);
  }
  return result;
}

}  // namespace unipar
