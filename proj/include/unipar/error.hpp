#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace unipar {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bad configuration, unknown keys, malformed flags. The CLI maps this to exit code 2.
class ConfigError : public Error {
 public:
  using Error::Error;
};

class CorpusError : public Error {
 public:
  using Error::Error;
};

class LexError : public Error {
 public:
  LexError(const std::string& what, std::size_t offset) : Error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

class LlmError : public Error {
 public:
  enum class Kind {
    RateLimited,      // retryable; surfaced once the retry budget is spent
    Transport,        // retryable connection / 5xx failure
    ContextOverflow,  // prompt estimate + max_tokens exceeds the backend window
    EmptyCompletion,
    ScriptMiss,       // mock backend has no scripted response for the key
    BadResponse,      // response body did not have the expected shape
  };

  LlmError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const noexcept { return kind_; }
  bool retryable() const noexcept { return kind_ == Kind::RateLimited || kind_ == Kind::Transport; }

 private:
  Kind kind_;
};

const char* to_string(LlmError::Kind kind);

class MainNotFound : public Error {
 public:
  enum class Which { generated, ground_truth };

  explicit MainNotFound(Which which)
      : Error(which == Which::generated ? "main not found in generated code"
                                        : "main not found in ground-truth code"),
        which_(which) {}
  Which which() const noexcept { return which_; }

 private:
  Which which_;
};

}  // namespace unipar
