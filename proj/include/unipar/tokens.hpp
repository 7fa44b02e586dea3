#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_set>

namespace unipar {

// Token counting for pruning and context guards.
//
// `approx` is ceil(bytes / 4), deterministic and model-agnostic.
// `vocab` counts greedy longest-match pieces against a user-supplied
// vocabulary; bytes not covered by any piece count one token each.
// Vocabulary files are either a JSON object whose keys are the pieces
// (vocab.json style) or plain text with one piece per line, where `\n`,
// `\t`, `\s` and `\\` escape newline, tab, space and backslash.
class TokenCounter {
 public:
  enum class Kind { approx, vocab };

  static TokenCounter approx() { return TokenCounter(); }
  // Throws ConfigError when the file is missing or empty.
  static TokenCounter from_vocab_file(const std::filesystem::path& path);

  Kind kind() const { return vocab_ ? Kind::vocab : Kind::approx; }
  std::string name() const { return vocab_ ? "vocab" : "approx"; }
  std::size_t count(std::string_view text) const;

 private:
  struct Vocab {
    std::unordered_set<std::string> pieces;
    std::size_t longest = 0;
  };
  TokenCounter() = default;
  std::shared_ptr<const Vocab> vocab_;
};

inline std::size_t approx_tokens(std::size_t bytes) { return (bytes + 3) / 4; }

}  // namespace unipar
