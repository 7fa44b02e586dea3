#include "unipar/tokens.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "unipar/error.hpp"

namespace unipar {

namespace {

std::string unescape_piece(const std::string& line) {
  std::string out;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '\\' && i + 1 < line.size()) {
      const char c = line[++i];
      if (c == 'n') {
        out += '\n';
      } else if (c == 't') {
        out += '\t';
      } else if (c == 's') {
        out += ' ';
      } else {
        out += c;
      }
    } else {
      out += line[i];
    }
  }
  return out;
}

}  // namespace

TokenCounter TokenCounter::from_vocab_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ConfigError("vocabulary file '" + path.string() +
                      "' not found; pass --vocab <file> or use --counter approx");
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  auto vocab = std::make_shared<Vocab>();
  auto add = [&](std::string piece) {
    if (piece.empty()) return;
    vocab->longest = std::max(vocab->longest, piece.size());
    vocab->pieces.insert(std::move(piece));
  };
  if (path.extension() == ".json") {
    const auto doc = nlohmann::json::parse(text, nullptr, false);
    if (!doc.is_object()) throw ConfigError("vocabulary file '" + path.string() + "' is not a JSON object");
    for (const auto& item : doc.items()) add(item.key());
  } else {
    std::istringstream lines(text);
    std::string line;
    while (std::getline(lines, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      add(unescape_piece(line));
    }
  }
  if (vocab->pieces.empty()) throw ConfigError("vocabulary file '" + path.string() + "' is empty");

  TokenCounter counter;
  counter.vocab_ = std::move(vocab);
  return counter;
}

std::size_t TokenCounter::count(std::string_view text) const {
  if (!vocab_) return approx_tokens(text.size());
  std::size_t tokens = 0;
  std::size_t pos = 0;
  std::string probe;
  while (pos < text.size()) {
    std::size_t len = std::min(vocab_->longest, text.size() - pos);
    for (; len > 1; --len) {
      probe.assign(text.substr(pos, len));
      if (vocab_->pieces.contains(probe)) break;
    }
    pos += len;  // len == 1 covers both single-byte pieces and unknown bytes
    ++tokens;
  }
  return tokens;
}

}  // namespace unipar
