#include "unipar/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>

#include "unipar/error.hpp"

namespace unipar::lex {

namespace {

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$' || c >= 0x80; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$' || c >= 0x80; }
bool blank(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

// Longest first within each length class.
constexpr std::array<std::string_view, 27> kPuncts{
    "<<=", ">>=", "->*", "...", "<=>", "::", "->", "++", "--", "<<", ">>", "<=", ">=", "==",
    "!=",  "&&",  "||",  "+=",  "-=",  "*=", "/=", "%=", "&=", "|=", "^=", ".*", "##"};

class Scanner {
 public:
  explicit Scanner(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    while (pos_ < src_.size()) step();
    return std::move(tokens_);
  }

 private:
  char at(std::size_t i) const { return i < src_.size() ? src_[i] : '\0'; }

  // A backslash followed by a newline (optionally CRLF). Returns its length or 0.
  std::size_t splice_len(std::size_t i) const {
    if (at(i) != '\\') return 0;
    if (at(i + 1) == '\n') return 2;
    if (at(i + 1) == '\r' && at(i + 2) == '\n') return 3;
    return 0;
  }

  void emit(TokenKind kind, std::size_t begin, std::size_t end) {
    tokens_.push_back(Token{kind, begin, end, src_.substr(begin, end - begin),
                            in_directive_ ? directive_count_ - 1 : -1});
  }

  void step() {
    const char c = src_[pos_];
    if (c == '\n') {
      in_directive_ = false;
      line_start_ = true;
      ++pos_;
      return;
    }
    if (std::size_t s = splice_len(pos_)) {
      pos_ += s;
      return;
    }
    if (blank(c)) {
      ++pos_;
      return;
    }
    if (c == '/' && at(pos_ + 1) == '/') return line_comment();
    if (c == '/' && at(pos_ + 1) == '*') return block_comment();

    const bool first_on_line = line_start_;
    line_start_ = false;

    if (c == '#' && first_on_line && !in_directive_) {
      in_directive_ = true;
      ++directive_count_;
      emit(TokenKind::Punct, pos_, pos_ + 1);
      ++pos_;
      return;
    }
    if (c == '"') return quoted(pos_, pos_, '"', TokenKind::String);
    if (c == '\'') return quoted(pos_, pos_, '\'', TokenKind::Char);
    if (std::isdigit(static_cast<unsigned char>(c)) ||
        (c == '.' && std::isdigit(static_cast<unsigned char>(at(pos_ + 1))))) {
      return number();
    }
    if (ident_start(static_cast<unsigned char>(c))) return identifier();
    punct();
  }

  void line_comment() {
    const std::size_t begin = pos_;
    pos_ += 2;
    while (pos_ < src_.size()) {
      if (std::size_t s = splice_len(pos_)) {
        pos_ += s;
        continue;
      }
      if (src_[pos_] == '\n') break;
      ++pos_;
    }
    // A CR before the newline belongs to the line ending, not the comment.
    std::size_t end = pos_;
    if (end > begin && src_[end - 1] == '\r') --end;
    emit(TokenKind::Comment, begin, end);
  }

  void block_comment() {
    const std::size_t begin = pos_;
    const std::size_t close = src_.find("*/", pos_ + 2);
    if (close == std::string_view::npos) {
      throw LexError("unterminated block comment starting at byte offset " + std::to_string(begin), begin);
    }
    pos_ = close + 2;
    emit(TokenKind::Comment, begin, pos_);
  }

  // Ordinary string or character literal starting at `quote`; `begin` includes any prefix.
  void quoted(std::size_t begin, std::size_t quote, char delim, TokenKind kind) {
    pos_ = quote + 1;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (c == '\\') {
        pos_ += 2;
        continue;
      }
      if (c == delim) {
        ++pos_;
        break;
      }
      if (c == '\n') break;  // unterminated; stop at end of line
      ++pos_;
    }
    pos_ = std::min(pos_, src_.size());
    emit(kind, begin, pos_);
  }

  void raw_string(std::size_t begin, std::size_t quote) {
    const std::size_t open = src_.find('(', quote + 1);
    if (open == std::string_view::npos) {
      pos_ = quote + 1;
      emit(TokenKind::String, begin, pos_);
      return;
    }
    const std::string closing = ")" + std::string(src_.substr(quote + 1, open - quote - 1)) + "\"";
    const std::size_t close = src_.find(closing, open + 1);
    pos_ = close == std::string_view::npos ? src_.size() : close + closing.size();
    emit(TokenKind::String, begin, pos_);
  }

  void number() {
    const std::size_t begin = pos_;
    ++pos_;
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      const char prev = src_[pos_ - 1];
      if ((c == '+' || c == '-') && (prev == 'e' || prev == 'E' || prev == 'p' || prev == 'P')) {
        ++pos_;
      } else if (c == '\'' && std::isalnum(static_cast<unsigned char>(at(pos_ + 1)))) {
        pos_ += 2;  // digit separator
      } else if (ident_char(static_cast<unsigned char>(c)) || c == '.') {
        ++pos_;
      } else {
        break;
      }
    }
    emit(TokenKind::Number, begin, pos_);
  }

  void identifier() {
    const std::size_t begin = pos_;
    while (pos_ < src_.size() && ident_char(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    const std::string_view word = src_.substr(begin, pos_ - begin);
    const char next = at(pos_);
    if (next == '"' || next == '\'') {
      const bool str_prefix = word == "L" || word == "u" || word == "U" || word == "u8";
      const bool raw_prefix = word == "R" || word == "LR" || word == "uR" || word == "UR" || word == "u8R";
      if (next == '"' && raw_prefix) return raw_string(begin, pos_);
      if (str_prefix) return quoted(begin, pos_, next, next == '"' ? TokenKind::String : TokenKind::Char);
    }
    emit(TokenKind::Identifier, begin, pos_);
  }

  void punct() {
    for (std::string_view p : kPuncts) {
      if (src_.substr(pos_, p.size()) == p) {
        emit(TokenKind::Punct, pos_, pos_ + p.size());
        pos_ += p.size();
        return;
      }
    }
    emit(TokenKind::Punct, pos_, pos_ + 1);
    ++pos_;
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  bool line_start_ = true;
  bool in_directive_ = false;
  int directive_count_ = 0;
  std::vector<Token> tokens_;
};

}  // namespace

std::vector<Token> scan(std::string_view src) { return Scanner(src).run(); }

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> all = scan(src);
  std::erase_if(all, [](const Token& t) { return t.kind == TokenKind::Comment; });
  return all;
}

std::string strip_comments(std::string_view src) {
  const std::vector<Token> tokens = scan(src);

  std::string out;
  out.reserve(src.size());
  // Output line indices that had a comment removed.
  std::vector<bool> touched(1, false);
  auto mark = [&] { touched.back() = true; };
  auto put = [&](char c) {
    out.push_back(c);
    if (c == '\n') touched.push_back(false);
  };

  std::size_t pos = 0;
  for (const Token& t : tokens) {
    if (t.kind != TokenKind::Comment) continue;
    for (; pos < t.begin; ++pos) put(src[pos]);
    mark();
    const auto newlines = std::count(t.text.begin(), t.text.end(), '\n');
    if (newlines > 0) {
      for (long i = 0; i < newlines; ++i) {
        put('\n');
        mark();
      }
    } else {
      // A comment separates tokens; keep a single space where it glued two together.
      const char before = t.begin > 0 ? src[t.begin - 1] : '\n';
      const char after = t.end < src.size() ? src[t.end] : '\n';
      const bool glued = !blank(before) && before != '\n' && !blank(after) && after != '\n' && after != '\r';
      if (glued) out.push_back(' ');
    }
    pos = t.end;
  }
  for (; pos < src.size(); ++pos) put(src[pos]);

  // Drop lines emptied by comment removal; trim trailing blanks where a comment was inline.
  std::string result;
  result.reserve(out.size());
  std::size_t line = 0;
  std::size_t start = 0;
  while (start <= out.size()) {
    std::size_t nl = out.find('\n', start);
    const bool has_nl = nl != std::string::npos;
    if (!has_nl) nl = out.size();
    std::string_view text(out.data() + start, nl - start);
    bool keep = true;
    if (touched[line]) {
      std::size_t trim = text.size();
      while (trim > 0 && blank(text[trim - 1])) --trim;
      // Preserve a CR line ending.
      const bool crlf = !text.empty() && text.back() == '\r';
      text = text.substr(0, trim);
      if (text.empty()) keep = false;
      if (keep) {
        result.append(text);
        if (crlf) result.push_back('\r');
      }
    } else {
      result.append(text);
    }
    if (has_nl && keep) result.push_back('\n');
    if (!has_nl) break;
    start = nl + 1;
    ++line;
  }
  return result;
}

namespace {

bool is_specifier_call(std::string_view word) {
  static constexpr std::array<std::string_view, 12> kWords{
      "__attribute__", "__declspec", "alignas",  "__launch_bounds__", "decltype", "noexcept",
      "throw",         "sizeof",     "alignof",  "requires",          "__align__", "static_assert"};
  return std::find(kWords.begin(), kWords.end(), word) != kWords.end();
}

bool is_trailing_qualifier(std::string_view word) {
  static constexpr std::array<std::string_view, 8> kWords{"const",    "volatile", "noexcept", "override",
                                                          "final",    "mutable",  "try",      "__restrict__"};
  return std::find(kWords.begin(), kWords.end(), word) != kWords.end();
}

class FunctionFinder {
 public:
  FunctionFinder(std::string_view src, std::span<const Token> tokens) : src_(src), toks_(tokens) {}

  std::vector<FunctionDef> run() {
    scope(0, true);
    return std::move(defs_);
  }

 private:
  std::size_t n() const { return toks_.size(); }

  // Index one past the bracket matching the opener at i.
  std::size_t match(std::size_t i) const {
    const std::string_view open = toks_[i].text;
    const std::string_view close = open == "(" ? ")" : open == "[" ? "]" : "}";
    int depth = 0;
    for (std::size_t j = i; j < n(); ++j) {
      if (toks_[j].is(open)) ++depth;
      if (toks_[j].is(close) && --depth == 0) return j + 1;
    }
    return n();
  }

  struct HeaderInfo {
    bool function = false;
    bool scope = false;  // namespace, class, or linkage block
    std::string name;
    std::size_t params_close = 0;  // token index of ')' closing the parameter list
  };

  HeaderInfo classify(std::size_t begin, std::size_t end) const {
    HeaderInfo info;
    if (begin == end) return info;
    bool has_record = false;
    bool saw_eq = false;
    bool saw_enum = false;
    for (std::size_t i = begin; i < end; ++i) {
      const Token& t = toks_[i];
      if (t.is_ident("namespace")) {
        info.scope = true;
        return info;
      }
      if (t.is("(") || t.is("[")) {
        const std::size_t close = match(i);
        if (t.is("(") && !saw_eq && !info.function) {
          if (auto name = name_before(begin, i)) {
            info.function = true;
            info.name = *name;
            info.params_close = close - 1;
          }
        }
        i = close - 1;
        continue;
      }
      if (t.is("=") && !info.function && !(i > begin && toks_[i - 1].is_ident("operator"))) saw_eq = true;
      if (t.is_ident("enum")) saw_enum = true;
      if (t.is_ident("struct") || t.is_ident("class") || t.is_ident("union")) has_record = true;
      if (t.is("<") && i > begin && toks_[i - 1].is_ident("template")) {
        // Skip template parameter lists so `template <class T>` is not a record.
        int depth = 0;
        for (; i < end; ++i) {
          if (toks_[i].is("<")) ++depth;
          if (toks_[i].is(">") && --depth == 0) break;
          if (toks_[i].is(">>") && (depth -= 2) <= 0) break;
        }
      }
    }
    if (info.function) return info;
    if (saw_eq || saw_enum) return info;
    if (has_record) {
      info.scope = true;
      return info;
    }
    // extern "C" { ... }
    if (toks_[begin].is_ident("extern") && begin + 1 < end && toks_[begin + 1].kind == TokenKind::String) {
      info.scope = true;
    }
    return info;
  }

  // Name of the function whose parameter list opens at token `paren`, if any.
  std::optional<std::string> name_before(std::size_t begin, std::size_t paren) const {
    if (paren == begin) return std::nullopt;
    std::size_t j = paren - 1;
    const Token& p = toks_[j];
    std::string name;
    if (p.kind == TokenKind::Identifier) {
      if (is_specifier_call(p.text)) return std::nullopt;
      if (p.text == "operator") return std::nullopt;  // operator() : the next group is the parameter list
      name = std::string(p.text);
    } else if (p.is(")") && j >= begin + 2 && toks_[j - 1].is("(") && toks_[j - 2].is_ident("operator")) {
      name = "operator()";
      j -= 2;
    } else if (j > begin && toks_[j - 1].is_ident("operator")) {
      name = "operator" + std::string(p.text);
      --j;
    } else if (p.is(">")) {
      // Explicit specialization: name<args>(...)
      int depth = 0;
      std::size_t k = j;
      for (;; --k) {
        if (toks_[k].is(">")) ++depth;
        if (toks_[k].is("<") && --depth == 0) break;
        if (k == begin) return std::nullopt;
      }
      if (k == begin || toks_[k - 1].kind != TokenKind::Identifier) return std::nullopt;
      j = k - 1;
      name = std::string(toks_[j].text);
    } else {
      return std::nullopt;
    }
    // Qualification chain: A::B::name
    while (j >= begin + 2 && toks_[j - 1].is("::") && toks_[j - 2].kind == TokenKind::Identifier) {
      name = std::string(toks_[j - 2].text) + "::" + name;
      j -= 2;
    }
    return name;
  }

  // In a constructor initializer list, a brace right after a member name is an initializer.
  bool is_member_init_brace(std::size_t brace, const HeaderInfo& info) const {
    bool init_list = false;
    for (std::size_t i = info.params_close + 1; i < brace; ++i) {
      if (toks_[i].is(":")) init_list = true;
    }
    if (!init_list) return false;
    const Token& prev = toks_[brace - 1];
    if (prev.kind == TokenKind::Identifier) return !is_trailing_qualifier(prev.text);
    return prev.is(">");
  }

  // Walks a declaration scope starting at token i. Returns the index after the
  // closing brace of the scope (or end of input).
  std::size_t scope(std::size_t i, bool top_level) {
    std::size_t header = i;
    while (i < n()) {
      const Token& t = toks_[i];
      if (t.directive >= 0) {
        ++i;
        header = i;
        continue;
      }
      if (t.is("}")) return i + 1;
      if (t.is(";")) {
        header = ++i;
        continue;
      }
      if (t.is("(") || t.is("[")) {
        i = match(i);
        continue;
      }
      if (!t.is("{")) {
        ++i;
        continue;
      }

      const HeaderInfo info = classify(header, i);
      if (info.function && is_member_init_brace(i, info)) {
        i = match(i);
        continue;
      }
      if (info.scope) {
        i = scope(i + 1, false);
      } else if (info.function) {
        const std::size_t close = match(i);
        if (close > n() || close == 0 || !toks_[close - 1].is("}")) return n();
        defs_.push_back(FunctionDef{info.name, toks_[header].begin, toks_[close - 1].end, header, close - 1,
                                    top_level});
        i = close;
      } else {
        i = match(i);
      }
      // Initializers (`int a[] = {...};`) run on until ';'.
      if (info.function || info.scope) header = i;
    }
    return n();
  }

  std::string_view src_;
  std::span<const Token> toks_;
  std::vector<FunctionDef> defs_;
};

}  // namespace

std::vector<FunctionDef> find_function_definitions(std::string_view src, std::span<const Token> tokens) {
  return FunctionFinder(src, tokens).run();
}

std::vector<FunctionDef> find_function_definitions(std::string_view src) {
  const std::vector<Token> tokens = tokenize(src);
  return find_function_definitions(src, tokens);
}

std::optional<FunctionDef> find_main(std::string_view src) {
  const std::vector<Token> tokens = tokenize(src);
  for (FunctionDef def : find_function_definitions(src, tokens)) {
    if (!def.top_level || def.name != "main") continue;
    // Locate the `main` identifier and require `int` in front of it.
    for (std::size_t i = def.first_token + 1; i < def.last_token; ++i) {
      if (!tokens[i].is_ident("main") || !tokens[i + 1].is("(")) continue;
      if (!tokens[i - 1].is_ident("int")) break;
      def.begin = tokens[i - 1].begin;
      def.first_token = i - 1;
      return def;
    }
  }
  return std::nullopt;
}

}  // namespace unipar::lex
