#pragma once

// Lexical scanning of C, C++ and CUDA sources. No parsing: the scanner knows
// about comments, string/char/raw-string literals, line continuations and
// preprocessor lines, which is enough to strip comments, locate function
// definitions by brace matching, and compare token streams.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace unipar::lex {

enum class TokenKind { Identifier, Number, String, Char, Punct, Comment };

struct Token {
  TokenKind kind;
  std::size_t begin;
  std::size_t end;
  std::string_view text;
  // Index of the preprocessor line this token belongs to, or -1.
  int directive = -1;

  bool is(std::string_view punct) const { return kind == TokenKind::Punct && text == punct; }
  bool is_ident(std::string_view name) const { return kind == TokenKind::Identifier && text == name; }
};

// Every token including comments. Throws LexError on an unterminated block comment.
std::vector<Token> scan(std::string_view src);

// scan() without comment tokens.
std::vector<Token> tokenize(std::string_view src);

// Removes block and line comments. Lines that held only comments are dropped;
// lines with inline comments keep their code with trailing blanks trimmed.
std::string strip_comments(std::string_view src);

struct FunctionDef {
  std::string name;      // qualified as written, e.g. "Foo::bar", "operator()"
  std::size_t begin;     // byte offset of the first header token
  std::size_t end;       // one past the closing brace
  std::size_t first_token;
  std::size_t last_token;  // index of the closing brace in the token vector
  bool top_level;        // not nested in a namespace, class or linkage block
};

// Function definitions in source order (member functions included).
// `tokens` must come from tokenize(src).
std::vector<FunctionDef> find_function_definitions(std::string_view src, std::span<const Token> tokens);
std::vector<FunctionDef> find_function_definitions(std::string_view src);

// Top-level `int main` definition. The span starts at the `int` token.
std::optional<FunctionDef> find_main(std::string_view src);

}  // namespace unipar::lex
