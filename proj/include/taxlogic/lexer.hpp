#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "taxlogic/errors.hpp"

namespace taxlogic::logic {

enum class TokenType {
  Atom,      // foo, 'quoted', + - etc.
  Var,       // X, _Foo, _
  Int,
  Float,
  Str,       // "double quoted"
  Punct,     // ( ) [ ] { } , |
  End,       // clause-terminating '.'
  Eof,
};

struct Token {
  TokenType type = TokenType::Eof;
  std::string text;
  int64_t ival = 0;
  double fval = 0.0;
  SourcePos pos;
  bool layout_before = false;  // whitespace/comment between previous token and this one
  bool quoted = false;

  bool is_punct(const char* p) const { return type == TokenType::Punct && text == p; }
  bool is_atom(const char* a) const { return type == TokenType::Atom && text == a; }
};

/// Tokenizes a full Prolog source text. '%' line comments and '/* */' block
/// comments are stripped; positions are 1-based. Throws ParseError on
/// unterminated quotes/comments and on characters outside the lexicon.
std::vector<Token> tokenize(const std::string& text, const std::string& file = "");

}  // namespace taxlogic::logic
