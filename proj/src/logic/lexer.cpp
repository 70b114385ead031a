#include "taxlogic/lexer.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>

namespace taxlogic::logic {

namespace {

bool is_symbol_char(char c) {
  static const std::string kSymbols = "+-*/\\^<>=~:.?@#&$";
  return kSymbols.find(c) != std::string::npos;
}

bool is_alnum_(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool is_solo(char c) { return c == '!' || c == ';'; }

class Cursor {
 public:
  Cursor(const std::string& text, std::string file)
      : text_(text), file_(std::move(file)) {}

  bool eof() const { return i_ >= text_.size(); }
  char peek(size_t ahead = 0) const {
    return i_ + ahead < text_.size() ? text_[i_ + ahead] : '\0';
  }
  char advance() {
    char c = text_[i_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }
  SourcePos pos() const { return SourcePos{line_, col_}; }
  [[noreturn]] void fail(const std::string& msg, SourcePos at) const {
    throw ParseError(file_, at, msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail(msg, pos()); }

 private:
  const std::string& text_;
  std::string file_;
  size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
};

// Consumes whitespace and comments; returns true if anything was skipped.
bool skip_layout(Cursor& c) {
  bool skipped = false;
  for (;;) {
    if (c.eof()) return skipped;
    char ch = c.peek();
    if (std::isspace(static_cast<unsigned char>(ch))) {
      c.advance();
      skipped = true;
    } else if (ch == '%') {
      while (!c.eof() && c.peek() != '\n') c.advance();
      skipped = true;
    } else if (ch == '/' && c.peek(1) == '*') {
      SourcePos start = c.pos();
      c.advance();
      c.advance();
      for (;;) {
        if (c.eof()) c.fail("unterminated block comment", start);
        if (c.peek() == '*' && c.peek(1) == '/') {
          c.advance();
          c.advance();
          break;
        }
        c.advance();
      }
      skipped = true;
    } else {
      return skipped;
    }
  }
}

std::string read_quoted(Cursor& c, char quote) {
  SourcePos start = c.pos();
  c.advance();  // opening quote
  std::string out;
  for (;;) {
    if (c.eof()) c.fail("unterminated quoted token", start);
    char ch = c.advance();
    if (ch == quote) {
      if (c.peek() == quote) {  // doubled quote escapes itself
        out.push_back(quote);
        c.advance();
        continue;
      }
      return out;
    }
    if (ch == '\\') {
      if (c.eof()) c.fail("unterminated escape", start);
      char e = c.advance();
      switch (e) {
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'a': out.push_back('\a'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'v': out.push_back('\v'); break;
        case '0': out.push_back('\0'); break;
        case '\\':
        case '\'':
        case '"':
        case '`': out.push_back(e); break;
        case '\n': break;  // escaped newline continues the token
        case 'x': {
          std::string hex;
          while (!c.eof() && std::isxdigit(static_cast<unsigned char>(c.peek()))) {
            hex.push_back(c.advance());
          }
          if (!c.eof() && c.peek() == '\\') c.advance();
          if (hex.empty()) c.fail("empty \\x escape", start);
          out.push_back(static_cast<char>(std::strtol(hex.c_str(), nullptr, 16)));
          break;
        }
        default: c.fail(std::string("unknown escape \\") + e);
      }
      continue;
    }
    out.push_back(ch);
  }
}

Token read_number(Cursor& c) {
  Token t;
  t.pos = c.pos();
  std::string digits;
  while (!c.eof() && std::isdigit(static_cast<unsigned char>(c.peek()))) {
    digits.push_back(c.advance());
  }
  bool is_float = false;
  // Fraction: '.' only counts when followed by a digit ('3.' is int 3 + End).
  if (c.peek() == '.' && std::isdigit(static_cast<unsigned char>(c.peek(1)))) {
    is_float = true;
    digits.push_back(c.advance());
    while (!c.eof() && std::isdigit(static_cast<unsigned char>(c.peek()))) {
      digits.push_back(c.advance());
    }
  }
  if ((c.peek() == 'e' || c.peek() == 'E') &&
      (std::isdigit(static_cast<unsigned char>(c.peek(1))) ||
       ((c.peek(1) == '+' || c.peek(1) == '-') &&
        std::isdigit(static_cast<unsigned char>(c.peek(2)))))) {
    is_float = true;
    digits.push_back(c.advance());
    if (c.peek() == '+' || c.peek() == '-') digits.push_back(c.advance());
    while (!c.eof() && std::isdigit(static_cast<unsigned char>(c.peek()))) {
      digits.push_back(c.advance());
    }
  }
  if (is_float) {
    t.type = TokenType::Float;
    t.fval = std::strtod(digits.c_str(), nullptr);
  } else {
    t.type = TokenType::Int;
    errno = 0;
    t.ival = std::strtoll(digits.c_str(), nullptr, 10);
    if (errno == ERANGE) c.fail("integer literal out of range", t.pos);
  }
  t.text = std::move(digits);
  return t;
}

}  // namespace

std::vector<Token> tokenize(const std::string& text, const std::string& file) {
  Cursor c(text, file);
  std::vector<Token> out;
  for (;;) {
    bool layout = skip_layout(c);
    Token t;
    t.layout_before = layout || out.empty();
    t.pos = c.pos();
    if (c.eof()) {
      t.type = TokenType::Eof;
      out.push_back(std::move(t));
      return out;
    }
    char ch = c.peek();
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      Token num = read_number(c);
      num.layout_before = t.layout_before;
      out.push_back(std::move(num));
      continue;
    }
    if (std::islower(static_cast<unsigned char>(ch))) {
      while (!c.eof() && is_alnum_(c.peek())) t.text.push_back(c.advance());
      t.type = TokenType::Atom;
      out.push_back(std::move(t));
      continue;
    }
    if (std::isupper(static_cast<unsigned char>(ch)) || ch == '_') {
      while (!c.eof() && is_alnum_(c.peek())) t.text.push_back(c.advance());
      t.type = TokenType::Var;
      out.push_back(std::move(t));
      continue;
    }
    if (ch == '\'') {
      t.text = read_quoted(c, '\'');
      t.type = TokenType::Atom;
      t.quoted = true;
      out.push_back(std::move(t));
      continue;
    }
    if (ch == '"') {
      t.text = read_quoted(c, '"');
      t.type = TokenType::Str;
      out.push_back(std::move(t));
      continue;
    }
    if (std::string("()[]{},|").find(ch) != std::string::npos) {
      t.text.push_back(c.advance());
      t.type = TokenType::Punct;
      out.push_back(std::move(t));
      continue;
    }
    if (is_solo(ch)) {
      t.text.push_back(c.advance());
      t.type = TokenType::Atom;
      out.push_back(std::move(t));
      continue;
    }
    if (is_symbol_char(ch)) {
      // A '.' followed by layout, '%', or EOF terminates a clause.
      if (ch == '.') {
        char next = c.peek(1);
        if (next == '\0' || next == '%' || std::isspace(static_cast<unsigned char>(next))) {
          c.advance();
          t.text = ".";
          t.type = TokenType::End;
          out.push_back(std::move(t));
          continue;
        }
      }
      while (!c.eof() && is_symbol_char(c.peek())) t.text.push_back(c.advance());
      t.type = TokenType::Atom;
      out.push_back(std::move(t));
      continue;
    }
    c.fail(std::string("unexpected character '") + ch + "'");
  }
}

}  // namespace taxlogic::logic
