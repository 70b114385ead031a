#include "doctest.h"
#include "taxlogic/lexer.hpp"

using namespace taxlogic;
using namespace taxlogic::logic;

TEST_CASE("tokenize simple clause") {
  auto toks = tokenize("tax(A,B).");
  REQUIRE(toks.size() == 8);  // tax ( A , B ) . EOF
  CHECK(toks[0].type == TokenType::Atom);
  CHECK(toks[0].text == "tax");
  CHECK(toks[1].is_punct("("));
  CHECK(toks[2].type == TokenType::Var);
  CHECK(toks[2].text == "A");
  CHECK(toks[3].is_punct(","));
  CHECK(toks[4].type == TokenType::Var);
  CHECK(toks[5].is_punct(")"));
  CHECK(toks[6].type == TokenType::End);
  CHECK(toks[7].type == TokenType::Eof);
}

TEST_CASE("line comments are stripped") {
  auto toks = tokenize("% note\nfoo.");
  REQUIRE(toks.size() == 3);
  CHECK(toks[0].is_atom("foo"));
  CHECK(toks[1].type == TokenType::End);
  CHECK(toks[0].pos.line == 2);
}

TEST_CASE("block comments and nesting-free termination") {
  auto toks = tokenize("/* a\nb */ f. /* x */");
  CHECK(toks[0].is_atom("f"));
  CHECK(toks[1].type == TokenType::End);
  CHECK(toks[2].type == TokenType::Eof);
}

TEST_CASE("operator tokens split correctly") {
  auto toks = tokenize("X is 3 + 4.");
  REQUIRE(toks.size() == 7);
  CHECK(toks[0].type == TokenType::Var);
  CHECK(toks[1].is_atom("is"));
  CHECK(toks[2].type == TokenType::Int);
  CHECK(toks[2].ival == 3);
  CHECK(toks[3].is_atom("+"));
  CHECK(toks[4].ival == 4);
  CHECK(toks[5].type == TokenType::End);
}

TEST_CASE("floats, exponents, and int-dot-end") {
  auto toks = tokenize("1.5. 2.0e3. 7.");
  CHECK(toks[0].type == TokenType::Float);
  CHECK(toks[0].fval == doctest::Approx(1.5));
  CHECK(toks[1].type == TokenType::End);
  CHECK(toks[2].type == TokenType::Float);
  CHECK(toks[2].fval == doctest::Approx(2000.0));
  CHECK(toks[4].type == TokenType::Int);
  CHECK(toks[4].ival == 7);
  CHECK(toks[5].type == TokenType::End);
}

TEST_CASE("quoted atoms with escapes and doubled quotes") {
  auto toks = tokenize("'has space'. 'don''t'. 'a\\nb'.");
  CHECK(toks[0].type == TokenType::Atom);
  CHECK(toks[0].text == "has space");
  CHECK(toks[0].quoted);
  CHECK(toks[2].text == "don't");
  CHECK(toks[4].text == "a\nb");
}

TEST_CASE("strings") {
  auto toks = tokenize("\"2017-01-01\".");
  CHECK(toks[0].type == TokenType::Str);
  CHECK(toks[0].text == "2017-01-01");
}

TEST_CASE("symbolic atoms munch maximally") {
  auto toks = tokenize("A =.. B. X \\== Y.");
  CHECK(toks[1].is_atom("=.."));
  CHECK(toks[5].is_atom("\\=="));
}

TEST_CASE("unterminated quote raises with position") {
  CHECK_THROWS_AS(tokenize("foo('bar"), ParseError);
  CHECK_THROWS_AS(tokenize("/* never closed"), ParseError);
}

TEST_CASE("positions are 1-based line/column") {
  auto toks = tokenize("a.\n  b.");
  CHECK(toks[0].pos.line == 1);
  CHECK(toks[0].pos.column == 1);
  CHECK(toks[2].pos.line == 2);
  CHECK(toks[2].pos.column == 3);
}

TEST_CASE("solo and punct characters") {
  auto toks = tokenize("! ; [a|B] {x}.");
  CHECK(toks[0].is_atom("!"));
  CHECK(toks[1].is_atom(";"));
  CHECK(toks[2].is_punct("["));
  CHECK(toks[4].is_punct("|"));
  CHECK(toks[6].is_punct("]"));
}
