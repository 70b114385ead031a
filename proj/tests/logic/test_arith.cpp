#include <limits>

#include "doctest.h"
#include "taxlogic/arith.hpp"
#include "taxlogic/errors.hpp"
#include "taxlogic/parser.hpp"

using namespace taxlogic;
using namespace taxlogic::logic;

namespace {
Number eval_str(const std::string& expr) {
  Bindings b;
  ParsedQuery q = parse_query(expr + ".", OperatorTable::defaults());
  return eval_arith(q.goal, b);
}
}  // namespace

TEST_CASE("multiplication binds tighter than addition") {
  Number n = eval_str("3 + 4 * 2");
  CHECK(n.is_int);
  CHECK(n.i == 11);
  CHECK(eval_str("(3 + 4) * 2").i == 14);
}

TEST_CASE("integer division floors toward negative infinity") {
  CHECK(eval_str("7 // 2").i == 3);
  CHECK(eval_str("-7 // 2").i == -4);
  CHECK(eval_str("7 // -2").i == -4);
  CHECK(eval_str("-7 // -2").i == 3);
  CHECK(eval_str("6 // 3").i == 2);
  CHECK(eval_str("-6 // 3").i == -2);
  CHECK(eval_str("7 div 2").i == 3);
  CHECK(eval_str("-7 div 2").i == -4);
}

TEST_CASE("mod is floored, rem is truncated") {
  CHECK(eval_str("7 mod 2").i == 1);
  CHECK(eval_str("-7 mod 2").i == 1);
  CHECK(eval_str("7 mod -2").i == -1);
  CHECK(eval_str("-7 rem 2").i == -1);
  CHECK(eval_str("7 rem -2").i == 1);
}

TEST_CASE("'/' keeps exact integers and falls back to float") {
  Number n = eval_str("6 / 2");
  CHECK(n.is_int);
  CHECK(n.i == 3);
  n = eval_str("7 / 2");
  CHECK_FALSE(n.is_int);
  CHECK(n.f == doctest::Approx(3.5));
}

TEST_CASE("min max abs sign round truncate floor ceiling") {
  CHECK(eval_str("min(3, 4)").i == 3);
  CHECK(eval_str("max(3, 4.5)").f == doctest::Approx(4.5));
  CHECK(eval_str("abs(-3)").i == 3);
  CHECK(eval_str("sign(-9)").i == -1);
  CHECK(eval_str("round(2.5)").i == 3);
  CHECK(eval_str("round(-2.5)").i == -3);  // half away from zero
  CHECK(eval_str("round(2.4)").i == 2);
  CHECK(eval_str("truncate(2.9)").i == 2);
  CHECK(eval_str("truncate(-2.9)").i == -2);
  CHECK(eval_str("floor(-2.1)").i == -3);
  CHECK(eval_str("ceiling(2.1)").i == 3);
  CHECK(eval_str("integer(2.6)").i == 3);
  CHECK(eval_str("float(3)").f == doctest::Approx(3.0));
}

TEST_CASE("power operators") {
  CHECK(eval_str("2 ** 10").i == 1024);
  CHECK(eval_str("2 ^ 10").i == 1024);
  CHECK(eval_str("2.0 ** 2").f == doctest::Approx(4.0));
}

TEST_CASE("unbound variable raises instantiation error") {
  Bindings b;
  ParsedQuery q = parse_query("X + 1.", OperatorTable::defaults());
  try {
    eval_arith(q.goal, b);
    FAIL("expected EngineException");
  } catch (const EngineException& e) {
    CHECK(e.kind() == EngineErrorKind::InstantiationError);
  }
}

TEST_CASE("unknown function raises type error") {
  try {
    eval_str("frobnicate(3)");
    FAIL("expected EngineException");
  } catch (const EngineException& e) {
    CHECK(e.kind() == EngineErrorKind::TypeError);
  }
}

TEST_CASE("division by zero raises evaluation error") {
  for (const char* expr : {"1 / 0", "1 // 0", "1 mod 0", "1 rem 0", "1 div 0"}) {
    try {
      eval_str(expr);
      FAIL("expected EngineException for ", expr);
    } catch (const EngineException& e) {
      CHECK(e.kind() == EngineErrorKind::EvaluationError);
    }
  }
}

TEST_CASE("checked integer arithmetic never silently wraps") {
  const int64_t big = std::numeric_limits<int64_t>::max();
  Bindings b;
  auto expr = make_compound("+", {make_int(big), make_int(1)});
  CHECK_THROWS_AS(eval_arith(expr, b), EngineException);
  auto mul = make_compound("*", {make_int(big), make_int(2)});
  CHECK_THROWS_AS(eval_arith(mul, b), EngineException);
  auto neg = make_compound("-", {make_int(std::numeric_limits<int64_t>::min())});
  CHECK_THROWS_AS(eval_arith(neg, b), EngineException);
}

TEST_CASE("mixed int/float comparison") {
  CHECK(compare_numbers(Number::of_int(2), Number::of_float(2.0)) == 0);
  CHECK(compare_numbers(Number::of_int(2), Number::of_float(2.5)) < 0);
  CHECK(compare_numbers(Number::of_float(3.1), Number::of_int(3)) > 0);
}
