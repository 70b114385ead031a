#include "taxlogic/arith.hpp"

#include <cmath>
#include <limits>

#include "taxlogic/errors.hpp"
#include "taxlogic/writer.hpp"

namespace taxlogic::logic {

namespace {

[[noreturn]] void type_error(const std::string& what) {
  throw EngineException(EngineErrorKind::TypeError, what);
}

[[noreturn]] void eval_error(const std::string& what) {
  throw EngineException(EngineErrorKind::EvaluationError, what);
}

int64_t checked_add(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_add_overflow(a, b, &r)) {
    throw EngineException(EngineErrorKind::Overflow, "integer addition overflow");
  }
  return r;
}

int64_t checked_sub(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_sub_overflow(a, b, &r)) {
    throw EngineException(EngineErrorKind::Overflow, "integer subtraction overflow");
  }
  return r;
}

int64_t checked_mul(int64_t a, int64_t b) {
  int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) {
    throw EngineException(EngineErrorKind::Overflow, "integer multiplication overflow");
  }
  return r;
}

int64_t checked_neg(int64_t a) {
  if (a == std::numeric_limits<int64_t>::min()) {
    throw EngineException(EngineErrorKind::Overflow, "integer negation overflow");
  }
  return -a;
}

// Integer division truncating toward negative infinity; both `//` and `div`.
int64_t floor_div(int64_t a, int64_t b) {
  if (b == 0) eval_error("division by zero");
  if (a == std::numeric_limits<int64_t>::min() && b == -1) {
    throw EngineException(EngineErrorKind::Overflow, "integer division overflow");
  }
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

// Floored modulus: result has the sign of the divisor.
int64_t floor_mod(int64_t a, int64_t b) {
  if (b == 0) eval_error("division by zero in mod");
  int64_t r = a % b;
  if (r != 0 && ((r < 0) != (b < 0))) r += b;
  return r;
}

int64_t round_to_int(double v) {
  if (std::isnan(v) || v < -9.3e18 || v > 9.3e18) {
    throw EngineException(EngineErrorKind::Overflow, "float out of integer range");
  }
  return static_cast<int64_t>(std::llround(v));
}

int64_t int_pow(int64_t base, int64_t exp) {
  if (exp < 0) eval_error("negative integer exponent");
  int64_t result = 1;
  while (exp > 0) {
    if (exp & 1) result = checked_mul(result, base);
    exp >>= 1;
    if (exp > 0) base = checked_mul(base, base);
  }
  return result;
}

Number eval(const TermPtr& expr, const Bindings& b);

Number eval_binary(const std::string& op, const TermPtr& lhs, const TermPtr& rhs,
                   const Bindings& b) {
  Number x = eval(lhs, b);
  Number y = eval(rhs, b);
  bool both_int = x.is_int && y.is_int;
  if (op == "+") {
    return both_int ? Number::of_int(checked_add(x.i, y.i))
                    : Number::of_float(x.as_double() + y.as_double());
  }
  if (op == "-") {
    return both_int ? Number::of_int(checked_sub(x.i, y.i))
                    : Number::of_float(x.as_double() - y.as_double());
  }
  if (op == "*") {
    return both_int ? Number::of_int(checked_mul(x.i, y.i))
                    : Number::of_float(x.as_double() * y.as_double());
  }
  if (op == "/") {
    if (both_int) {
      if (y.i == 0) eval_error("division by zero");
      if (x.i % y.i == 0) return Number::of_int(floor_div(x.i, y.i));
      return Number::of_float(static_cast<double>(x.i) / static_cast<double>(y.i));
    }
    if (y.as_double() == 0.0) eval_error("division by zero");
    return Number::of_float(x.as_double() / y.as_double());
  }
  if (op == "//" || op == "div") {
    if (!both_int) type_error("'" + op + "' expects integers");
    return Number::of_int(floor_div(x.i, y.i));
  }
  if (op == "mod") {
    if (!both_int) type_error("mod expects integers");
    return Number::of_int(floor_mod(x.i, y.i));
  }
  if (op == "rem") {
    if (!both_int) type_error("rem expects integers");
    if (y.i == 0) eval_error("division by zero in rem");
    return Number::of_int(x.i % y.i);
  }
  if (op == "min") {
    return compare_numbers(x, y) <= 0 ? x : y;
  }
  if (op == "max") {
    return compare_numbers(x, y) >= 0 ? x : y;
  }
  if (op == "**") {
    if (both_int && y.i >= 0) return Number::of_int(int_pow(x.i, y.i));
    return Number::of_float(std::pow(x.as_double(), y.as_double()));
  }
  if (op == "^") {
    if (both_int) return Number::of_int(int_pow(x.i, y.i));
    return Number::of_float(std::pow(x.as_double(), y.as_double()));
  }
  if (op == ">>") {
    if (!both_int) type_error(">> expects integers");
    if (y.i < 0 || y.i > 63) eval_error("shift amount out of range");
    return Number::of_int(x.i >> y.i);
  }
  if (op == "<<") {
    if (!both_int) type_error("<< expects integers");
    if (y.i < 0 || y.i > 63) eval_error("shift amount out of range");
    return Number::of_int(checked_mul(x.i, int64_t(1) << y.i));
  }
  if (op == "gcd") {
    if (!both_int) type_error("gcd expects integers");
    int64_t a = x.i < 0 ? checked_neg(x.i) : x.i;
    int64_t c = y.i < 0 ? checked_neg(y.i) : y.i;
    while (c != 0) {
      int64_t t = a % c;
      a = c;
      c = t;
    }
    return Number::of_int(a);
  }
  type_error("unknown arithmetic function " + op + "/2");
}

Number eval_unary(const std::string& op, const TermPtr& arg, const Bindings& b) {
  Number x = eval(arg, b);
  if (op == "-") {
    return x.is_int ? Number::of_int(checked_neg(x.i)) : Number::of_float(-x.f);
  }
  if (op == "+") return x;
  if (op == "abs") {
    return x.is_int ? Number::of_int(x.i < 0 ? checked_neg(x.i) : x.i)
                    : Number::of_float(std::fabs(x.f));
  }
  if (op == "sign") {
    if (x.is_int) return Number::of_int(x.i > 0 ? 1 : x.i < 0 ? -1 : 0);
    return Number::of_float(x.f > 0 ? 1.0 : x.f < 0 ? -1.0 : 0.0);
  }
  // round/1 rounds half away from zero, like the comparison layer.
  if (op == "round" || op == "integer") {
    return x.is_int ? x : Number::of_int(round_to_int(x.f));
  }
  if (op == "truncate") {
    return x.is_int ? x : Number::of_int(static_cast<int64_t>(std::trunc(x.f)));
  }
  if (op == "floor") {
    return x.is_int ? x : Number::of_int(static_cast<int64_t>(std::floor(x.f)));
  }
  if (op == "ceiling") {
    return x.is_int ? x : Number::of_int(static_cast<int64_t>(std::ceil(x.f)));
  }
  if (op == "float") return Number::of_float(x.as_double());
  if (op == "float_integer_part") return Number::of_float(std::trunc(x.as_double()));
  if (op == "float_fractional_part") {
    double v = x.as_double();
    return Number::of_float(v - std::trunc(v));
  }
  if (op == "sqrt") {
    double v = x.as_double();
    if (v < 0) eval_error("sqrt of negative number");
    return Number::of_float(std::sqrt(v));
  }
  if (op == "log") {
    double v = x.as_double();
    if (v <= 0) eval_error("log of non-positive number");
    return Number::of_float(std::log(v));
  }
  if (op == "exp") return Number::of_float(std::exp(x.as_double()));
  if (op == "\\") {
    if (!x.is_int) type_error("\\ expects an integer");
    return Number::of_int(~x.i);
  }
  type_error("unknown arithmetic function " + op + "/1");
}

Number eval(const TermPtr& expr, const Bindings& b) {
  const TermPtr& t = b.deref(expr);
  switch (t->tag) {
    case TermTag::Int:
      return Number::of_int(t->ival);
    case TermTag::Float:
      return Number::of_float(t->fval);
    case TermTag::Var:
      throw EngineException(EngineErrorKind::InstantiationError,
                            "unbound variable in arithmetic expression");
    case TermTag::Atom:
      if (t->text == "pi") return Number::of_float(M_PI);
      if (t->text == "e") return Number::of_float(M_E);
      if (t->text == "inf" || t->text == "infinite") {
        return Number::of_float(std::numeric_limits<double>::infinity());
      }
      if (t->text == "nan") return Number::of_float(std::nan(""));
      if (t->text == "epsilon") {
        return Number::of_float(std::numeric_limits<double>::epsilon());
      }
      if (t->text == "max_tagged_integer" || t->text == "random") {
        type_error("unsupported arithmetic constant " + t->text);
      }
      type_error("not an arithmetic expression: " + t->text);
    case TermTag::Str:
      type_error("string in arithmetic expression");
    case TermTag::Compound:
      if (t->args.size() == 1) return eval_unary(t->text, t->args[0], b);
      if (t->args.size() == 2) return eval_binary(t->text, t->args[0], t->args[1], b);
      type_error("unknown arithmetic function " + pred_indicator(pred_key(*t)));
  }
  type_error("not an arithmetic expression");
}

}  // namespace

Number eval_arith(const TermPtr& expr, const Bindings& b) { return eval(expr, b); }

int compare_numbers(const Number& a, const Number& b) {
  if (a.is_int && b.is_int) return a.i < b.i ? -1 : a.i > b.i ? 1 : 0;
  double x = a.as_double(), y = b.as_double();
  if (x < y) return -1;
  if (x > y) return 1;
  return 0;
}

}  // namespace taxlogic::logic
