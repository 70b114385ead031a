#pragma once

#include <cstdint>
#include <variant>

#include "taxlogic/bindings.hpp"
#include "taxlogic/term.hpp"

namespace taxlogic::logic {

/// Arithmetic value: exact 64-bit integer or IEEE double. Integer operations
/// are overflow-checked and raise EngineException(Overflow) instead of
/// wrapping.
struct Number {
  bool is_int = true;
  int64_t i = 0;
  double f = 0.0;

  static Number of_int(int64_t v) { return Number{true, v, 0.0}; }
  static Number of_float(double v) { return Number{false, 0, v}; }
  double as_double() const { return is_int ? static_cast<double>(i) : f; }
  TermPtr to_term() const { return is_int ? make_int(i) : make_float(f); }
};

/// Evaluates a ground arithmetic expression under b. Throws EngineException
/// with InstantiationError (unbound variable), TypeError (unknown function or
/// non-numeric leaf), EvaluationError (zero divisor), or Overflow.
Number eval_arith(const TermPtr& expr, const Bindings& b);

/// Three-way numeric comparison for =:=, <, etc. Exact when both are ints.
int compare_numbers(const Number& a, const Number& b);

}  // namespace taxlogic::logic
