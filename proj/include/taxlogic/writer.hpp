#pragma once

#include <string>

#include "taxlogic/bindings.hpp"
#include "taxlogic/kb.hpp"

namespace taxlogic::logic {

struct WriteOptions {
  bool quoted = true;            // quote atoms that need it (writeq-style)
  bool use_operators = true;     // print infix/prefix notation
  const OperatorTable* ops = nullptr;   // defaults table when null
  const Bindings* bindings = nullptr;   // deref variables while printing
  int max_depth = 10000;         // guard against cyclic bindings
};

/// Prints a term so that parsing the output reproduces a structurally
/// identical term (up to variable ids). Cyclic structures print `...` at the
/// depth guard instead of looping.
std::string term_to_string(const TermPtr& t, const WriteOptions& opts = {});

/// Canonical `Head :- Body.` / `Fact.` rendering of one clause.
std::string clause_to_string(const Clause& c, const OperatorTable& ops);

/// Whole program listing; parse_program of the result reproduces the KB.
std::string kb_to_string(const KnowledgeBase& kb);

}  // namespace taxlogic::logic
