#pragma once

#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "taxlogic/kb.hpp"
#include "taxlogic/lexer.hpp"

namespace taxlogic::logic {

struct ParseOptions {
  std::string file;  // for error reporting and clause spans
  /// When set, directives other than the handled subset (op/3, dynamic/1,
  /// discontiguous/1) are collected on the KB instead of rejected. The corpus
  /// loader uses this: SARA case files carry their test query as a directive.
  bool collect_directives = false;
};

/// A read query: goal with clause-local variable numbering plus the name of
/// each named (non-'_') variable, for answer reporting.
struct ParsedQuery {
  TermPtr goal;
  uint64_t num_vars = 0;
  std::vector<std::pair<std::string, uint64_t>> var_names;  // in order of first occurrence
};

/// Parses a full program text into a KnowledgeBase. Operator expressions are
/// resolved by priority/associativity; `:- op(P,T,N)` directives take effect
/// immediately; unknown directives are rejected (or collected, per options).
KnowledgeBase parse_program(const std::string& text, const ParseOptions& opts = {});

/// Parses program text into an existing KB (shares its operator table).
void parse_program_into(KnowledgeBase& kb, const std::string& text, const ParseOptions& opts = {});

/// Parses a single term followed by '.' — the REPL/query entry point.
ParsedQuery parse_query(const std::string& text, const OperatorTable& ops,
                        const std::string& file = "");

/// Splits a conjunction term on ','/2 into a flat goal list.
std::vector<TermPtr> flatten_conjunction(const TermPtr& t);

}  // namespace taxlogic::logic
