#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "taxlogic/term.hpp"

namespace taxlogic::logic {

struct SourceSpan {
  std::string file;
  int line = 0;
};

/// One Horn clause. Variables are numbered densely 0..num_vars-1, local to
/// the clause; the solver renames them against a runtime base on each use.
struct Clause {
  TermPtr head;                // Atom or Compound, never Var/number/string
  std::vector<TermPtr> body;   // empty for facts; control terms kept intact
  uint64_t num_vars = 0;
  SourceSpan span;
};

enum class OpType { xfx, xfy, yfx, fy, fx, xf, yf };

struct OpDef {
  int priority = 0;
  OpType type = OpType::xfx;
};

/// Operator table used by the reader and the writer. Prefix and
/// infix/postfix definitions for the same name coexist.
class OperatorTable {
 public:
  static OperatorTable defaults();

  void add(const std::string& name, int priority, OpType type);
  const OpDef* prefix(const std::string& name) const;
  const OpDef* infix_postfix(const std::string& name) const;

 private:
  std::map<std::string, OpDef> prefix_;
  std::map<std::string, OpDef> infix_postfix_;
};

/// Ordered clause store with a functor/arity index. Immutable once loading
/// finishes; safe to share across concurrent solver contexts.
class KnowledgeBase {
 public:
  void add_clause(Clause clause);
  void append(const KnowledgeBase& other);  // other's clauses after ours

  const std::vector<Clause>& clauses() const { return clauses_; }
  const std::vector<uint32_t>* lookup(const PredKey& key) const;
  bool defines(const PredKey& key) const { return index_.count(key) > 0; }

  void declare_dynamic(const PredKey& key) { dynamic_.insert(pred_indicator(key)); }
  bool is_dynamic(const PredKey& key) const { return dynamic_.count(pred_indicator(key)) > 0; }
  const std::set<std::string>& dynamic_predicates() const { return dynamic_; }

  void add_directive(TermPtr goal, SourceSpan span) {
    directives_.push_back({std::move(goal), std::move(span)});
  }
  struct Directive {
    TermPtr goal;
    SourceSpan span;
  };
  const std::vector<Directive>& directives() const { return directives_; }

  OperatorTable& operators() { return ops_; }
  const OperatorTable& operators() const { return ops_; }

  /// Every predicate key referenced in clause bodies or directives.
  std::set<std::string> referenced_predicates() const;

 private:
  std::vector<Clause> clauses_;
  std::unordered_map<PredKey, std::vector<uint32_t>, PredKeyHash> index_;
  std::set<std::string> dynamic_;
  std::vector<Directive> directives_;
  OperatorTable ops_ = OperatorTable::defaults();
};

}  // namespace taxlogic::logic
