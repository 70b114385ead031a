#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace taxlogic::logic {

enum class TermTag { Atom, Var, Int, Float, Str, Compound };

class Term;
using TermPtr = std::shared_ptr<const Term>;

/// Immutable term node. Compounds always have arity >= 1; arity-0 callables
/// are atoms. Sharing subterms across clauses and bindings is safe; nothing
/// mutates a Term after construction.
class Term {
 public:
  TermTag tag;
  std::string text;            // Atom name / Var name / Str value / Compound functor
  int64_t ival = 0;            // Int
  double fval = 0.0;           // Float
  uint64_t var_id = 0;         // Var
  std::vector<TermPtr> args;   // Compound
  bool ground = true;          // no Var anywhere below (caches renaming short-cuts)

  size_t arity() const { return args.size(); }
  bool is_atom() const { return tag == TermTag::Atom; }
  bool is_var() const { return tag == TermTag::Var; }
  bool is_number() const { return tag == TermTag::Int || tag == TermTag::Float; }
  bool is_compound() const { return tag == TermTag::Compound; }
  bool is_callable() const { return tag == TermTag::Atom || tag == TermTag::Compound; }
  bool is_atom_named(const std::string& name) const {
    return tag == TermTag::Atom && text == name;
  }
};

TermPtr make_atom(std::string name);
TermPtr make_var(std::string name, uint64_t id);
TermPtr make_int(int64_t v);
TermPtr make_float(double v);
TermPtr make_string(std::string v);
TermPtr make_compound(std::string functor, std::vector<TermPtr> args);

/// Shared singletons for the handful of atoms the engine tests constantly.
const TermPtr& atom_nil();    // []
const TermPtr& atom_true();
const TermPtr& atom_fail();

/// List-cell functor. SARA v2 targets a modern Prolog, whose list cells are
/// '[|]'/2; the classic '.'/2 dialect can be selected once at startup, before
/// any parsing or solving.
const std::string& list_functor();
void set_list_functor(std::string name);

bool is_nil(const TermPtr& t);
bool is_list_cell(const TermPtr& t);
TermPtr make_list(const std::vector<TermPtr>& items, TermPtr tail = nullptr);

/// Functor/arity key for predicate indexing. Atoms have arity 0.
struct PredKey {
  std::string name;
  uint32_t arity = 0;
  bool operator==(const PredKey&) const = default;
};

struct PredKeyHash {
  size_t operator()(const PredKey& k) const {
    return std::hash<std::string>()(k.name) * 31 + k.arity;
  }
};

PredKey pred_key(const Term& t);
std::string pred_indicator(const PredKey& k);  // "name/arity"

/// Standard order of terms: Var < Number < Atom < Str < Compound.
/// Numbers compare by value; on equal value Float precedes Int. Compounds
/// compare by arity, then functor, then arguments left to right.
int compare_terms(const TermPtr& a, const TermPtr& b);

/// Structural equality (==/2 on fully dereferenced terms).
bool terms_equal(const TermPtr& a, const TermPtr& b);

/// Structural equality up to a consistent renaming of variables (variants).
bool terms_variant(const TermPtr& a, const TermPtr& b);

}  // namespace taxlogic::logic
