#include "taxlogic/term.hpp"

#include <map>

#include "taxlogic/errors.hpp"

namespace taxlogic::logic {

namespace {
std::string g_list_functor = "[|]";
}  // namespace

const std::string& list_functor() { return g_list_functor; }
void set_list_functor(std::string name) { g_list_functor = std::move(name); }

TermPtr make_atom(std::string name) {
  auto t = std::make_shared<Term>();
  t->tag = TermTag::Atom;
  t->text = std::move(name);
  return t;
}

TermPtr make_var(std::string name, uint64_t id) {
  auto t = std::make_shared<Term>();
  t->tag = TermTag::Var;
  t->text = std::move(name);
  t->var_id = id;
  t->ground = false;
  return t;
}

TermPtr make_int(int64_t v) {
  auto t = std::make_shared<Term>();
  t->tag = TermTag::Int;
  t->ival = v;
  return t;
}

TermPtr make_float(double v) {
  auto t = std::make_shared<Term>();
  t->tag = TermTag::Float;
  t->fval = v;
  return t;
}

TermPtr make_string(std::string v) {
  auto t = std::make_shared<Term>();
  t->tag = TermTag::Str;
  t->text = std::move(v);
  return t;
}

TermPtr make_compound(std::string functor, std::vector<TermPtr> args) {
  auto t = std::make_shared<Term>();
  t->tag = TermTag::Compound;
  t->text = std::move(functor);
  t->args = std::move(args);
  for (const auto& a : t->args) {
    if (!a->ground) {
      t->ground = false;
      break;
    }
  }
  return t;
}

const TermPtr& atom_nil() {
  static const TermPtr t = make_atom("[]");
  return t;
}

const TermPtr& atom_true() {
  static const TermPtr t = make_atom("true");
  return t;
}

const TermPtr& atom_fail() {
  static const TermPtr t = make_atom("fail");
  return t;
}

bool is_nil(const TermPtr& t) { return t->is_atom_named("[]"); }

bool is_list_cell(const TermPtr& t) {
  return t->tag == TermTag::Compound && t->args.size() == 2 && t->text == g_list_functor;
}

TermPtr make_list(const std::vector<TermPtr>& items, TermPtr tail) {
  TermPtr list = tail ? std::move(tail) : atom_nil();
  for (auto it = items.rbegin(); it != items.rend(); ++it) {
    list = make_compound(g_list_functor, {*it, list});
  }
  return list;
}

PredKey pred_key(const Term& t) {
  return PredKey{t.text, static_cast<uint32_t>(t.args.size())};
}

std::string pred_indicator(const PredKey& k) {
  return k.name + "/" + std::to_string(k.arity);
}

namespace {

int type_rank(const Term& t) {
  switch (t.tag) {
    case TermTag::Var: return 0;
    case TermTag::Int:
    case TermTag::Float: return 1;
    case TermTag::Atom: return 2;
    case TermTag::Str: return 3;
    case TermTag::Compound: return 4;
  }
  return 5;
}

int compare_numbers(const Term& a, const Term& b) {
  if (a.tag == TermTag::Int && b.tag == TermTag::Int) {
    return a.ival < b.ival ? -1 : a.ival > b.ival ? 1 : 0;
  }
  double x = a.tag == TermTag::Int ? static_cast<double>(a.ival) : a.fval;
  double y = b.tag == TermTag::Int ? static_cast<double>(b.ival) : b.fval;
  if (x < y) return -1;
  if (x > y) return 1;
  // Equal value: Float < Int in the standard order.
  int ra = a.tag == TermTag::Float ? 0 : 1;
  int rb = b.tag == TermTag::Float ? 0 : 1;
  return ra - rb;
}

}  // namespace

int compare_terms(const TermPtr& a, const TermPtr& b) {
  if (a.get() == b.get()) return 0;
  int ra = type_rank(*a), rb = type_rank(*b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a->tag) {
    case TermTag::Var:
      return a->var_id < b->var_id ? -1 : a->var_id > b->var_id ? 1 : 0;
    case TermTag::Int:
    case TermTag::Float:
      return compare_numbers(*a, *b);
    case TermTag::Atom:
    case TermTag::Str: {
      int c = a->text.compare(b->text);
      return c < 0 ? -1 : c > 0 ? 1 : 0;
    }
    case TermTag::Compound: {
      if (a->args.size() != b->args.size()) {
        return a->args.size() < b->args.size() ? -1 : 1;
      }
      int c = a->text.compare(b->text);
      if (c != 0) return c < 0 ? -1 : 1;
      for (size_t i = 0; i < a->args.size(); ++i) {
        c = compare_terms(a->args[i], b->args[i]);
        if (c != 0) return c;
      }
      return 0;
    }
  }
  return 0;
}

bool terms_equal(const TermPtr& a, const TermPtr& b) { return compare_terms(a, b) == 0; }

namespace {

bool variant_rec(const TermPtr& a, const TermPtr& b, std::map<uint64_t, uint64_t>& fwd,
                 std::map<uint64_t, uint64_t>& rev) {
  if (a->tag == TermTag::Var && b->tag == TermTag::Var) {
    auto f = fwd.find(a->var_id);
    auto r = rev.find(b->var_id);
    if (f == fwd.end() && r == rev.end()) {
      fwd[a->var_id] = b->var_id;
      rev[b->var_id] = a->var_id;
      return true;
    }
    return f != fwd.end() && r != rev.end() && f->second == b->var_id && r->second == a->var_id;
  }
  if (a->tag != b->tag) return false;
  switch (a->tag) {
    case TermTag::Atom:
    case TermTag::Str: return a->text == b->text;
    case TermTag::Int: return a->ival == b->ival;
    case TermTag::Float: return a->fval == b->fval;
    case TermTag::Compound: {
      if (a->text != b->text || a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); ++i) {
        if (!variant_rec(a->args[i], b->args[i], fwd, rev)) return false;
      }
      return true;
    }
    default: return false;
  }
}

}  // namespace

bool terms_variant(const TermPtr& a, const TermPtr& b) {
  std::map<uint64_t, uint64_t> fwd, rev;
  return variant_rec(a, b, fwd, rev);
}

}  // namespace taxlogic::logic

namespace taxlogic {

const char* engine_error_kind_name(EngineErrorKind kind) {
  static const char* kKindNames[] = {
      "unknown_predicate", "unsupported_builtin", "type_error",     "instantiation_error",
      "evaluation_error",  "overflow",            "resource_limit", "non_numeric_answer",
      "cyclic_answer",     "internal",
  };
  return kKindNames[static_cast<int>(kind)];
}

}  // namespace taxlogic
