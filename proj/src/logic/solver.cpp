#include "taxlogic/solver.hpp"

#include <algorithm>
#include <new>
#include <set>
#include <unordered_map>

#include "taxlogic/arith.hpp"
#include "taxlogic/writer.hpp"

namespace taxlogic::logic {

namespace {

struct TimeoutSignal {};

// Library predicates that are plain Prolog. User definitions of the same
// name/arity take precedence over these.
constexpr const char* kPreludeSource = R"PL(
member(X, [X|_]).
member(X, [_|T]) :- member(X, T).

memberchk(X, L) :- member(X, L), !.

append([], L, L).
append([H|T], L, [H|R]) :- append(T, L, R).

between(L, H, X) :- nonvar(X), !, integer(X), X >= L, X =< H.
between(L, H, L) :- L =< H.
between(L, H, X) :- L < H, L1 is L + 1, between(L1, H, X).

reverse(L, R) :- reverse_(L, [], R).
reverse_([], Acc, Acc).
reverse_([H|T], Acc, R) :- reverse_(T, [H|Acc], R).

last([X], X) :- !.
last([_|T], X) :- last(T, X).

sum_list(L, S) :- sum_list_(L, 0, S).
sum_list_([], Acc, Acc).
sum_list_([H|T], Acc, S) :- Acc1 is Acc + H, sum_list_(T, Acc1, S).

sumlist(L, S) :- sum_list(L, S).

max_list([H|T], M) :- max_list_(T, H, M).
max_list_([], Acc, Acc).
max_list_([H|T], Acc, M) :- Acc1 is max(Acc, H), max_list_(T, Acc1, M).

min_list([H|T], M) :- min_list_(T, H, M).
min_list_([], Acc, Acc).
min_list_([H|T], Acc, M) :- Acc1 is min(Acc, H), min_list_(T, Acc1, M).

numlist(L, H, []) :- L > H, !.
numlist(L, H, [L|T]) :- L1 is L + 1, numlist(L1, H, T).

succ(X, Y) :- nonvar(X), !, X >= 0, Y is X + 1.
succ(X, Y) :- Y > 0, X is Y - 1.

nth0(I, L, E) :- nth_(L, 0, I, E).
nth1(I, L, E) :- nth_(L, 1, I, E).
nth_([H|_], N, N, H).
nth_([_|T], N, I, E) :- N1 is N + 1, nth_(T, N1, I, E).

select(X, [X|T], T).
select(X, [H|T], [H|R]) :- select(X, T, R).

exclude(_, [], []).
exclude(P, [H|T], R) :- (call(P, H) -> R = R1 ; R = [H|R1]), exclude(P, T, R1).

include(_, [], []).
include(P, [H|T], R) :- (call(P, H) -> R = [H|R1] ; R = R1), include(P, T, R1).

delete([], _, []).
delete([X|T], X, R) :- !, delete(T, X, R).
delete([H|T], X, [H|R]) :- delete(T, X, R).

forall(C, A) :- \+ (C, \+ A).

ignore(G) :- call(G), !.
ignore(_).

plus(A, B, C) :- nonvar(A), nonvar(B), !, C is A + B.
plus(A, B, C) :- nonvar(A), nonvar(C), !, B is C - A.
plus(A, B, C) :- nonvar(B), nonvar(C), A is C - B.
)PL";

// Predicates we know by name but deliberately do not implement; referencing
// them is an engine error that names the predicate, never a silent failure.
const std::set<std::string>& unsupported_names() {
  static const std::set<std::string> kSet = {
      "assert",     "asserta",   "assertz",    "retract",    "retractall",
      "bagof",      "setof",     "aggregate",  "write",      "writeln",
      "print",      "format",    "nl",         "tab",        "read",
      "read_term",  "halt",      "catch",      "throw",      "atom_codes",
      "atom_chars", "atom_length", "atom_concat", "atomic_list_concat",
      "number_codes", "number_chars", "char_code", "sub_atom", "name",
      "string_concat", "string_chars", "string_codes", "string_to_atom",
      "number_string", "atom_string", "term_to_atom",  "tab",
      "assoc_to_list", "list_to_assoc", "nb_getval",  "nb_setval",
      "b_getval",   "b_setval",  "consult",    "ensure_loaded", "use_module",
  };
  return kSet;
}

struct GoalNode {
  TermPtr term;
  size_t cut_barrier;
  int depth;
  std::shared_ptr<const GoalNode> next;
};
using GoalList = std::shared_ptr<const GoalNode>;

GoalList cons(TermPtr term, size_t barrier, int depth, GoalList next) {
  auto node = std::make_shared<GoalNode>();
  node->term = std::move(term);
  node->cut_barrier = barrier;
  node->depth = depth;
  node->next = std::move(next);
  return node;
}

struct Choicepoint {
  enum class Kind { Clauses, Alt };
  Kind kind;
  GoalList resume;   // Clauses: list headed by the pending call; Alt: ready-to-run list
  const KnowledgeBase* src = nullptr;
  const std::vector<uint32_t>* positions = nullptr;
  size_t next_idx = 0;
  size_t trail_mark = 0;
};

struct Budget {
  std::chrono::steady_clock::time_point deadline;
  std::atomic<bool>* cancel = nullptr;
  uint64_t inferences = 0;
  uint64_t max_inferences = 0;

  void check() {
    ++inferences;
    if (std::chrono::steady_clock::now() >= deadline) throw TimeoutSignal{};
    if (cancel != nullptr && cancel->load(std::memory_order_relaxed)) throw TimeoutSignal{};
    if (max_inferences != 0 && inferences > max_inferences) {
      throw EngineException(EngineErrorKind::ResourceLimit, "inference limit exceeded");
    }
  }
};

// Structural comparison under the current bindings, without building the
// resolved term. Standard order; used by ==/2, compare/3, msort/2.
int compare_bound(const TermPtr& a, const TermPtr& b, const Bindings& bind) {
  TermPtr x = bind.deref(a);
  TermPtr y = bind.deref(b);
  if (x->tag == TermTag::Compound && y->tag == TermTag::Compound) {
    if (x->args.size() != y->args.size()) return x->args.size() < y->args.size() ? -1 : 1;
    int c = x->text.compare(y->text);
    if (c != 0) return c < 0 ? -1 : 1;
    for (size_t i = 0; i < x->args.size(); ++i) {
      c = compare_bound(x->args[i], y->args[i], bind);
      if (c != 0) return c;
    }
    return 0;
  }
  if (x->tag == TermTag::Compound || y->tag == TermTag::Compound) {
    return compare_terms(x, y);  // differing ranks; safe without resolution
  }
  return compare_terms(x, y);
}

bool proper_list_items(const TermPtr& t, const Bindings& bind, std::vector<TermPtr>& out) {
  TermPtr cur = bind.deref(t);
  while (is_list_cell(cur)) {
    out.push_back(cur->args[0]);
    cur = bind.deref(cur->args[1]);
  }
  return is_nil(cur);
}

class Machine {
 public:
  Machine(const KnowledgeBase& kb, Bindings& bind, Budget& budget, const SolveOptions& opts)
      : kb_(kb), bind_(bind), budget_(budget), opts_(opts) {}

  void set_goal(TermPtr goal, int depth) {
    goals_ = cons(std::move(goal), 0, depth, nullptr);
  }

  /// Runs resolution; on each solution calls on_solution. Returning false
  /// asks for more solutions (forces backtracking); true stops the search.
  /// Result: true iff stopped by the callback.
  bool run(const std::function<bool()>& on_solution) {
    for (;;) {
      budget_.check();
      if (goals_ == nullptr) {
        trace(TraceEvent::Kind::Solution, nullptr, 0);
        if (on_solution()) return true;
        if (!backtrack()) return false;
        continue;
      }
      GoalList head = goals_;  // keep the node alive across goals_ reassignment
      TermPtr t = bind_.deref(head->term);  // copy: binding may grow the slot store
      if (!dispatch(t, *head)) {
        if (!backtrack()) return false;
      }
    }
  }

  using BuiltinFn = bool (*)(Machine&, const TermPtr&);
  static BuiltinFn find_builtin(const PredKey& key);

 private:
  [[noreturn]] static void err(EngineErrorKind kind, const std::string& msg) {
    throw EngineException(kind, msg);
  }

  void trace(TraceEvent::Kind kind, const TermPtr& goal, int depth,
             const Clause* clause = nullptr) {
    if (!opts_.trace) return;
    TraceEvent ev;
    ev.kind = kind;
    ev.depth = depth;
    ev.goal = goal;
    ev.clause = clause;
    ev.bindings = &bind_;
    opts_.trace(ev);
  }

  bool unify2(const TermPtr& a, const TermPtr& b) {
    return unify(a, b, bind_, opts_.occurs_check);
  }

  // --- control constructs ----------------------------------------------

  // True if dispatched (goals_ updated); false requests backtracking.
  bool dispatch(const TermPtr& t, const GoalNode& g) {
    switch (t->tag) {
      case TermTag::Var:
        err(EngineErrorKind::InstantiationError, "call of an unbound variable");
      case TermTag::Int:
      case TermTag::Float:
      case TermTag::Str:
        err(EngineErrorKind::TypeError,
            "callable expected as goal, found " + term_to_string(t));
      default:
        break;
    }
    const std::string& name = t->text;
    size_t arity = t->args.size();

    if (arity == 0) {
      if (name == "true") {
        goals_ = g.next;
        return true;
      }
      if (name == "fail" || name == "false") return false;
      if (name == "!") {
        if (cps_.size() > g.cut_barrier) cps_.resize(g.cut_barrier);
        goals_ = g.next;
        return true;
      }
    }
    if (arity == 1 && name == "$cut_to") {
      size_t h = static_cast<size_t>(t->args[0]->ival);
      if (cps_.size() > h) cps_.resize(h);
      goals_ = g.next;
      return true;
    }
    if (arity == 2 && name == ",") {
      goals_ = cons(t->args[0], g.cut_barrier, g.depth,
                    cons(t->args[1], g.cut_barrier, g.depth, g.next));
      return true;
    }
    if (arity == 2 && name == ";") {
      TermPtr lhs = bind_.deref(t->args[0]);
      if (lhs->is_compound() && lhs->text == "->" && lhs->args.size() == 2) {
        return dispatch_if_then_else(lhs->args[0], lhs->args[1], t->args[1], g);
      }
      if (lhs->is_compound() && lhs->text == "*->" && lhs->args.size() == 2) {
        err(EngineErrorKind::UnsupportedBuiltin, "soft-cut *-> is not supported");
      }
      Choicepoint cp;
      cp.kind = Choicepoint::Kind::Alt;
      cp.resume = cons(t->args[1], g.cut_barrier, g.depth, g.next);
      cp.trail_mark = bind_.mark();
      cps_.push_back(std::move(cp));
      goals_ = cons(t->args[0], g.cut_barrier, g.depth, g.next);
      return true;
    }
    if (arity == 2 && name == "->") {
      return dispatch_if_then_else(t->args[0], t->args[1], atom_fail(), g);
    }
    if (arity == 1 && (name == "\\+" || name == "not")) {
      size_t mark = bind_.mark();
      bool proven = prove_sub(t->args[0], g.depth + 1);
      bind_.undo_to(mark);
      if (proven) return false;
      goals_ = g.next;
      return true;
    }
    if (name == "call" && arity >= 1 && arity <= 8) {
      TermPtr target = bind_.deref(t->args[0]);
      if (target->tag == TermTag::Var) {
        err(EngineErrorKind::InstantiationError, "call/N with unbound goal");
      }
      if (!target->is_callable()) {
        err(EngineErrorKind::TypeError, "call/N goal must be callable");
      }
      TermPtr goal = target;
      if (arity > 1) {
        std::vector<TermPtr> args(target->args);
        for (size_t i = 1; i < arity; ++i) args.push_back(t->args[i]);
        goal = make_compound(target->text, std::move(args));
      }
      // Cut inside a metacall is local to it.
      goals_ = cons(goal, cps_.size(), g.depth + 1, g.next);
      return true;
    }
    if (name == "findall" && arity == 3) {
      TermPtr list = do_findall(t->args[0], t->args[1], g.depth + 1);
      if (!unify2(t->args[2], list)) return false;
      goals_ = g.next;
      return true;
    }
    if (name == "aggregate_all" && arity == 3) {
      return do_aggregate_all(t, g);
    }

    PredKey key = pred_key(*t);
    if (auto fn = find_builtin(key)) {
      trace(TraceEvent::Kind::Call, t, g.depth);
      if (!fn(*this, t)) return false;
      goals_ = g.next;
      return true;
    }

    // User-defined (or prelude) predicate.
    const KnowledgeBase* src = &kb_;
    const std::vector<uint32_t>* positions = kb_.lookup(key);
    if (positions == nullptr) {
      positions = prelude_kb().lookup(key);
      if (positions != nullptr) src = &prelude_kb();
    }
    if (positions == nullptr) {
      if (kb_.is_dynamic(key)) return false;  // declared, no clauses: clean failure
      if (unsupported_names().count(key.name) > 0) {
        err(EngineErrorKind::UnsupportedBuiltin,
            "unsupported builtin: " + pred_indicator(key));
      }
      err(EngineErrorKind::UnknownPredicate, "unknown predicate: " + pred_indicator(key));
    }
    trace(TraceEvent::Kind::Call, t, g.depth);
    return try_clauses(*src, *positions, 0, t, g, bind_.mark());
  }

  bool dispatch_if_then_else(const TermPtr& cond, const TermPtr& then_goal,
                             const TermPtr& else_goal, const GoalNode& g) {
    size_t commit_to = cps_.size();
    Choicepoint cp;
    cp.kind = Choicepoint::Kind::Alt;
    cp.resume = cons(else_goal, g.cut_barrier, g.depth, g.next);
    cp.trail_mark = bind_.mark();
    cps_.push_back(std::move(cp));
    // cond runs with a local cut barrier; on success $cut_to drops the else
    // alternative and any sub-choices of cond.
    GoalList after = cons(make_compound("$cut_to", {make_int(static_cast<int64_t>(commit_to))}),
                          g.cut_barrier, g.depth,
                          cons(then_goal, g.cut_barrier, g.depth, g.next));
    goals_ = cons(cond, cps_.size(), g.depth, std::move(after));
    return true;
  }

  // --- clause resolution -------------------------------------------------

  bool try_clauses(const KnowledgeBase& src, const std::vector<uint32_t>& positions,
                   size_t start, const TermPtr& call, const GoalNode& g, size_t mark) {
    size_t body_barrier = cps_.size();
    for (size_t idx = start; idx < positions.size(); ++idx) {
      const Clause& clause = src.clauses()[positions[idx]];
      uint64_t base = bind_.fresh_vars(clause.num_vars);
      TermPtr head = rename_term(clause.head, base);
      if (!unify2(call, head)) {
        bind_.undo_to(mark);
        continue;
      }
      if (idx + 1 < positions.size()) {
        Choicepoint cp;
        cp.kind = Choicepoint::Kind::Clauses;
        cp.resume = goals_;
        cp.src = &src;
        cp.positions = &positions;
        cp.next_idx = idx + 1;
        cp.trail_mark = mark;
        cps_.push_back(std::move(cp));
      }
      trace(TraceEvent::Kind::ClauseTry, call, g.depth, &clause);
      GoalList rest = g.next;
      for (auto it = clause.body.rbegin(); it != clause.body.rend(); ++it) {
        rest = cons(rename_term(*it, base), body_barrier, g.depth + 1, rest);
      }
      goals_ = std::move(rest);
      return true;
    }
    trace(TraceEvent::Kind::Fail, call, g.depth);
    return false;
  }

  bool backtrack() {
    while (!cps_.empty()) {
      Choicepoint& cp = cps_.back();
      bind_.undo_to(cp.trail_mark);
      if (cp.kind == Choicepoint::Kind::Alt) {
        goals_ = cp.resume;
        cps_.pop_back();
        return true;
      }
      // Clauses: retry the pending call with the next candidate.
      GoalList resume = cp.resume;
      const GoalNode& call_node = *resume;
      TermPtr call = bind_.deref(call_node.term);
      const KnowledgeBase* src = cp.src;
      const std::vector<uint32_t>* positions = cp.positions;
      size_t idx = cp.next_idx;
      size_t mark = cp.trail_mark;
      trace(TraceEvent::Kind::Redo, call, call_node.depth);
      cps_.pop_back();
      goals_ = resume;
      GoalNode g_copy = call_node;  // body_barrier below = cps_.size() again
      if (try_clauses(*src, *positions, idx, call, g_copy, mark)) return true;
    }
    return false;
  }

  // --- nested engines ------------------------------------------------------

  bool prove_sub(const TermPtr& goal, int depth) {
    Machine sub(kb_, bind_, budget_, opts_);
    sub.set_goal(goal, depth);
    return sub.run([] { return true; });
  }

  TermPtr do_findall(const TermPtr& tmpl, const TermPtr& goal, int depth) {
    size_t mark = bind_.mark();
    std::vector<TermPtr> collected;
    Machine sub(kb_, bind_, budget_, opts_);
    sub.set_goal(goal, depth);
    sub.run([&] {
      collected.push_back(bind_.resolve_copy(tmpl));
      return false;  // keep enumerating
    });
    bind_.undo_to(mark);
    return make_list(collected);
  }

  bool do_aggregate_all(const TermPtr& t, const GoalNode& g) {
    TermPtr spec = bind_.deref(t->args[0]);
    const TermPtr& goal = t->args[1];
    const TermPtr& result = t->args[2];

    if (spec->is_atom_named("count")) {
      size_t mark = bind_.mark();
      int64_t n = 0;
      Machine sub(kb_, bind_, budget_, opts_);
      sub.set_goal(goal, g.depth + 1);
      sub.run([&] {
        ++n;
        return false;
      });
      bind_.undo_to(mark);
      if (!unify2(result, make_int(n))) return false;
      goals_ = g.next;
      return true;
    }
    if (!spec->is_compound() || spec->args.size() != 1) {
      err(EngineErrorKind::TypeError, "aggregate_all/3: unsupported template");
    }
    const std::string& kind = spec->text;
    TermPtr items_list = do_findall(spec->args[0], goal, g.depth + 1);
    std::vector<TermPtr> items;
    proper_list_items(items_list, bind_, items);

    TermPtr out;
    if (kind == "count") {
      out = make_int(static_cast<int64_t>(items.size()));
    } else if (kind == "bag") {
      out = items_list;
    } else if (kind == "set") {
      std::stable_sort(items.begin(), items.end(),
                       [](const TermPtr& a, const TermPtr& b) { return compare_terms(a, b) < 0; });
      items.erase(std::unique(items.begin(), items.end(),
                              [](const TermPtr& a, const TermPtr& b) { return terms_equal(a, b); }),
                  items.end());
      out = make_list(items);
    } else if (kind == "sum") {
      Number acc = Number::of_int(0);
      for (const TermPtr& item : items) {
        Number v = eval_arith(item, bind_);
        if (acc.is_int && v.is_int) {
          int64_t r;
          if (__builtin_add_overflow(acc.i, v.i, &r)) {
            err(EngineErrorKind::Overflow, "integer overflow in aggregate_all(sum)");
          }
          acc = Number::of_int(r);
        } else {
          acc = Number::of_float(acc.as_double() + v.as_double());
        }
      }
      out = acc.to_term();
    } else if (kind == "max" || kind == "min") {
      if (items.empty()) return false;  // standard: no solutions, no extremum
      Number best_n = eval_arith(items[0], bind_);
      for (size_t i = 1; i < items.size(); ++i) {
        Number v = eval_arith(items[i], bind_);
        int c = compare_numbers(v, best_n);
        if ((kind == "max" && c > 0) || (kind == "min" && c < 0)) {
          best_n = v;
        }
      }
      out = best_n.to_term();
    } else {
      err(EngineErrorKind::TypeError, "aggregate_all/3: unsupported template " + kind);
    }
    if (!unify2(result, out)) return false;
    goals_ = g.next;
    return true;
  }

  // --- deterministic builtins ---------------------------------------------

  friend struct BuiltinTable;

  const KnowledgeBase& kb_;
  Bindings& bind_;
  Budget& budget_;
  const SolveOptions& opts_;
  GoalList goals_;
  std::vector<Choicepoint> cps_;
};

// ---------------------------------------------------------------------------
// Builtin implementations. Each returns success/failure; bindings made on a
// failing path are the caller's to undo via backtracking (they sit on the
// trail above the nearest choicepoint mark).

struct BuiltinTable {
  static bool bi_unify(Machine& m, const TermPtr& t) {
    return m.unify2(t->args[0], t->args[1]);
  }

  static bool bi_not_unify(Machine& m, const TermPtr& t) {
    size_t mark = m.bind_.mark();
    bool ok = m.unify2(t->args[0], t->args[1]);
    m.bind_.undo_to(mark);
    return !ok;
  }

  static bool bi_struct_eq(Machine& m, const TermPtr& t) {
    return compare_bound(t->args[0], t->args[1], m.bind_) == 0;
  }

  static bool bi_struct_ne(Machine& m, const TermPtr& t) {
    return compare_bound(t->args[0], t->args[1], m.bind_) != 0;
  }

  static bool bi_at_lt(Machine& m, const TermPtr& t) {
    return compare_bound(t->args[0], t->args[1], m.bind_) < 0;
  }
  static bool bi_at_gt(Machine& m, const TermPtr& t) {
    return compare_bound(t->args[0], t->args[1], m.bind_) > 0;
  }
  static bool bi_at_le(Machine& m, const TermPtr& t) {
    return compare_bound(t->args[0], t->args[1], m.bind_) <= 0;
  }
  static bool bi_at_ge(Machine& m, const TermPtr& t) {
    return compare_bound(t->args[0], t->args[1], m.bind_) >= 0;
  }

  static bool bi_compare(Machine& m, const TermPtr& t) {
    int c = compare_bound(t->args[1], t->args[2], m.bind_);
    const char* sym = c < 0 ? "<" : c > 0 ? ">" : "=";
    return m.unify2(t->args[0], make_atom(sym));
  }

  static bool bi_is(Machine& m, const TermPtr& t) {
    Number v = eval_arith(t->args[1], m.bind_);
    return m.unify2(t->args[0], v.to_term());
  }

  template <int Op>
  static bool bi_arith_cmp(Machine& m, const TermPtr& t) {
    Number a = eval_arith(t->args[0], m.bind_);
    Number b = eval_arith(t->args[1], m.bind_);
    int c = compare_numbers(a, b);
    switch (Op) {
      case 0: return c == 0;   // =:=
      case 1: return c != 0;   // =\=
      case 2: return c < 0;    // <
      case 3: return c > 0;    // >
      case 4: return c <= 0;   // =<
      case 5: return c >= 0;   // >=
    }
    return false;
  }

  template <TermTag Tag>
  static bool bi_type_is(Machine& m, const TermPtr& t) {
    return m.bind_.deref(t->args[0])->tag == Tag;
  }

  static bool bi_number(Machine& m, const TermPtr& t) {
    return m.bind_.deref(t->args[0])->is_number();
  }

  static bool bi_nonvar(Machine& m, const TermPtr& t) {
    return m.bind_.deref(t->args[0])->tag != TermTag::Var;
  }

  static bool bi_atomic(Machine& m, const TermPtr& t) {
    TermTag tag = m.bind_.deref(t->args[0])->tag;
    return tag != TermTag::Var && tag != TermTag::Compound;
  }

  static bool bi_callable(Machine& m, const TermPtr& t) {
    return m.bind_.deref(t->args[0])->is_callable();
  }

  static bool bi_is_list(Machine& m, const TermPtr& t) {
    std::vector<TermPtr> items;
    return proper_list_items(t->args[0], m.bind_, items);
  }

  static bool bi_ground(Machine& m, const TermPtr& t) {
    auto resolved = m.bind_.resolve(t->args[0]);
    return resolved.has_value() && (*resolved)->ground;
  }

  static bool bi_length(Machine& m, const TermPtr& t) {
    TermPtr list = m.bind_.deref(t->args[0]);
    std::vector<TermPtr> items;
    if (proper_list_items(list, m.bind_, items)) {
      return m.unify2(t->args[1], make_int(static_cast<int64_t>(items.size())));
    }
    if (list->tag == TermTag::Var) {
      TermPtr n = m.bind_.deref(t->args[1]);
      if (n->tag != TermTag::Int || n->ival < 0) {
        Machine::err(EngineErrorKind::InstantiationError,
                     "length/2: list and length both unbound");
      }
      std::vector<TermPtr> fresh;
      fresh.reserve(static_cast<size_t>(n->ival));
      for (int64_t i = 0; i < n->ival; ++i) fresh.push_back(make_var("_L", m.bind_.fresh_var()));
      return m.unify2(list, make_list(fresh));
    }
    Machine::err(EngineErrorKind::TypeError, "length/2 expects a list");
  }

  static bool bi_msort(Machine& m, const TermPtr& t) {
    return sort_impl(m, t, /*dedup=*/false);
  }

  static bool bi_sort(Machine& m, const TermPtr& t) {
    return sort_impl(m, t, /*dedup=*/true);
  }

  static bool sort_impl(Machine& m, const TermPtr& t, bool dedup) {
    std::vector<TermPtr> items;
    if (!proper_list_items(t->args[0], m.bind_, items)) {
      Machine::err(EngineErrorKind::TypeError, "sort: proper list expected");
    }
    std::vector<TermPtr> resolved;
    resolved.reserve(items.size());
    for (const TermPtr& item : items) {
      auto r = m.bind_.resolve(item);
      if (!r) Machine::err(EngineErrorKind::TypeError, "sort: cyclic term");
      resolved.push_back(*r);
    }
    std::stable_sort(resolved.begin(), resolved.end(),
                     [](const TermPtr& a, const TermPtr& b) { return compare_terms(a, b) < 0; });
    if (dedup) {
      resolved.erase(
          std::unique(resolved.begin(), resolved.end(),
                      [](const TermPtr& a, const TermPtr& b) { return terms_equal(a, b); }),
          resolved.end());
    }
    return m.unify2(t->args[1], make_list(resolved));
  }

  static bool bi_univ(Machine& m, const TermPtr& t) {
    TermPtr lhs = m.bind_.deref(t->args[0]);
    if (lhs->tag != TermTag::Var) {
      std::vector<TermPtr> parts;
      if (lhs->is_compound()) {
        parts.push_back(make_atom(lhs->text));
        for (const auto& a : lhs->args) parts.push_back(a);
      } else {
        parts.push_back(lhs);
      }
      return m.unify2(t->args[1], make_list(parts));
    }
    std::vector<TermPtr> parts;
    if (!proper_list_items(t->args[1], m.bind_, parts) || parts.empty()) {
      Machine::err(EngineErrorKind::InstantiationError, "=../2: proper list required");
    }
    TermPtr head = m.bind_.deref(parts[0]);
    if (parts.size() == 1) return m.unify2(lhs, head);
    if (!head->is_atom()) {
      Machine::err(EngineErrorKind::TypeError, "=../2: functor must be an atom");
    }
    return m.unify2(lhs, make_compound(head->text,
                                       std::vector<TermPtr>(parts.begin() + 1, parts.end())));
  }

  static bool bi_functor(Machine& m, const TermPtr& t) {
    TermPtr term = m.bind_.deref(t->args[0]);
    if (term->tag != TermTag::Var) {
      TermPtr name = term->is_compound() ? make_atom(term->text) : term;
      return m.unify2(t->args[1], name) &&
             m.unify2(t->args[2], make_int(static_cast<int64_t>(term->args.size())));
    }
    TermPtr name = m.bind_.deref(t->args[1]);
    TermPtr arity = m.bind_.deref(t->args[2]);
    if (arity->tag != TermTag::Int || name->tag == TermTag::Var) {
      Machine::err(EngineErrorKind::InstantiationError, "functor/3: unbound arguments");
    }
    if (arity->ival == 0) return m.unify2(term, name);
    if (!name->is_atom()) {
      Machine::err(EngineErrorKind::TypeError, "functor/3: functor must be an atom");
    }
    std::vector<TermPtr> args;
    for (int64_t i = 0; i < arity->ival; ++i) args.push_back(make_var("_F", m.bind_.fresh_var()));
    return m.unify2(term, make_compound(name->text, std::move(args)));
  }

  static bool bi_arg(Machine& m, const TermPtr& t) {
    TermPtr n = m.bind_.deref(t->args[0]);
    TermPtr term = m.bind_.deref(t->args[1]);
    if (n->tag != TermTag::Int || !term->is_compound()) {
      Machine::err(EngineErrorKind::TypeError, "arg/3: integer and compound expected");
    }
    if (n->ival < 1 || static_cast<size_t>(n->ival) > term->args.size()) return false;
    return m.unify2(t->args[2], term->args[static_cast<size_t>(n->ival - 1)]);
  }

  static bool bi_copy_term(Machine& m, const TermPtr& t) {
    return m.unify2(t->args[1], m.bind_.resolve_copy(t->args[0]));
  }
};

Machine::BuiltinFn Machine::find_builtin(const PredKey& key) {
  static const std::unordered_map<std::string, BuiltinFn> k2 = {
      {"=", &BuiltinTable::bi_unify},
      {"\\=", &BuiltinTable::bi_not_unify},
      {"==", &BuiltinTable::bi_struct_eq},
      {"\\==", &BuiltinTable::bi_struct_ne},
      {"@<", &BuiltinTable::bi_at_lt},
      {"@>", &BuiltinTable::bi_at_gt},
      {"@=<", &BuiltinTable::bi_at_le},
      {"@>=", &BuiltinTable::bi_at_ge},
      {"is", &BuiltinTable::bi_is},
      {"=:=", &BuiltinTable::bi_arith_cmp<0>},
      {"=\\=", &BuiltinTable::bi_arith_cmp<1>},
      {"<", &BuiltinTable::bi_arith_cmp<2>},
      {">", &BuiltinTable::bi_arith_cmp<3>},
      {"=<", &BuiltinTable::bi_arith_cmp<4>},
      {">=", &BuiltinTable::bi_arith_cmp<5>},
      {"msort", &BuiltinTable::bi_msort},
      {"sort", &BuiltinTable::bi_sort},
      {"length", &BuiltinTable::bi_length},
      {"=..", &BuiltinTable::bi_univ},
      {"copy_term", &BuiltinTable::bi_copy_term},
  };
  static const std::unordered_map<std::string, BuiltinFn> k1 = {
      {"var", &BuiltinTable::bi_type_is<TermTag::Var>},
      {"atom", &BuiltinTable::bi_type_is<TermTag::Atom>},
      {"integer", &BuiltinTable::bi_type_is<TermTag::Int>},
      {"float", &BuiltinTable::bi_type_is<TermTag::Float>},
      {"string", &BuiltinTable::bi_type_is<TermTag::Str>},
      {"compound", &BuiltinTable::bi_type_is<TermTag::Compound>},
      {"number", &BuiltinTable::bi_number},
      {"nonvar", &BuiltinTable::bi_nonvar},
      {"atomic", &BuiltinTable::bi_atomic},
      {"callable", &BuiltinTable::bi_callable},
      {"is_list", &BuiltinTable::bi_is_list},
      {"ground", &BuiltinTable::bi_ground},
  };
  static const std::unordered_map<std::string, BuiltinFn> k3 = {
      {"compare", &BuiltinTable::bi_compare},
      {"functor", &BuiltinTable::bi_functor},
      {"arg", &BuiltinTable::bi_arg},
  };
  const std::unordered_map<std::string, BuiltinFn>* table = nullptr;
  switch (key.arity) {
    case 1: table = &k1; break;
    case 2: table = &k2; break;
    case 3: table = &k3; break;
    default: return nullptr;
  }
  auto it = table->find(key.name);
  return it == table->end() ? nullptr : it->second;
}

}  // namespace

const KnowledgeBase& prelude_kb() {
  static const KnowledgeBase kb = [] {
    ParseOptions opts;
    opts.file = "<prelude>";
    return parse_program(kPreludeSource, opts);
  }();
  return kb;
}

bool is_control_or_builtin(const PredKey& key) {
  static const std::set<std::string> kControl = {
      "true", "fail", "false", "!", ",", ";", "->", "\\+", "not", "call",
      "findall", "aggregate_all", "forall",
  };
  if (kControl.count(key.name) > 0) return true;
  if (Machine::find_builtin(key) != nullptr) return true;
  return prelude_kb().lookup(key) != nullptr;
}

const char* outcome_kind_name(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::Solved: return "solved";
    case OutcomeKind::NoSolution: return "no_solution";
    case OutcomeKind::Timeout: return "timeout";
    case OutcomeKind::EngineError: return "engine_error";
  }
  return "?";
}

Solver::Solver(const KnowledgeBase& kb, SolveOptions opts) : kb_(kb), opts_(std::move(opts)) {}

namespace {

ExecutionOutcome run_solver(const KnowledgeBase& kb, const SolveOptions& opts,
                            const ParsedQuery& query,
                            const std::function<bool(const AnswerBindings&)>& on_solution) {
  auto start = std::chrono::steady_clock::now();
  Budget budget;
  budget.deadline = start + opts.budget;
  budget.cancel = opts.cancel;
  budget.max_inferences = opts.max_inferences;

  ExecutionOutcome out;
  Bindings bind;
  uint64_t base = bind.fresh_vars(query.num_vars);
  TermPtr goal = rename_term(query.goal, base);

  Machine machine(kb, bind, budget, opts);
  machine.set_goal(goal, 0);

  try {
    bool any = false;
    bool stopped = machine.run([&] {
      AnswerBindings answers;
      for (const auto& [name, local_id] : query.var_names) {
        TermPtr v = make_var(name, base + local_id);
        auto resolved = bind.resolve(v);
        if (!resolved) {
          throw EngineException(EngineErrorKind::CyclicAnswer,
                                "cyclic term in answer for " + name);
        }
        answers.emplace_back(name, *resolved);
      }
      any = true;
      return !on_solution(answers);
    });
    (void)stopped;
    out.kind = any ? OutcomeKind::Solved : OutcomeKind::NoSolution;
  } catch (const TimeoutSignal&) {
    out.kind = OutcomeKind::Timeout;
  } catch (const EngineException& e) {
    out.kind = OutcomeKind::EngineError;
    out.error_kind = e.kind();
    out.error_message = e.what();
  } catch (const std::bad_alloc&) {
    out.kind = OutcomeKind::EngineError;
    out.error_kind = EngineErrorKind::ResourceLimit;
    out.error_message = "memory exhausted during resolution";
  }
  out.elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);
  out.inference_count = budget.inferences;
  return out;
}

}  // namespace

ExecutionOutcome Solver::solve(const ParsedQuery& query) {
  ExecutionOutcome out;
  bool first = true;
  AnswerBindings kept;
  out = run_solver(kb_, opts_, query, [&](const AnswerBindings& answers) {
    if (first) {
      kept = answers;
      first = false;
    }
    return false;  // stop at the first solution
  });
  if (out.kind == OutcomeKind::Solved) out.answers = std::move(kept);
  return out;
}

ExecutionOutcome Solver::solve_all(const ParsedQuery& query,
                                   const std::function<bool(const AnswerBindings&)>& on_solution) {
  return run_solver(kb_, opts_, query, on_solution);
}

DollarOutcome run_query_for_dollars(const KnowledgeBase& kb, const ParsedQuery& query,
                                    const std::string& answer_var, const SolveOptions& opts) {
  DollarOutcome result;
  Solver solver(kb, opts);
  result.outcome = solver.solve(query);
  if (result.outcome.kind != OutcomeKind::Solved) return result;
  const TermPtr* answer = result.outcome.answer(answer_var);
  if (answer == nullptr) {
    result.outcome.kind = OutcomeKind::EngineError;
    result.outcome.error_kind = EngineErrorKind::NonNumericAnswer;
    result.outcome.error_message = "query has no variable named " + answer_var;
    return result;
  }
  const TermPtr& t = *answer;
  if (t->tag == TermTag::Int) {
    result.dollars = static_cast<double>(t->ival);
  } else if (t->tag == TermTag::Float) {
    result.dollars = t->fval;
  } else {
    result.outcome.kind = OutcomeKind::EngineError;
    result.outcome.error_kind = EngineErrorKind::NonNumericAnswer;
    result.outcome.error_message =
        "non-numeric answer: " + answer_var + " = " + term_to_string(t);
  }
  return result;
}

CancelWatchdog::CancelWatchdog(std::atomic<bool>& flag, std::chrono::milliseconds delay) {
  thread_ = std::thread([this, &flag, delay] {
    std::unique_lock<std::mutex> lock(mu_);
    if (!cv_.wait_for(lock, delay, [this] { return stop_; })) {
      flag.store(true, std::memory_order_relaxed);
    }
  });
}

CancelWatchdog::~CancelWatchdog() {
  {
    std::lock_guard<std::mutex> lock(mu_);
    stop_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

}  // namespace taxlogic::logic
