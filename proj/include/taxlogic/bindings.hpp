#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "taxlogic/term.hpp"

namespace taxlogic::logic {

/// Substitution store plus undo trail. Variable ids are allocated from a
/// monotonically increasing counter owned by this store; binding slots grow
/// lazily on first bind. Undoing the trail to a mark restores the exact
/// prior substitution.
class Bindings {
 public:
  uint64_t fresh_var() { return next_id_++; }
  uint64_t fresh_vars(uint64_t n) {
    uint64_t base = next_id_;
    next_id_ += n;
    return base;
  }
  uint64_t var_count() const { return next_id_; }

  bool is_bound(uint64_t id) const { return id < slots_.size() && slots_[id] != nullptr; }

  const TermPtr& value(uint64_t id) const { return slots_[id]; }

  void bind(uint64_t id, TermPtr t) {
    if (id >= slots_.size()) slots_.resize(id + 1);
    slots_[id] = std::move(t);
    trail_.push_back(id);
  }

  size_t mark() const { return trail_.size(); }

  void undo_to(size_t mark) {
    while (trail_.size() > mark) {
      slots_[trail_.back()] = nullptr;
      trail_.pop_back();
    }
  }

  /// Follow variable chains one level at a time until an unbound var or a
  /// non-var term. Never allocates.
  const TermPtr& deref(const TermPtr& t) const {
    const TermPtr* cur = &t;
    while ((*cur)->tag == TermTag::Var && is_bound((*cur)->var_id)) {
      cur = &slots_[(*cur)->var_id];
    }
    return *cur;
  }

  /// Full substitution: rebuilds the term with every bound variable replaced.
  /// Returns nullopt if the binding structure is cyclic (e.g. X = f(X) under
  /// the no-occurs-check policy); callers decide whether that is an error.
  std::optional<TermPtr> resolve(const TermPtr& t) const;

  /// Like resolve but replaces unbound variables with fresh ones
  /// (copy_term semantics, used by findall).
  TermPtr resolve_copy(const TermPtr& t);

 private:
  std::vector<TermPtr> slots_;
  std::vector<uint64_t> trail_;
  uint64_t next_id_ = 0;
};

/// Attempt to unify t1 and t2, extending b. On success the trail records the
/// new bindings; on failure b is restored to its state at entry. Unbound
/// var-var unification binds the younger variable to the older one.
bool unify(const TermPtr& t1, const TermPtr& t2, Bindings& b, bool occurs_check = false);

/// True if var `id` occurs in t under b (used by the occurs-check policy).
bool occurs_in(uint64_t id, const TermPtr& t, const Bindings& b);

/// Instantiate a clause-local term (vars numbered 0..n-1) against a runtime
/// variable base: Var(i) becomes Var(base+i). Ground subterms are shared.
TermPtr rename_term(const TermPtr& t, uint64_t base);

}  // namespace taxlogic::logic
