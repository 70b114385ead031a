#include "taxlogic/bindings.hpp"

#include <unordered_map>
#include <unordered_set>

namespace taxlogic::logic {

namespace {

// Depth-first substitution with an explicit path set for cycle detection.
bool resolve_rec(const Bindings& b, const TermPtr& t, std::unordered_set<uint64_t>& path,
                 TermPtr& out) {
  const TermPtr& d = b.deref(t);
  switch (d->tag) {
    case TermTag::Var:
      out = d;
      return true;
    case TermTag::Compound: {
      if (d->ground) {
        out = d;
        return true;
      }
      std::vector<TermPtr> args;
      args.reserve(d->args.size());
      for (const auto& a : d->args) {
        const TermPtr& ad = b.deref(a);
        if (ad->tag == TermTag::Var && !b.is_bound(ad->var_id)) {
          args.push_back(ad);
          continue;
        }
        // Guard: a bound var on the path means the chain loops through itself.
        if (a->tag == TermTag::Var) {
          if (path.count(a->var_id)) return false;
          path.insert(a->var_id);
        }
        TermPtr sub;
        if (!resolve_rec(b, ad, path, sub)) return false;
        if (a->tag == TermTag::Var) path.erase(a->var_id);
        args.push_back(std::move(sub));
      }
      out = make_compound(d->text, std::move(args));
      return true;
    }
    default:
      out = d;
      return true;
  }
}

TermPtr resolve_copy_rec(Bindings& b, const TermPtr& t,
                         std::unordered_map<uint64_t, TermPtr>& fresh, int depth) {
  // findall templates are acyclic in practice; depth-cap as a backstop.
  if (depth > 100000) return atom_nil();
  const TermPtr& d = b.deref(t);
  switch (d->tag) {
    case TermTag::Var: {
      auto it = fresh.find(d->var_id);
      if (it != fresh.end()) return it->second;
      TermPtr v = make_var("_G", b.fresh_var());
      fresh.emplace(d->var_id, v);
      return v;
    }
    case TermTag::Compound: {
      if (d->ground) return d;
      std::vector<TermPtr> args;
      args.reserve(d->args.size());
      for (const auto& a : d->args) {
        args.push_back(resolve_copy_rec(b, a, fresh, depth + 1));
      }
      return make_compound(d->text, std::move(args));
    }
    default:
      return d;
  }
}

}  // namespace

std::optional<TermPtr> Bindings::resolve(const TermPtr& t) const {
  std::unordered_set<uint64_t> path;
  const TermPtr& d = deref(t);
  if (d->tag == TermTag::Var) return d;
  if (t->tag == TermTag::Var) path.insert(t->var_id);
  TermPtr out;
  if (!resolve_rec(*this, d, path, out)) return std::nullopt;
  return out;
}

TermPtr Bindings::resolve_copy(const TermPtr& t) {
  std::unordered_map<uint64_t, TermPtr> fresh;
  return resolve_copy_rec(*this, t, fresh, 0);
}

bool occurs_in(uint64_t id, const TermPtr& t, const Bindings& b) {
  const TermPtr& d = b.deref(t);
  if (d->tag == TermTag::Var) return d->var_id == id;
  if (d->tag == TermTag::Compound) {
    for (const auto& a : d->args) {
      if (occurs_in(id, a, b)) return true;
    }
  }
  return false;
}

bool unify(const TermPtr& t1, const TermPtr& t2, Bindings& b, bool occurs_check) {
  size_t entry = b.mark();
  std::vector<std::pair<TermPtr, TermPtr>> work;
  work.emplace_back(t1, t2);
  while (!work.empty()) {
    auto [x, y] = std::move(work.back());
    work.pop_back();
    const TermPtr& dx = b.deref(x);
    const TermPtr& dy = b.deref(y);
    if (dx.get() == dy.get()) continue;
    if (dx->tag == TermTag::Var || dy->tag == TermTag::Var) {
      if (dx->tag == TermTag::Var && dy->tag == TermTag::Var) {
        // Bind younger to older; keeps long-lived vars stable.
        if (dx->var_id < dy->var_id) {
          b.bind(dy->var_id, dx);
        } else if (dy->var_id < dx->var_id) {
          b.bind(dx->var_id, dy);
        }
        continue;
      }
      const TermPtr& var = dx->tag == TermTag::Var ? dx : dy;
      const TermPtr& val = dx->tag == TermTag::Var ? dy : dx;
      if (occurs_check && occurs_in(var->var_id, val, b)) {
        b.undo_to(entry);
        return false;
      }
      b.bind(var->var_id, val);
      continue;
    }
    if (dx->tag != dy->tag) {
      b.undo_to(entry);
      return false;
    }
    bool ok = true;
    switch (dx->tag) {
      case TermTag::Atom:
      case TermTag::Str: ok = dx->text == dy->text; break;
      case TermTag::Int: ok = dx->ival == dy->ival; break;
      case TermTag::Float: ok = dx->fval == dy->fval; break;
      case TermTag::Compound:
        ok = dx->text == dy->text && dx->args.size() == dy->args.size();
        if (ok) {
          for (size_t i = 0; i < dx->args.size(); ++i) {
            work.emplace_back(dx->args[i], dy->args[i]);
          }
        }
        break;
      default: ok = false;
    }
    if (!ok) {
      b.undo_to(entry);
      return false;
    }
  }
  return true;
}

TermPtr rename_term(const TermPtr& t, uint64_t base) {
  if (t->ground) return t;
  if (t->tag == TermTag::Var) return make_var(t->text, base + t->var_id);
  std::vector<TermPtr> args;
  args.reserve(t->args.size());
  for (const auto& a : t->args) args.push_back(rename_term(a, base));
  return make_compound(t->text, std::move(args));
}

}  // namespace taxlogic::logic
