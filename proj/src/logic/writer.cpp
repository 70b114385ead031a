#include "taxlogic/writer.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace taxlogic::logic {

namespace {

bool all_symbol_chars(const std::string& s) {
  static const std::string kSymbols = "+-*/\\^<>=~:.?@#&$";
  for (char c : s) {
    if (kSymbols.find(c) == std::string::npos) return false;
  }
  return !s.empty();
}

bool atom_needs_quotes(const std::string& s) {
  if (s.empty()) return true;
  if (s == "[]" || s == "{}" || s == "!" || s == ";" || s == ",") return false;
  if (std::islower(static_cast<unsigned char>(s[0]))) {
    for (char c : s) {
      if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return true;
    }
    return false;
  }
  return !all_symbol_chars(s);
}

std::string quote_atom(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    switch (c) {
      case '\'': out += "\\'"; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('\'');
  return out;
}

std::string escape_string(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
  return out;
}

std::string float_to_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string s(buf, end);
  // Keep the token lexable as a float.
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

class Writer {
 public:
  Writer(const WriteOptions& opts)
      : opts_(opts), ops_(opts.ops ? *opts.ops : OperatorTable::defaults()) {}

  std::string write(const TermPtr& t) {
    std::string out;
    emit(out, t, 1200, opts_.max_depth);
    return out;
  }

 private:
  const TermPtr& deref(const TermPtr& t) const {
    return opts_.bindings ? opts_.bindings->deref(t) : t;
  }

  void emit_atom(std::string& out, const std::string& name) const {
    out += (opts_.quoted && atom_needs_quotes(name)) ? quote_atom(name) : name;
  }

  static char last_char(const std::string& s) { return s.empty() ? ' ' : s.back(); }

  // Avoid gluing adjacent tokens into one (e.g. `a- -1`, `2**-3`).
  static void append_glued(std::string& out, const std::string& next) {
    static const std::string kSymbols = "+-*/\\^<>=~:.?@#&$";
    if (!out.empty() && !next.empty()) {
      char a = last_char(out), b = next[0];
      bool sym = kSymbols.find(a) != std::string::npos && kSymbols.find(b) != std::string::npos;
      bool alnum = (std::isalnum(static_cast<unsigned char>(a)) || a == '_') &&
                   (std::isalnum(static_cast<unsigned char>(b)) || b == '_');
      if (sym || alnum) out.push_back(' ');
    }
    out += next;
  }

  void emit(std::string& out, const TermPtr& term, int max_priority, int depth) {
    if (depth <= 0) {
      out += "...";
      return;
    }
    const TermPtr& t = deref(term);
    switch (t->tag) {
      case TermTag::Var:
        out += "_G" + std::to_string(t->var_id);
        return;
      case TermTag::Int: {
        std::string s = std::to_string(t->ival);
        append_glued(out, s);
        return;
      }
      case TermTag::Float:
        append_glued(out, float_to_string(t->fval));
        return;
      case TermTag::Str:
        out += escape_string(t->text);
        return;
      case TermTag::Atom:
        emit_atom(out, t->text);
        return;
      case TermTag::Compound:
        break;
    }

    // Lists.
    if (is_list_cell(t)) {
      out.push_back('[');
      emit(out, t->args[0], 999, depth - 1);
      TermPtr tail = deref(t->args[1]);
      int d = depth - 1;
      while (is_list_cell(tail) && d > 0) {
        out.push_back(',');
        emit(out, tail->args[0], 999, d - 1);
        tail = deref(tail->args[1]);
        --d;
      }
      if (d <= 0) {
        out += "|...";
      } else if (!is_nil(tail)) {
        out.push_back('|');
        emit(out, tail, 999, d - 1);
      }
      out.push_back(']');
      return;
    }
    if (t->text == "{}" && t->args.size() == 1) {
      out.push_back('{');
      emit(out, t->args[0], 1200, depth - 1);
      out.push_back('}');
      return;
    }

    if (opts_.use_operators) {
      if (t->args.size() == 2) {
        if (const OpDef* def = ops_.infix_postfix(t->text);
            def != nullptr && (def->type == OpType::xfx || def->type == OpType::xfy ||
                               def->type == OpType::yfx)) {
          int lmax = def->type == OpType::yfx ? def->priority : def->priority - 1;
          int rmax = def->type == OpType::xfy ? def->priority : def->priority - 1;
          bool paren = def->priority > max_priority;
          if (paren) out.push_back('(');
          emit(out, t->args[0], lmax, depth - 1);
          if (t->text == ",") {
            out += ",";
          } else if (all_symbol_chars(t->text)) {
            append_glued(out, t->text);
          } else {
            out.push_back(' ');
            emit_atom(out, t->text);
            out.push_back(' ');
          }
          emit(out, t->args[1], rmax, depth - 1);
          if (paren) out.push_back(')');
          return;
        }
      }
      if (t->args.size() == 1) {
        if (const OpDef* def = ops_.prefix(t->text)) {
          int amax = def->type == OpType::fy ? def->priority : def->priority - 1;
          bool paren = def->priority > max_priority;
          if (paren) out.push_back('(');
          emit_atom(out, t->text);
          if (!all_symbol_chars(t->text)) out.push_back(' ');
          size_t mark = out.size();
          emit(out, t->args[0], amax, depth - 1);
          // `- 1` must not read back as the literal -1's operator form; glue
          // guard covers symbols, numbers after symbolic prefixes need a space.
          if (mark < out.size() && all_symbol_chars(t->text)) {
            char c = out[mark];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '(') {
              out.insert(mark, " ");
            }
          }
          if (paren) out.push_back(')');
          return;
        }
      }
    }

    emit_atom(out, t->text);
    out.push_back('(');
    for (size_t i = 0; i < t->args.size(); ++i) {
      if (i) out.push_back(',');
      emit(out, t->args[i], 999, depth - 1);
    }
    out.push_back(')');
  }

  const WriteOptions& opts_;
  OperatorTable ops_;
};

}  // namespace

std::string term_to_string(const TermPtr& t, const WriteOptions& opts) {
  return Writer(opts).write(t);
}

std::string clause_to_string(const Clause& c, const OperatorTable& ops) {
  WriteOptions opts;
  opts.ops = &ops;
  std::string out = term_to_string(c.head, opts);
  if (!c.body.empty()) {
    out += " :-\n    ";
    for (size_t i = 0; i < c.body.size(); ++i) {
      if (i) out += ",\n    ";
      WriteOptions body_opts = opts;
      std::string goal = term_to_string(c.body[i], body_opts);
      // Control terms at priority > 999 need parens inside the conjunction.
      const TermPtr& g = c.body[i];
      bool paren = g->is_compound() && g->args.size() == 2 &&
                   (g->text == ";" || g->text == "->" || g->text == ",");
      out += paren ? "(" + goal + ")" : goal;
    }
  }
  out += ".";
  return out;
}

std::string kb_to_string(const KnowledgeBase& kb) {
  std::string out;
  for (const std::string& pi : kb.dynamic_predicates()) {
    out += ":- dynamic " + pi + ".\n";
  }
  WriteOptions opts;
  opts.ops = &kb.operators();
  for (const auto& d : kb.directives()) {
    out += ":- " + term_to_string(d.goal, opts) + ".\n";
  }
  for (const Clause& c : kb.clauses()) {
    out += clause_to_string(c, kb.operators());
    out += "\n";
  }
  return out;
}

}  // namespace taxlogic::logic
