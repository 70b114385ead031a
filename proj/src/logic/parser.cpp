#include "taxlogic/parser.hpp"

#include <algorithm>
#include <cassert>

#include "taxlogic/errors.hpp"

namespace taxlogic::logic {

OperatorTable OperatorTable::defaults() {
  OperatorTable t;
  t.add(":-", 1200, OpType::xfx);
  t.add("-->", 1200, OpType::xfx);
  t.add(":-", 1200, OpType::fx);
  t.add("?-", 1200, OpType::fx);
  for (const char* decl : {"dynamic", "discontiguous", "multifile", "initialization",
                           "meta_predicate", "table"}) {
    t.add(decl, 1150, OpType::fx);
  }
  t.add(";", 1100, OpType::xfy);
  t.add("->", 1050, OpType::xfy);
  t.add("*->", 1050, OpType::xfy);
  t.add(",", 1000, OpType::xfy);
  t.add("\\+", 900, OpType::fy);
  t.add("not", 900, OpType::fy);
  for (const char* op : {"=", "\\=", "==", "\\==", "=..", "is", "=:=", "=\\=", "<", ">", "=<",
                         ">=", "@<", "@>", "@=<", "@>=", "as", ">:<", ":<"}) {
    t.add(op, 700, OpType::xfx);
  }
  t.add("+", 500, OpType::yfx);
  t.add("-", 500, OpType::yfx);
  t.add("/\\", 500, OpType::yfx);
  t.add("\\/", 500, OpType::yfx);
  t.add("xor", 500, OpType::yfx);
  t.add("*", 400, OpType::yfx);
  t.add("/", 400, OpType::yfx);
  t.add("//", 400, OpType::yfx);
  t.add("mod", 400, OpType::yfx);
  t.add("rem", 400, OpType::yfx);
  t.add("div", 400, OpType::yfx);
  t.add("<<", 400, OpType::yfx);
  t.add(">>", 400, OpType::yfx);
  t.add("**", 200, OpType::xfx);
  t.add("^", 200, OpType::xfy);
  t.add("-", 200, OpType::fy);
  t.add("+", 200, OpType::fy);
  t.add("\\", 200, OpType::fy);
  t.add("$", 1, OpType::fx);
  return t;
}

void OperatorTable::add(const std::string& name, int priority, OpType type) {
  if (type == OpType::fy || type == OpType::fx) {
    prefix_[name] = OpDef{priority, type};
  } else {
    infix_postfix_[name] = OpDef{priority, type};
  }
}

const OpDef* OperatorTable::prefix(const std::string& name) const {
  auto it = prefix_.find(name);
  return it == prefix_.end() ? nullptr : &it->second;
}

const OpDef* OperatorTable::infix_postfix(const std::string& name) const {
  auto it = infix_postfix_.find(name);
  return it == infix_postfix_.end() ? nullptr : &it->second;
}

void KnowledgeBase::add_clause(Clause clause) {
  PredKey key = pred_key(*clause.head);
  index_[key].push_back(static_cast<uint32_t>(clauses_.size()));
  clauses_.push_back(std::move(clause));
}

void KnowledgeBase::append(const KnowledgeBase& other) {
  for (const Clause& c : other.clauses_) add_clause(c);
  for (const auto& d : other.directives_) directives_.push_back(d);
  dynamic_.insert(other.dynamic_.begin(), other.dynamic_.end());
}

const std::vector<uint32_t>* KnowledgeBase::lookup(const PredKey& key) const {
  auto it = index_.find(key);
  return it == index_.end() ? nullptr : &it->second;
}

namespace {

void collect_goal_preds(const TermPtr& t, std::set<std::string>& out) {
  if (!t->is_callable()) return;
  if (t->is_compound() &&
      (t->text == "," || t->text == ";" || t->text == "->" || t->text == "\\+") &&
      (t->args.size() == 2 || (t->text == "\\+" && t->args.size() == 1))) {
    for (const auto& a : t->args) collect_goal_preds(a, out);
    return;
  }
  out.insert(pred_indicator(pred_key(*t)));
  // Meta-arguments of the enumeration builtins are goals too.
  if (t->is_compound() && (t->text == "findall" || t->text == "aggregate_all") &&
      t->args.size() == 3) {
    collect_goal_preds(t->args[1], out);
  }
  if (t->is_compound() && t->text == "call" && !t->args.empty()) {
    collect_goal_preds(t->args[0], out);
  }
}

}  // namespace

std::set<std::string> KnowledgeBase::referenced_predicates() const {
  std::set<std::string> out;
  for (const Clause& c : clauses_) {
    for (const auto& g : c.body) collect_goal_preds(g, out);
  }
  for (const auto& d : directives_) collect_goal_preds(d.goal, out);
  return out;
}

namespace {

class Reader {
 public:
  Reader(const std::vector<Token>& tokens, OperatorTable& ops, const std::string& file)
      : tokens_(tokens), ops_(ops), file_(file) {}

  bool at_eof() const { return peek().type == TokenType::Eof; }

  /// Reads `Term .`; resets the per-clause variable table first.
  TermPtr read_clause_term() {
    var_ids_.clear();
    var_order_.clear();
    next_var_ = 0;
    TermPtr t = parse(1200);
    const Token& end = peek();
    if (end.type != TokenType::End) {
      fail(end, "operator or '.' expected");
    }
    ++pos_;
    return t;
  }

  uint64_t num_vars() const { return next_var_; }
  const std::vector<std::pair<std::string, uint64_t>>& var_order() const { return var_order_; }
  int current_line() const { return peek().pos.line; }

 private:
  const Token& peek(size_t ahead = 0) const {
    size_t i = pos_ + ahead;
    return i < tokens_.size() ? tokens_[i] : tokens_.back();
  }
  const Token& take() { return tokens_[pos_++]; }
  [[noreturn]] void fail(const Token& at, const std::string& msg) const {
    throw ParseError(file_, at.pos, msg);
  }

  static bool is_term_start(const Token& t) {
    switch (t.type) {
      case TokenType::Int:
      case TokenType::Float:
      case TokenType::Str:
      case TokenType::Var:
      case TokenType::Atom:
        return true;
      case TokenType::Punct:
        return t.text == "(" || t.text == "[" || t.text == "{";
      default:
        return false;
    }
  }

  static bool terminates_operand(const Token& t) {
    if (t.type == TokenType::End || t.type == TokenType::Eof) return true;
    return t.type == TokenType::Punct &&
           (t.text == ")" || t.text == "]" || t.text == "}" || t.text == "," || t.text == "|");
  }

  TermPtr var_term(const Token& t) {
    if (t.text == "_") {
      return make_var("_", next_var_++);
    }
    auto it = var_ids_.find(t.text);
    if (it != var_ids_.end()) return make_var(t.text, it->second);
    uint64_t id = next_var_++;
    var_ids_.emplace(t.text, id);
    var_order_.emplace_back(t.text, id);
    return make_var(t.text, id);
  }

  std::vector<TermPtr> parse_arglist() {  // after '('; consumes ')'
    std::vector<TermPtr> args;
    for (;;) {
      args.push_back(parse(999));
      const Token& t = take();
      if (t.is_punct(")")) return args;
      if (!t.is_punct(",")) fail(t, "',' or ')' expected in argument list");
    }
  }

  TermPtr parse_list() {  // after '['
    if (peek().is_punct("]")) {
      take();
      return atom_nil();
    }
    std::vector<TermPtr> items;
    TermPtr tail;
    for (;;) {
      items.push_back(parse(999));
      const Token& t = take();
      if (t.is_punct("]")) break;
      if (t.is_punct(",")) continue;
      if (t.is_punct("|")) {
        tail = parse(999);
        const Token& close = take();
        if (!close.is_punct("]")) fail(close, "']' expected after list tail");
        break;
      }
      fail(t, "',', '|' or ']' expected in list");
    }
    return make_list(items, tail);
  }

  struct Operand {
    TermPtr term;
    int priority = 0;
  };

  Operand parse_primary(int max_priority) {
    const Token& t = take();
    switch (t.type) {
      case TokenType::Int:
        return {make_int(t.ival), 0};
      case TokenType::Float:
        return {make_float(t.fval), 0};
      case TokenType::Str:
        return {make_string(t.text), 0};
      case TokenType::Var:
        return {var_term(t), 0};
      case TokenType::Punct:
        if (t.text == "(") {
          TermPtr inner = parse(1200);
          const Token& close = take();
          if (!close.is_punct(")")) fail(close, "')' expected");
          return {inner, 0};
        }
        if (t.text == "[") return {parse_list(), 0};
        if (t.text == "{") {
          if (peek().is_punct("}")) {
            take();
            return {make_atom("{}"), 0};
          }
          TermPtr inner = parse(1200);
          const Token& close = take();
          if (!close.is_punct("}")) fail(close, "'}' expected");
          return {make_compound("{}", {inner}), 0};
        }
        fail(t, "unexpected '" + t.text + "'");
      case TokenType::Atom: {
        // Functional notation: atom immediately followed by '('.
        if (peek().is_punct("(") && !peek().layout_before) {
          take();
          return {make_compound(t.text, parse_arglist()), 0};
        }
        if (!t.quoted) {
          if (const OpDef* pre = ops_.prefix(t.text)) {
            // Negative literals: '-'/'+' directly applied to a number.
            if ((t.text == "-" || t.text == "+") &&
                (peek().type == TokenType::Int || peek().type == TokenType::Float)) {
              const Token& num = take();
              bool neg = t.text == "-";
              if (num.type == TokenType::Int) {
                return {make_int(neg ? -num.ival : num.ival), 0};
              }
              return {make_float(neg ? -num.fval : num.fval), 0};
            }
            if (pre->priority <= max_priority && is_term_start(peek()) &&
                can_begin_operand(peek())) {
              int arg_max = pre->type == OpType::fy ? pre->priority : pre->priority - 1;
              Operand arg = parse_expr(arg_max);
              return {make_compound(t.text, {arg.term}), pre->priority};
            }
          }
        }
        return {make_atom(t.text), atom_standalone_priority(t)};
      }
      default:
        fail(t, "term expected");
    }
  }

  // An operator atom in operand position is only a primary if what follows
  // cannot extend an operator expression (e.g. `f(+, a)`).
  bool can_begin_operand(const Token& t) const {
    if (t.type != TokenType::Atom || t.quoted) return true;
    if (ops_.infix_postfix(t.text) != nullptr && ops_.prefix(t.text) == nullptr) {
      // Bare infix operator right after a prefix operator: let the infix
      // reading win (`a - - b` still works because '-' is also prefix).
      return !terminates_operand(peek(1)) && is_term_start(peek(1));
    }
    return true;
  }

  int atom_standalone_priority(const Token& t) const {
    if (t.quoted) return 0;
    int p = 0;
    if (const OpDef* d = ops_.prefix(t.text)) p = std::max(p, d->priority);
    if (const OpDef* d = ops_.infix_postfix(t.text)) p = std::max(p, d->priority);
    return p;
  }

  TermPtr parse(int max_priority) { return parse_expr(max_priority).term; }

  Operand parse_expr(int max_priority) {
    Operand left = parse_primary(max_priority);
    for (;;) {
      const Token& t = peek();
      std::string op_name;
      if (t.type == TokenType::Atom && !t.quoted) {
        op_name = t.text;
      } else if (t.is_punct(",")) {
        op_name = ",";
      } else {
        break;
      }
      const OpDef* def = ops_.infix_postfix(op_name);
      if (def == nullptr) break;
      int left_max, right_max;
      switch (def->type) {
        case OpType::xfx: left_max = def->priority - 1; right_max = def->priority - 1; break;
        case OpType::xfy: left_max = def->priority - 1; right_max = def->priority; break;
        case OpType::yfx: left_max = def->priority; right_max = def->priority - 1; break;
        case OpType::xf:  left_max = def->priority - 1; right_max = -1; break;
        case OpType::yf:  left_max = def->priority; right_max = -1; break;
        default: left_max = right_max = -1; break;
      }
      if (def->priority > max_priority || left.priority > left_max) break;
      if (right_max >= 0 && !is_term_start(peek(1))) break;  // no right operand follows
      take();
      if (right_max < 0) {  // postfix
        left = {make_compound(op_name, {left.term}), def->priority};
        continue;
      }
      Operand right = parse_expr(right_max);
      left = {make_compound(op_name, {left.term, right.term}), def->priority};
    }
    return left;
  }

  const std::vector<Token>& tokens_;
  OperatorTable& ops_;
  std::string file_;
  size_t pos_ = 0;
  std::unordered_map<std::string, uint64_t> var_ids_;
  std::vector<std::pair<std::string, uint64_t>> var_order_;
  uint64_t next_var_ = 0;
};

std::vector<TermPtr> pred_indicator_list(const TermPtr& t) {
  // Accepts f/2, (f/2, g/3) conjunctions, and [f/2, g/3] lists.
  std::vector<TermPtr> out;
  std::vector<TermPtr> work{t};
  while (!work.empty()) {
    TermPtr cur = work.back();
    work.pop_back();
    if (cur->is_compound() && cur->text == "," && cur->args.size() == 2) {
      work.push_back(cur->args[1]);
      work.push_back(cur->args[0]);
      continue;
    }
    if (is_list_cell(cur) || is_nil(cur)) {
      while (is_list_cell(cur)) {
        out.push_back(cur->args[0]);
        cur = cur->args[1];
      }
      continue;
    }
    out.push_back(cur);
  }
  return out;
}

OpType op_type_from_atom(const std::string& s, bool& ok) {
  ok = true;
  if (s == "xfx") return OpType::xfx;
  if (s == "xfy") return OpType::xfy;
  if (s == "yfx") return OpType::yfx;
  if (s == "fy") return OpType::fy;
  if (s == "fx") return OpType::fx;
  if (s == "xf") return OpType::xf;
  if (s == "yf") return OpType::yf;
  ok = false;
  return OpType::xfx;
}

void handle_directive(KnowledgeBase& kb, const TermPtr& goal, const ParseOptions& opts,
                      SourceSpan span) {
  if (goal->is_compound() && goal->text == "op" && goal->args.size() == 3) {
    const TermPtr& p = goal->args[0];
    const TermPtr& type = goal->args[1];
    if (p->tag != TermTag::Int || !type->is_atom()) {
      throw ParseError(span.file, SourcePos{span.line, 1}, "malformed op/3 directive");
    }
    bool ok = false;
    OpType ot = op_type_from_atom(type->text, ok);
    if (!ok) {
      throw ParseError(span.file, SourcePos{span.line, 1},
                       "unknown operator type '" + type->text + "'");
    }
    for (const TermPtr& name : pred_indicator_list(goal->args[2])) {
      if (!name->is_atom()) {
        throw ParseError(span.file, SourcePos{span.line, 1}, "operator name must be an atom");
      }
      kb.operators().add(name->text, static_cast<int>(p->ival), ot);
    }
    return;
  }
  if (goal->is_compound() && goal->text == "dynamic" && goal->args.size() == 1) {
    for (const TermPtr& pi : pred_indicator_list(goal->args[0])) {
      if (pi->is_compound() && pi->text == "/" && pi->args.size() == 2 &&
          pi->args[0]->is_atom() && pi->args[1]->tag == TermTag::Int) {
        kb.declare_dynamic(PredKey{pi->args[0]->text,
                                   static_cast<uint32_t>(pi->args[1]->ival)});
      } else {
        throw ParseError(span.file, SourcePos{span.line, 1},
                         "dynamic/1 expects name/arity indicators");
      }
    }
    return;
  }
  if (goal->is_compound() && goal->text == "discontiguous" && goal->args.size() == 1) {
    return;  // clause order is already source order; nothing to do
  }
  if (opts.collect_directives) {
    kb.add_directive(goal, std::move(span));
    return;
  }
  throw ParseError(span.file, SourcePos{span.line, 1},
                   "unsupported directive: " + pred_indicator(pred_key(*goal)));
}

}  // namespace

std::vector<TermPtr> flatten_conjunction(const TermPtr& t) {
  std::vector<TermPtr> out;
  std::vector<TermPtr> work{t};
  while (!work.empty()) {
    TermPtr cur = work.back();
    work.pop_back();
    if (cur->is_compound() && cur->text == "," && cur->args.size() == 2) {
      work.push_back(cur->args[1]);
      work.push_back(cur->args[0]);
      continue;
    }
    out.push_back(cur);
  }
  return out;
}

void parse_program_into(KnowledgeBase& kb, const std::string& text, const ParseOptions& opts) {
  std::vector<Token> tokens = tokenize(text, opts.file);
  Reader reader(tokens, kb.operators(), opts.file);
  while (!reader.at_eof()) {
    int line = reader.current_line();
    TermPtr t = reader.read_clause_term();
    SourceSpan span{opts.file, line};
    if (t->is_compound() && t->text == ":-" && t->args.size() == 1) {
      handle_directive(kb, t->args[0], opts, span);
      continue;
    }
    if (t->is_compound() && t->text == "-->" && t->args.size() == 2) {
      throw ParseError(opts.file, SourcePos{line, 1}, "DCG rules are not supported");
    }
    Clause clause;
    clause.num_vars = reader.num_vars();
    clause.span = span;
    if (t->is_compound() && t->text == ":-" && t->args.size() == 2) {
      clause.head = t->args[0];
      clause.body = flatten_conjunction(t->args[1]);
    } else {
      clause.head = t;
    }
    if (!clause.head->is_callable()) {
      throw ParseError(opts.file, SourcePos{line, 1}, "clause head must be callable");
    }
    kb.add_clause(std::move(clause));
  }
}

KnowledgeBase parse_program(const std::string& text, const ParseOptions& opts) {
  KnowledgeBase kb;
  parse_program_into(kb, text, opts);
  return kb;
}

ParsedQuery parse_query(const std::string& text, const OperatorTable& ops,
                        const std::string& file) {
  std::vector<Token> tokens = tokenize(text, file);
  OperatorTable local = ops;  // query text cannot mutate the program's table
  Reader reader(tokens, local, file);
  if (reader.at_eof()) throw ParseError(file, SourcePos{1, 1}, "empty query");
  ParsedQuery q;
  q.goal = reader.read_clause_term();
  q.num_vars = reader.num_vars();
  q.var_names = reader.var_order();
  if (!reader.at_eof()) {
    throw ParseError(file, SourcePos{reader.current_line(), 1},
                     "single query expected");
  }
  if (!q.goal->is_callable()) {
    throw ParseError(file, SourcePos{1, 1}, "query goal must be callable");
  }
  return q;
}

}  // namespace taxlogic::logic
