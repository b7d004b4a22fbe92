#include "lm/ast.hpp"

namespace lm {

bool same(const TermPtr& a, const TermPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

bool same(const FormulaPtr& a, const FormulaPtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

namespace {

template <class Ptr>
bool same_list(const std::vector<Ptr>& a, const std::vector<Ptr>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!same(a[i], b[i])) return false;
  return true;
}

}  // namespace

bool Term::operator==(const Term& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::Literal:
      return literal == other.literal;
    case Kind::Symbol:
    case Kind::Variable:
      return name == other.name;
    case Kind::Apply:
      return name == other.name && head == other.head && same_list(args, other.args);
    case Kind::Field:
      return name == other.name && same_list(args, other.args);
  }
  return false;
}

bool Formula::operator==(const Formula& other) const {
  if (kind != other.kind) return false;
  switch (kind) {
    case Kind::True:
    case Kind::False:
      return true;
    case Kind::Atom:
      return head == other.head && head_kind == other.head_kind && same_list(args, other.args);
    default:
      return same_list(children, other.children);
  }
}

namespace ast {

TermPtr lit(Value value) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Literal;
  t->literal = std::move(value);
  return t;
}

TermPtr sym(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Symbol;
  t->name = std::move(name);
  return t;
}

TermPtr var(std::string name) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Variable;
  t->name = std::move(name);
  return t;
}

TermPtr apply(std::string head, std::vector<TermPtr> args, HeadKind kind) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Apply;
  t->name = std::move(head);
  t->head = kind;
  t->args = std::move(args);
  return t;
}

TermPtr field(std::string name, TermPtr base) {
  auto t = std::make_shared<Term>();
  t->kind = Term::Kind::Field;
  t->name = std::move(name);
  t->args.push_back(std::move(base));
  return t;
}

TermPtr field_chain(const std::vector<std::string>& outer_to_inner, TermPtr base) {
  for (auto it = outer_to_inner.rbegin(); it != outer_to_inner.rend(); ++it)
    base = field(*it, std::move(base));
  return base;
}

FormulaPtr truth() {
  static const FormulaPtr t = [] {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::True;
    return f;
  }();
  return t;
}

FormulaPtr falsity() {
  static const FormulaPtr t = [] {
    auto f = std::make_shared<Formula>();
    f->kind = Formula::Kind::False;
    return f;
  }();
  return t;
}

FormulaPtr atom(std::string head, std::vector<TermPtr> args, HeadKind kind) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Atom;
  f->head = std::move(head);
  f->head_kind = kind;
  f->args = std::move(args);
  return f;
}

FormulaPtr eq(TermPtr a, TermPtr b) { return atom("eq", {std::move(a), std::move(b)}); }

FormulaPtr negate(FormulaPtr child) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Not;
  f->children.push_back(std::move(child));
  return f;
}

namespace {

FormulaPtr nary(Formula::Kind kind, std::vector<FormulaPtr> children, FormulaPtr empty) {
  if (children.empty()) return empty;
  if (children.size() == 1) return std::move(children.front());
  auto f = std::make_shared<Formula>();
  f->kind = kind;
  f->children = std::move(children);
  return f;
}

}  // namespace

FormulaPtr conj(std::vector<FormulaPtr> children) {
  return nary(Formula::Kind::And, std::move(children), truth());
}

FormulaPtr disj(std::vector<FormulaPtr> children) {
  return nary(Formula::Kind::Or, std::move(children), falsity());
}

FormulaPtr implies(FormulaPtr premise, FormulaPtr conclusion) {
  auto f = std::make_shared<Formula>();
  f->kind = Formula::Kind::Implies;
  f->children = {std::move(premise), std::move(conclusion)};
  return f;
}

}  // namespace ast

void for_each_subterm(const Term& term, const std::function<void(const Term&)>& fn) {
  fn(term);
  for (const auto& a : term.args) for_each_subterm(*a, fn);
}

void for_each_term(const Formula& formula, const std::function<void(const Term&)>& fn) {
  for (const auto& a : formula.args) for_each_subterm(*a, fn);
  for (const auto& c : formula.children) for_each_term(*c, fn);
}

namespace {

void collect_vars(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Variable) out.insert(t.name);
  if (t.kind == Term::Kind::Apply && t.head == HeadKind::Variable) out.insert(t.name);
}

void collect_syms(const Term& t, std::set<std::string>& out) {
  if (t.kind == Term::Kind::Symbol) out.insert(t.name);
  if (t.kind == Term::Kind::Apply && t.head == HeadKind::Symbol) out.insert(t.name);
}

void atoms_heads(const Formula& f, std::set<std::string>& vars, std::set<std::string>& syms) {
  if (f.kind == Formula::Kind::Atom)
    (f.head_kind == HeadKind::Variable ? vars : syms).insert(f.head);
  for (const auto& c : f.children) atoms_heads(*c, vars, syms);
}

}  // namespace

std::set<std::string> variables_of(const Formula& formula) {
  std::set<std::string> out, ignored;
  for_each_term(formula, [&](const Term& t) { collect_vars(t, out); });
  atoms_heads(formula, out, ignored);
  return out;
}

std::set<std::string> variables_of(const Term& term) {
  std::set<std::string> out;
  for_each_subterm(term, [&](const Term& t) { collect_vars(t, out); });
  return out;
}

std::set<std::string> symbols_of(const Formula& formula) {
  std::set<std::string> out, ignored;
  for_each_term(formula, [&](const Term& t) { collect_syms(t, out); });
  atoms_heads(formula, ignored, out);
  return out;
}

std::set<std::string> symbols_of(const Term& term) {
  std::set<std::string> out;
  for_each_subterm(term, [&](const Term& t) { collect_syms(t, out); });
  return out;
}

std::size_t node_count(const Term& term) {
  std::size_t n = 1;
  for (const auto& a : term.args) n += node_count(*a);
  return n;
}

std::size_t node_count(const Formula& formula) {
  std::size_t n = 1;
  for (const auto& a : formula.args) n += node_count(*a);
  for (const auto& c : formula.children) n += node_count(*c);
  return n;
}

TermPtr rewrite_terms(const TermPtr& term, const std::function<TermPtr(const TermPtr&)>& fn) {
  if (term->args.empty()) return fn(term);
  std::vector<TermPtr> args;
  args.reserve(term->args.size());
  bool changed = false;
  for (const auto& a : term->args) {
    args.push_back(rewrite_terms(a, fn));
    changed |= args.back() != a;
  }
  if (!changed) return fn(term);
  auto copy = std::make_shared<Term>(*term);
  copy->args = std::move(args);
  return fn(copy);
}

FormulaPtr rewrite_terms(const FormulaPtr& formula,
                         const std::function<TermPtr(const TermPtr&)>& fn) {
  bool changed = false;
  std::vector<TermPtr> args;
  for (const auto& a : formula->args) {
    args.push_back(rewrite_terms(a, fn));
    changed |= args.back() != a;
  }
  std::vector<FormulaPtr> children;
  for (const auto& c : formula->children) {
    children.push_back(rewrite_terms(c, fn));
    changed |= children.back() != c;
  }
  if (!changed) return formula;
  auto copy = std::make_shared<Formula>(*formula);
  copy->args = std::move(args);
  copy->children = std::move(children);
  return copy;
}

TermPtr substitute(const TermPtr& term, const std::string& variable, const Value& value) {
  return rewrite_terms(term, [&](const TermPtr& t) -> TermPtr {
    if (t->kind == Term::Kind::Variable && t->name == variable) return ast::lit(value);
    if (t->kind == Term::Kind::Apply && t->head == HeadKind::Variable && t->name == variable) {
      if (!value.is_symbol())
        throw Error(ErrorCode::LevelViolation,
                    "variable '" + variable + "' used as a head is bound to " + to_text(value));
      return ast::apply(value.as_symbol(), t->args, HeadKind::Symbol);
    }
    return t;
  });
}

FormulaPtr substitute(const FormulaPtr& formula, const std::string& variable, const Value& value) {
  FormulaPtr out = rewrite_terms(formula, [&](const TermPtr& t) -> TermPtr {
    if (t->kind == Term::Kind::Variable && t->name == variable) return ast::lit(value);
    if (t->kind == Term::Kind::Apply && t->head == HeadKind::Variable && t->name == variable) {
      if (!value.is_symbol())
        throw Error(ErrorCode::LevelViolation,
                    "variable '" + variable + "' used as a head is bound to " + to_text(value));
      return ast::apply(value.as_symbol(), t->args, HeadKind::Symbol);
    }
    return t;
  });
  // Atom heads.
  std::function<FormulaPtr(const FormulaPtr&)> heads = [&](const FormulaPtr& f) -> FormulaPtr {
    if (f->kind == Formula::Kind::Atom) {
      if (f->head_kind == HeadKind::Variable && f->head == variable) {
        if (!value.is_symbol())
          throw Error(ErrorCode::LevelViolation,
                      "variable '" + variable + "' used as a head is bound to " + to_text(value));
        return ast::atom(value.as_symbol(), f->args, HeadKind::Symbol);
      }
      return f;
    }
    if (f->children.empty()) return f;
    std::vector<FormulaPtr> children;
    bool changed = false;
    for (const auto& c : f->children) {
      children.push_back(heads(c));
      changed |= children.back() != c;
    }
    if (!changed) return f;
    auto copy = std::make_shared<Formula>(*f);
    copy->children = std::move(children);
    return copy;
  };
  return heads(out);
}

}  // namespace lm
