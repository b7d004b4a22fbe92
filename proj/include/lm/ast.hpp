#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "lm/error.hpp"
#include "lm/value.hpp"

namespace lm {

struct Term;
struct Formula;
using TermPtr = std::shared_ptr<const Term>;
using FormulaPtr = std::shared_ptr<const Formula>;

/// Whether an application head names a symbol or a (higher-order) variable.
enum class HeadKind { Symbol, Variable };

struct Term {
  enum class Kind { Literal, Symbol, Variable, Apply, Field };

  Kind kind = Kind::Literal;
  Value literal;           // Literal
  std::string name;        // Symbol / Variable / Apply head / Field name
  HeadKind head = HeadKind::Symbol;
  std::vector<TermPtr> args;  // Apply arguments; Field base in args[0]

  const Term& base() const { return *args.front(); }
  bool operator==(const Term& other) const;
};

struct Formula {
  enum class Kind { True, False, Atom, Not, And, Or, Implies };

  Kind kind = Kind::True;
  std::string head;  // Atom predicate
  HeadKind head_kind = HeadKind::Symbol;
  std::vector<TermPtr> args;          // Atom arguments
  std::vector<FormulaPtr> children;   // Not: 1, And/Or: >= 2, Implies: 2

  bool operator==(const Formula& other) const;
};

bool same(const TermPtr& a, const TermPtr& b);
bool same(const FormulaPtr& a, const FormulaPtr& b);

namespace ast {

TermPtr lit(Value value);
TermPtr sym(std::string name);
TermPtr var(std::string name);
TermPtr apply(std::string head, std::vector<TermPtr> args, HeadKind kind = HeadKind::Symbol);
TermPtr field(std::string name, TermPtr base);
/// `a.b.c` from the outermost field inwards, e.g. path_term({"diameter","tool"}, v1).
TermPtr field_chain(const std::vector<std::string>& outer_to_inner, TermPtr base);

FormulaPtr truth();
FormulaPtr falsity();
FormulaPtr atom(std::string head, std::vector<TermPtr> args, HeadKind kind = HeadKind::Symbol);
FormulaPtr eq(TermPtr a, TermPtr b);
FormulaPtr negate(FormulaPtr f);
/// n-ary connectives normalise: no children -> neutral constant, one child -> the child.
FormulaPtr conj(std::vector<FormulaPtr> children);
FormulaPtr disj(std::vector<FormulaPtr> children);
FormulaPtr implies(FormulaPtr premise, FormulaPtr conclusion);

}  // namespace ast

struct NamedFormula {
  std::string name;
  FormulaPtr formula;
  SourcePos pos;

  bool operator==(const NamedFormula& other) const {
    return name == other.name && same(formula, other.formula);
  }
};

void for_each_subterm(const Term& term, const std::function<void(const Term&)>& fn);
void for_each_term(const Formula& formula, const std::function<void(const Term&)>& fn);

/// Variable names occurring as terms or as application heads.
std::set<std::string> variables_of(const Formula& formula);
std::set<std::string> variables_of(const Term& term);
/// Symbol names occurring as objective terms, application heads or atom heads.
std::set<std::string> symbols_of(const Formula& formula);
std::set<std::string> symbols_of(const Term& term);

std::size_t node_count(const Term& term);
std::size_t node_count(const Formula& formula);

/// Replaces a variable by a value: term positions become literals, head positions
/// become symbol heads (the value must then be a symbol reference).
TermPtr substitute(const TermPtr& term, const std::string& variable, const Value& value);
FormulaPtr substitute(const FormulaPtr& formula, const std::string& variable, const Value& value);

/// Bottom-up term rewriting; `fn` sees each node after its children were rewritten.
TermPtr rewrite_terms(const TermPtr& term, const std::function<TermPtr(const TermPtr&)>& fn);
FormulaPtr rewrite_terms(const FormulaPtr& formula,
                         const std::function<TermPtr(const TermPtr&)>& fn);

}  // namespace lm
