#include "lm/semantics.hpp"

#include <algorithm>
#include <array>
#include <numbers>

namespace lm {

namespace {

// Result slot of a term evaluation: borrows when the value already lives somewhere
// stable (model, candidate, substitution, literal), owns it otherwise. Never moved.
struct Slot {
  const Value* ref = nullptr;
  Value own;

  Slot() = default;
  Slot(const Slot&) = delete;
  Slot& operator=(const Slot&) = delete;

  void borrow(const Value* v) { ref = v; }
  void hold(Value v) {
    own = std::move(v);
    ref = &own;
  }
  explicit operator bool() const { return ref != nullptr; }
  const Value& operator*() const { return *ref; }
};

const Value& pi_value() {
  static const Value v{Number::decimal(std::numbers::pi)};
  return v;
}

class Evaluator {
 public:
  Evaluator(const LogicalModel& model, const CandidateSystem& candidate, const Substitution& subst,
            EvalCounters* counters)
      : m_(model), c_(candidate), s_(subst), k_(counters), tol_(model.tolerance) {}

  void term(const Term& t, Slot& out) {
    if (k_) ++k_->nodes;
    switch (t.kind) {
      case Term::Kind::Literal:
        out.borrow(&t.literal);
        return;
      case Term::Kind::Variable: {
        auto it = s_.find(t.name);
        if (it == s_.end())
          throw Error(ErrorCode::UnboundVariable, "variable '" + t.name + "' is not bound");
        out.borrow(&it->second);
        return;
      }
      case Term::Kind::Symbol:
        objective(t.name, out);
        return;
      case Term::Kind::Field: {
        Slot base;
        term(t.base(), base);
        if (!base || !(*base).is_composite()) return;
        const Value* f = (*base).as_composite().field(t.name);
        if (!f) return;
        if (base.ref == &base.own)
          out.hold(*f);
        else
          out.borrow(f);
        return;
      }
      case Term::Kind::Apply:
        apply(t, out);
        return;
    }
  }

  bool formula(const Formula& f) {
    if (k_) ++k_->nodes;
    switch (f.kind) {
      case Formula::Kind::True:
        return true;
      case Formula::Kind::False:
        return false;
      case Formula::Kind::Not:
        return !formula(*f.children[0]);
      case Formula::Kind::And:
        for (const auto& c : f.children)
          if (!formula(*c)) return false;
        return true;
      case Formula::Kind::Or:
        for (const auto& c : f.children)
          if (formula(*c)) return true;
        return false;
      case Formula::Kind::Implies:
        return !formula(*f.children[0]) || formula(*f.children[1]);
      case Formula::Kind::Atom:
        return atom(f);
    }
    return false;
  }

 private:
  void objective(const std::string& name, Slot& out) {
    if (name == "pi") {
      out.borrow(&pi_value());
      return;
    }
    const Symbol* s = m_.symbol(name);
    if (!s) throw Error(ErrorCode::UnknownSymbol, "unknown symbol '" + name + "'");
    if (s->level == 1) {
      auto it = c_.objects.find(name);
      if (it != c_.objects.end()) out.borrow(&it->second);
      return;
    }
    if (const Value* v = m_.object(name)) out.borrow(v);
  }

  std::string resolve_head(const std::string& name, HeadKind kind) {
    if (kind == HeadKind::Symbol) return name;
    auto it = s_.find(name);
    if (it == s_.end())
      throw Error(ErrorCode::UnboundVariable, "variable '" + name + "' is not bound");
    if (!it->second.is_symbol())
      throw Error(ErrorCode::LevelViolation,
                  "variable '" + name + "' used as a head is bound to " + to_text(it->second));
    return it->second.as_symbol();
  }

  const FiniteTable* table_for(const Symbol& s) {
    if (s.level == 1) {
      auto it = c_.relations.find(s.name);
      return it == c_.relations.end() ? nullptr : &it->second;
    }
    return m_.table(s.name);
  }

  void apply(const Term& t, Slot& out) {
    const std::string head = resolve_head(t.name, t.head);
    const std::size_t n = t.args.size();
    std::vector<Slot> args(n);
    for (std::size_t i = 0; i < n; ++i) {
      term(*t.args[i], args[i]);
      if (!args[i]) return;  // undefined is strict
    }
    const Symbol* s = m_.symbol(head);
    if (!s) throw Error(ErrorCode::UnknownSymbol, "unknown function '" + head + "'");
    if (s->builtin) {
      if (auto v = builtin_function(head, args)) out.hold(std::move(*v));
      return;
    }
    const FiniteTable* table = table_for(*s);
    if (!table) return;
    std::vector<const Value*> refs(n);
    for (std::size_t i = 0; i < n; ++i) refs[i] = args[i].ref;
    if (static_cast<int>(n) != table->arity()) return;
    const Value* r = table->lookup_refs(refs, tol_, k_ ? &k_->rows : nullptr);
    if (r) out.borrow(r);
  }

  std::optional<Value> builtin_function(const std::string& head, std::vector<Slot>& args) {
    auto num = [&](std::size_t i) -> const Number* {
      return (*args[i]).is_number() ? &(*args[i]).as_number() : nullptr;
    };
    auto wrap = [](std::optional<Number> n) -> std::optional<Value> {
      if (!n) return std::nullopt;
      return Value(std::move(*n));
    };
    if (args.size() == 2) {
      const Number* a = num(0);
      const Number* b = num(1);
      if (!a || !b) return std::nullopt;
      if (head == "plus") return wrap(add(*a, *b));
      if (head == "minus") return wrap(sub(*a, *b));
      if (head == "times") return wrap(mul(*a, *b));
      if (head == "div") return wrap(div(*a, *b));
      if (head == "min") return Value(a->compare(*b) <= 0 ? *a : *b);
      if (head == "max") return Value(a->compare(*b) >= 0 ? *a : *b);
      return std::nullopt;
    }
    if (args.size() == 1) {
      const Value& v = *args[0];
      if (head == "neg" && v.is_number()) return Value(v.as_number().negated());
      if (head == "abs" && v.is_number()) return Value(v.as_number().magnitude());
      if (!v.is_interval()) return std::nullopt;
      const Interval& iv = v.as_interval();
      if (head == "lower") return Value(iv.lo);
      if (head == "upper") return Value(iv.hi);
      if (head == "midpoint") {
        auto sum = add(iv.lo, iv.hi);
        if (!sum) return std::nullopt;
        return wrap(div(*sum, Number::integer(2)));
      }
    }
    return std::nullopt;
  }

  bool atom(const Formula& f) {
    const std::string head = resolve_head(f.head, f.head_kind);
    const std::size_t n = f.args.size();
    std::vector<Slot> args(n);
    for (std::size_t i = 0; i < n; ++i) {
      term(*f.args[i], args[i]);
      if (!args[i]) return false;
    }
    const Symbol* s = m_.symbol(head);
    if (!s) throw Error(ErrorCode::UnknownSymbol, "unknown predicate '" + head + "'");
    if (s->builtin) return builtin_predicate(head, args);
    const FiniteTable* table = table_for(*s);
    if (!table || static_cast<int>(n) != table->arity()) return false;
    std::vector<const Value*> refs(n);
    for (std::size_t i = 0; i < n; ++i) refs[i] = args[i].ref;
    return table->holds_refs(refs, tol_, k_ ? &k_->rows : nullptr);
  }

  bool builtin_predicate(const std::string& head, std::vector<Slot>& args) {
    if (args.size() != 2) return false;
    const Value& a = *args[0];
    const Value& b = *args[1];
    if (head == "eq") return semantic_equal(a, b, tol_);
    if (head == "member") {
      if (!a.is_number() || !b.is_interval()) return false;
      const Interval& iv = b.as_interval();
      return iv.lo.approx_less_equal(a.as_number(), tol_) &&
             a.as_number().approx_less_equal(iv.hi, tol_);
    }
    if (!a.is_number() || !b.is_number()) return false;
    const Number& x = a.as_number();
    const Number& y = b.as_number();
    if (head == "lt") return x.approx_less(y, tol_);
    if (head == "le") return x.approx_less_equal(y, tol_);
    if (head == "gt") return y.approx_less(x, tol_);
    if (head == "ge") return y.approx_less_equal(x, tol_);
    return false;
  }

  const LogicalModel& m_;
  const CandidateSystem& c_;
  const Substitution& s_;
  EvalCounters* k_;
  double tol_;
};

// Odometer over a product of value lists; calls fn until it returns false.
template <class Fn>
void for_each_substitution(const std::vector<std::pair<std::string, std::vector<Value>>>& axes,
                           Fn&& fn) {
  for (const auto& [_, values] : axes)
    if (values.empty()) return;
  std::vector<std::size_t> idx(axes.size(), 0);
  Substitution subst;
  for (std::size_t i = 0; i < axes.size(); ++i) subst[axes[i].first] = axes[i].second[0];
  for (;;) {
    if (!fn(subst)) return;
    std::size_t k = axes.size();
    while (k > 0) {
      --k;
      if (++idx[k] < axes[k].second.size()) {
        subst[axes[k].first] = axes[k].second[idx[k]];
        break;
      }
      idx[k] = 0;
      subst[axes[k].first] = axes[k].second[0];
      if (k == 0) return;
    }
    if (axes.empty()) return;
  }
}

std::vector<std::pair<std::string, std::vector<Value>>> axes_of(const Formula& formula,
                                                                const LogicalModel& model,
                                                                const CandidateSystem& candidate) {
  std::vector<std::pair<std::string, std::vector<Value>>> axes;
  for (const auto& name : variables_of(formula)) {  // std::set: sorted by name
    const VariableDecl* v = model.variable(name);
    if (!v) throw Error(ErrorCode::UnboundVariable, "undeclared variable '" + name + "'");
    axes.emplace_back(name, admissible_values(*v, model, candidate));
  }
  return axes;
}

}  // namespace

MaybeValue eval_term(const Term& term, const LogicalModel& model, const CandidateSystem& candidate,
                     const Substitution& subst, EvalCounters* counters) {
  Evaluator ev(model, candidate, subst, counters);
  Slot out;
  ev.term(term, out);
  if (!out) return std::nullopt;
  return *out;
}

bool eval_formula(const Formula& formula, const LogicalModel& model,
                  const CandidateSystem& candidate, const Substitution& subst,
                  EvalCounters* counters) {
  Evaluator ev(model, candidate, subst, counters);
  return ev.formula(formula);
}

std::vector<Value> admissible_values(const VariableDecl& v, const LogicalModel& model,
                                     const CandidateSystem& candidate) {
  if (v.order > 1) return v.values;
  std::vector<Value> out;
  for (const auto& value : candidate.universe) {
    bool in_range = v.scale ? model.scales.conforms(value, *v.scale)
                            : std::binary_search(v.values.begin(), v.values.end(), value);
    if (in_range) out.push_back(value);
  }
  return out;
}

std::vector<Substitution> relevant_substitutions(const Formula& formula, const LogicalModel& model,
                                                 const CandidateSystem& candidate) {
  std::vector<Substitution> out;
  for_each_substitution(axes_of(formula, model, candidate), [&](const Substitution& s) {
    out.push_back(s);
    return true;
  });
  return out;
}

Agreement in_agreement(const Formula& formula, const LogicalModel& model,
                       const CandidateSystem& candidate, EvalCounters* counters) {
  Agreement result;
  for_each_substitution(axes_of(formula, model, candidate), [&](const Substitution& s) {
    Evaluator ev(model, candidate, s, counters);
    if (ev.formula(formula)) return true;
    result.agrees = false;
    result.witness = s;
    return false;
  });
  return result;
}

void check_relevant(const CandidateSystem& candidate, const LogicalModel& model) {
  for (const auto& v : candidate.universe)
    if (!model.scales.in_base_universe(v))
      throw Error(ErrorCode::NotRelevant,
                  "universe element " + to_text(v) + " is not a value of any scale");
  for (const auto& [name, v] : candidate.objects)
    if (!candidate.universe.count(v))
      throw Error(ErrorCode::NotRelevant,
                  "value of '" + name + "' lies outside the candidate universe");
  for (const auto& [name, t] : candidate.relations)
    for (const auto& row : t.rows()) {
      for (const auto& a : row.args)
        if (!candidate.universe.count(a))
          throw Error(ErrorCode::NotRelevant,
                      "table of '" + name + "' uses " + to_text(a) + " outside the universe");
      if (row.result && !candidate.universe.count(*row.result))
        throw Error(ErrorCode::NotRelevant, "table of '" + name + "' uses " +
                                                to_text(*row.result) + " outside the universe");
    }
}

SolutionCheck check_formulas(const std::vector<NamedFormula>& formulas, const LogicalModel& model,
                             const CandidateSystem& candidate, EvalCounters* counters,
                             bool first_only) {
  SolutionCheck out;
  for (const auto& nf : formulas) {
    Agreement a = in_agreement(*nf.formula, model, candidate, counters);
    if (a.agrees) continue;
    out.solution = false;
    out.failures.push_back(FormulaFailure{nf.name, std::move(*a.witness)});
    if (first_only) break;
  }
  return out;
}

SolutionCheck is_solution(const CandidateSystem& candidate, const LogicalModel& model,
                          EvalCounters* counters) {
  check_relevant(candidate, model);
  return check_formulas(model.formulas, model, candidate, counters);
}

std::string to_text(const Substitution& subst) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, v] : subst) {
    if (!first) out += ", ";
    first = false;
    out += name + "/" + to_text(v);
  }
  return out + "}";
}

}  // namespace lm
