#include "lm/model.hpp"

#include <algorithm>

namespace lm {

const VariableDecl* LogicalModel::variable(const std::string& name) const {
  for (const auto& v : variables)
    if (v.name == name) return &v;
  return nullptr;
}

const AlgebraicSystem* LogicalModel::fact_system(int level) const {
  for (const auto& a : facts)
    if (a.level == level) return &a;
  return nullptr;
}

const FiniteTable* LogicalModel::table(const std::string& name) const {
  const Symbol* s = signature.find(name);
  if (!s || s->level < 2) return nullptr;
  const AlgebraicSystem* a = fact_system(s->level);
  if (!a) return nullptr;
  auto it = a->tables.find(name);
  return it == a->tables.end() ? nullptr : &it->second;
}

const Value* LogicalModel::object(const std::string& name) const {
  if (auto it = constants.find(name); it != constants.end()) return &it->second;
  const Symbol* s = signature.find(name);
  if (!s || s->level < 2) return nullptr;
  const AlgebraicSystem* a = fact_system(s->level);
  if (!a) return nullptr;
  auto it = a->objects.find(name);
  return it == a->objects.end() ? nullptr : &it->second;
}

const NamedFormula* LogicalModel::formula(const std::string& name) const {
  for (const auto& f : formulas)
    if (f.name == name) return &f;
  return nullptr;
}

bool LogicalModel::operator==(const LogicalModel& other) const {
  return name == other.name && signature == other.signature && scales == other.scales &&
         constants == other.constants && facts == other.facts && formulas == other.formulas &&
         variables == other.variables && tolerance == other.tolerance;
}

bool TaskSpec::operator==(const TaskSpec& other) const {
  if (name != other.name || !(delta == other.delta) || !(psi == other.psi) ||
      !(domains == other.domains) || outputs.size() != other.outputs.size())
    return false;
  for (std::size_t i = 0; i < outputs.size(); ++i)
    if (!same(outputs[i], other.outputs[i])) return false;
  return true;
}

std::optional<std::string> infer_scale(const Term& term, const LogicalModel& model) {
  switch (term.kind) {
    case Term::Kind::Literal:
      if (term.literal.is_composite()) return term.literal.as_composite().structure;
      return std::nullopt;
    case Term::Kind::Symbol: {
      const Symbol* s = model.symbol(term.name);
      if (s && s->kind == SymbolKind::Objective && !s->result_scale.empty()) return s->result_scale;
      return std::nullopt;
    }
    case Term::Kind::Variable: {
      const VariableDecl* v = model.variable(term.name);
      if (v && v->order == 1 && v->scale) return v->scale;
      return std::nullopt;
    }
    case Term::Kind::Apply: {
      if (term.head != HeadKind::Symbol) return std::nullopt;
      const Symbol* s = model.symbol(term.name);
      if (s && s->kind == SymbolKind::Functional && !s->result_scale.empty())
        return s->result_scale;
      return std::nullopt;
    }
    case Term::Kind::Field: {
      auto base = infer_scale(term.base(), model);
      if (!base) return std::nullopt;
      const Scale* s = model.scales.scale_at(*base, {term.name});
      if (!s) return std::nullopt;
      return s->name;
    }
  }
  return std::nullopt;
}

int formula_order(const Formula& formula, const LogicalModel& model) {
  int order = 0;
  for (const auto& name : symbols_of(formula))
    if (const Symbol* s = model.symbol(name)) order = std::max(order, s->level);
  for (const auto& name : variables_of(formula))
    if (const VariableDecl* v = model.variable(name)) order = std::max(order, v->order);
  return order;
}

namespace {

std::string quote(const std::string& s) { return "'" + s + "'"; }

void check_variable_head(const std::string& name, std::size_t arity, SymbolKind want,
                         const LogicalModel& model, const SourcePos& pos) {
  const VariableDecl* v = model.variable(name);
  if (!v) throw Error(ErrorCode::UnknownSymbol, "undeclared variable " + quote(name), pos);
  if (v->order < 2)
    throw Error(ErrorCode::LevelViolation,
                "first-order variable " + quote(name) + " cannot be applied", pos);
  for (const auto& value : v->values) {
    if (!value.is_symbol())
      throw Error(ErrorCode::LevelViolation,
                  "variable " + quote(name) + " is applied but its range holds " + to_text(value),
                  pos);
    const Symbol* s = model.symbol(value.as_symbol());
    if (!s) throw Error(ErrorCode::UnknownSymbol, "unknown symbol " + to_text(value), pos);
    if (s->kind != want || s->arity_or_zero() != static_cast<int>(arity))
      throw Error(ErrorCode::ArityMismatch,
                  "range element " + to_text(value) + " of " + quote(name) + " is not a " +
                      std::string(to_string(want)) + " symbol of arity " + std::to_string(arity),
                  pos);
  }
}

void check_term(const Term& term, const LogicalModel& model, const SourcePos& pos) {
  switch (term.kind) {
    case Term::Kind::Literal:
      if (term.literal.is_scalar() && !model.scales.is_scalar_name(term.literal.as_scalar()))
        throw Error(ErrorCode::UnknownSymbol, "unknown name " + quote(term.literal.as_scalar()),
                    pos);
      return;
    case Term::Kind::Symbol: {
      const Symbol* s = model.symbol(term.name);
      if (!s) throw Error(ErrorCode::UnknownSymbol, "unknown symbol " + quote(term.name), pos);
      if (s->kind != SymbolKind::Objective)
        throw Error(ErrorCode::ArityMismatch,
                    std::string(to_string(s->kind)) + " symbol " + quote(term.name) +
                        " used without arguments",
                    pos);
      return;
    }
    case Term::Kind::Variable:
      if (!model.variable(term.name))
        throw Error(ErrorCode::UnknownSymbol, "undeclared variable " + quote(term.name), pos);
      return;
    case Term::Kind::Apply: {
      for (const auto& a : term.args) check_term(*a, model, pos);
      if (term.head == HeadKind::Variable) {
        check_variable_head(term.name, term.args.size(), SymbolKind::Functional, model, pos);
        return;
      }
      const Symbol* s = model.symbol(term.name);
      if (!s) throw Error(ErrorCode::UnknownSymbol, "unknown symbol " + quote(term.name), pos);
      if (s->kind != SymbolKind::Functional)
        throw Error(ErrorCode::ArityMismatch,
                    quote(term.name) + " is not a functional symbol", pos);
      if (s->arity_or_zero() != static_cast<int>(term.args.size()))
        throw Error(ErrorCode::ArityMismatch,
                    quote(term.name) + " expects " + std::to_string(s->arity_or_zero()) +
                        " arguments, got " + std::to_string(term.args.size()),
                    pos);
      return;
    }
    case Term::Kind::Field: {
      check_term(term.base(), model, pos);
      auto base = infer_scale(term.base(), model);
      if (!base) return;
      const Scale* s = model.scales.find(*base);
      if (!s || s->kind != Scale::Kind::Structural)
        throw Error(ErrorCode::UnknownField,
                    "field " + quote(term.name) + " applied to a term of scale " + quote(*base),
                    pos);
      if (!model.scales.scale_at(*base, {term.name}))
        throw Error(ErrorCode::UnknownField,
                    "structure " + quote(*base) + " has no field " + quote(term.name), pos);
      return;
    }
  }
}

void check_formula(const Formula& f, const LogicalModel& model, const SourcePos& pos) {
  if (f.kind == Formula::Kind::Atom) {
    for (const auto& a : f.args) check_term(*a, model, pos);
    if (f.head_kind == HeadKind::Variable) {
      check_variable_head(f.head, f.args.size(), SymbolKind::Predicate, model, pos);
      return;
    }
    const Symbol* s = model.symbol(f.head);
    if (!s) throw Error(ErrorCode::UnknownSymbol, "unknown predicate " + quote(f.head), pos);
    if (s->kind != SymbolKind::Predicate)
      throw Error(ErrorCode::ArityMismatch, quote(f.head) + " is not a predicate symbol", pos);
    if (s->arity_or_zero() != static_cast<int>(f.args.size()))
      throw Error(ErrorCode::ArityMismatch,
                  quote(f.head) + " expects " + std::to_string(s->arity_or_zero()) +
                      " arguments, got " + std::to_string(f.args.size()),
                  pos);
    return;
  }
  for (const auto& c : f.children) check_formula(*c, model, pos);
}

void check_first_order(const Formula* f, const Term* t, const LogicalModel& model,
                       ErrorCode code, const std::string& what, const SourcePos& pos) {
  std::set<std::string> syms = f ? symbols_of(*f) : symbols_of(*t);
  std::set<std::string> vars = f ? variables_of(*f) : variables_of(*t);
  for (const auto& name : syms)
    if (const Symbol* s = model.symbol(name); s && s->level >= 2)
      throw Error(code, what + " uses level-" + std::to_string(s->level) + " symbol " + quote(name),
                  pos);
  for (const auto& name : vars)
    if (const VariableDecl* v = model.variable(name); v && v->order >= 2)
      throw Error(code, what + " uses order-" + std::to_string(v->order) + " variable " +
                            quote(name),
                  pos);
}

}  // namespace

void validate_model(const LogicalModel& model) {
  model.scales.validate();
  const int n = model.order();

  for (const auto& sym : model.signature.declarations()) {
    for (const auto& sc : sym.arg_scales)
      if (!sc.empty() && !model.scales.contains(sc))
        throw Error(ErrorCode::UnknownScale, "symbol " + quote(sym.name) + " uses unknown scale " +
                                                 quote(sc));
    if (!sym.result_scale.empty() && !model.scales.contains(sym.result_scale))
      throw Error(ErrorCode::UnknownScale,
                  "symbol " + quote(sym.name) + " uses unknown scale " + quote(sym.result_scale));
    if (model.scales.is_scalar_name(sym.name))
      throw Error(ErrorCode::DuplicateSymbol,
                  "symbol " + quote(sym.name) + " is also a scalar scale value");
    if (sym.builtin) continue;
    if (sym.level == 0) {
      if (sym.kind != SymbolKind::Objective)
        throw Error(ErrorCode::LevelViolation,
                    "user symbol " + quote(sym.name) + " at level 0 must be a constant");
      if (!model.constants.count(sym.name))
        throw Error(ErrorCode::NonTableInterpretation, "constant " + quote(sym.name) + " has no value");
    } else if (sym.level >= 2) {
      const AlgebraicSystem* a = model.fact_system(sym.level);
      bool ok = a && (sym.kind == SymbolKind::Objective ? a->objects.count(sym.name) > 0
                                                        : a->tables.count(sym.name) > 0);
      if (!ok)
        throw Error(ErrorCode::NonTableInterpretation,
                    "level-" + std::to_string(sym.level) + " symbol " + quote(sym.name) +
                        " has no interpretation");
    }
  }
  for (const auto& a : model.facts) {
    for (const auto& [name, table] : a.tables) {
      const Symbol* s = model.symbol(name);
      if (!s || s->level != a.level)
        throw Error(ErrorCode::UnknownSymbol, "table for undeclared level-" +
                                                  std::to_string(a.level) + " symbol " + quote(name));
    }
    for (const auto& [name, value] : a.objects) {
      const Symbol* s = model.symbol(name);
      if (!s || s->level != a.level || s->kind != SymbolKind::Objective)
        throw Error(ErrorCode::UnknownSymbol, "value for undeclared parameter " + quote(name));
      if (!s->result_scale.empty() && !model.scales.conforms(value, s->result_scale))
        throw Error(ErrorCode::ScaleMismatch, "parameter " + quote(name) + " value " +
                                                  to_text(value) + " is not on scale " +
                                                  quote(s->result_scale));
    }
  }
  for (const auto& [name, value] : model.constants) {
    const Symbol* s = model.symbol(name);
    if (!s || s->level != 0)
      throw Error(ErrorCode::UnknownSymbol, "value for undeclared constant " + quote(name));
    if (!s->result_scale.empty() && !model.scales.conforms(value, s->result_scale))
      throw Error(ErrorCode::ScaleMismatch, "constant " + quote(name) + " value " +
                                                to_text(value) + " is not on scale " +
                                                quote(s->result_scale));
  }

  std::set<std::string> seen;
  for (const auto& v : model.variables) {
    if (!seen.insert(v.name).second || model.symbol(v.name) || model.scales.is_scalar_name(v.name))
      throw Error(ErrorCode::DuplicateSymbol, "variable " + quote(v.name) + " clashes with another name");
    if (v.order < 1 || v.order > n)
      throw Error(ErrorCode::LevelViolation, "variable " + quote(v.name) + " has order " +
                                                 std::to_string(v.order) + " in a model of order " +
                                                 std::to_string(n));
    if (v.order == 1) {
      if (v.scale && !model.scales.contains(*v.scale))
        throw Error(ErrorCode::UnknownScale, "variable " + quote(v.name) + " ranges over unknown scale " +
                                                 quote(*v.scale));
      for (const auto& value : v.values)
        if (value.is_symbol())
          throw Error(ErrorCode::LevelViolation,
                      "first-order variable " + quote(v.name) + " cannot range over symbols");
    } else {
      if (v.scale || v.values.empty())
        throw Error(ErrorCode::LevelViolation, "order-" + std::to_string(v.order) + " variable " +
                                                   quote(v.name) + " needs a non-empty explicit range");
      for (const auto& value : v.values) {
        if (!value.is_symbol()) continue;
        const Symbol* s = model.symbol(value.as_symbol());
        if (!s) throw Error(ErrorCode::UnknownSymbol, "variable " + quote(v.name) +
                                                          " ranges over unknown symbol " +
                                                          to_text(value));
        if (s->level >= v.order)
          throw Error(ErrorCode::LevelViolation,
                      "order-" + std::to_string(v.order) + " variable " + quote(v.name) +
                          " cannot range over level-" + std::to_string(s->level) + " symbol " +
                          to_text(value));
      }
    }
  }

  seen.clear();
  for (const auto& nf : model.formulas) {
    if (!seen.insert(nf.name).second)
      throw Error(ErrorCode::DuplicateSymbol, "formula " + quote(nf.name) + " declared twice", nf.pos);
    check_formula(*nf.formula, model, nf.pos);
  }
}

void validate_task(const TaskSpec& task, const LogicalModel& model) {
  std::set<std::string> seen;
  for (const auto& d : task.delta) {
    if (!seen.insert(d.name).second)
      throw Error(ErrorCode::DuplicateSymbol, "input formula " + quote(d.name) + " declared twice",
                  d.pos);
    check_formula(*d.formula, model, d.pos);
    check_first_order(d.formula.get(), nullptr, model, ErrorCode::SecondOrderInDelta,
                      "input formula " + quote(d.name), d.pos);
    bool has_unknown = false;
    for (const auto& name : symbols_of(*d.formula))
      if (const Symbol* s = model.symbol(name); s && s->level == 1) has_unknown = true;
    if (!has_unknown)
      throw Error(ErrorCode::DeltaWithoutUnknown,
                  "input formula " + quote(d.name) + " mentions no unknown", d.pos);
  }
  if (task.outputs.empty()) throw Error(ErrorCode::EmptyOutput, "task has no output terms");
  for (const auto& t : task.outputs) {
    check_term(*t, model, {});
    check_first_order(nullptr, t.get(), model, ErrorCode::LevelViolation, "output term", {});
  }
  if (task.psi.condition) {
    check_formula(*task.psi.condition, model, {});
    check_first_order(task.psi.condition.get(), nullptr, model, ErrorCode::LevelViolation,
                      "optimisation criterion", {});
  }
  if (task.psi.objective) {
    check_term(*task.psi.objective, model, {});
    check_first_order(nullptr, task.psi.objective.get(), model, ErrorCode::LevelViolation,
                      "optimisation objective", {});
  }
  for (const auto& d : task.domains) {
    const Symbol* s = model.symbol(d.unknown);
    if (!s || s->level != 1)
      throw Error(ErrorCode::UnknownSymbol, "domain annotation names " + quote(d.unknown) +
                                                ", which is not an unknown");
    if (s->kind == SymbolKind::Objective) {
      if (!d.tables.empty())
        throw Error(ErrorCode::ScaleMismatch, "objective unknown " + quote(d.unknown) +
                                                  " cannot range over tables");
      const Scale* at = model.scales.scale_at(s->result_scale, d.path);
      if (!at)
        throw Error(ErrorCode::UnknownField, "unknown " + quote(d.unknown) + " has no such field");
      for (const auto& v : d.values)
        if (!model.scales.conforms(v, at->name))
          throw Error(ErrorCode::ScaleMismatch, "domain value " + to_text(v) +
                                                    " is not on scale " + quote(at->name));
    } else {
      if (!d.values.empty() || !d.path.empty())
        throw Error(ErrorCode::ScaleMismatch, "relation unknown " + quote(d.unknown) +
                                                  " ranges over tables");
    }
  }
}

std::strong_ordering CandidateSystem::operator<=>(const CandidateSystem& other) const {
  if (auto c = std::lexicographical_compare_three_way(objects.begin(), objects.end(),
                                                      other.objects.begin(), other.objects.end());
      c != 0)
    return c;
  auto rel_cmp = [](const auto& a, const auto& b) -> std::strong_ordering {
    if (auto c = a.first <=> b.first; c != 0) return c;
    return std::lexicographical_compare_three_way(a.second.rows().begin(), a.second.rows().end(),
                                                  b.second.rows().begin(), b.second.rows().end());
  };
  if (auto c = std::lexicographical_compare_three_way(relations.begin(), relations.end(),
                                                      other.relations.begin(),
                                                      other.relations.end(), rel_cmp);
      c != 0)
    return c;
  return std::lexicographical_compare_three_way(universe.begin(), universe.end(),
                                                other.universe.begin(), other.universe.end());
}

CandidateSystem make_candidate(std::map<std::string, Value> objects,
                               std::map<std::string, FiniteTable> relations,
                               const std::set<Value>& extra) {
  CandidateSystem c;
  c.universe = extra;
  for (const auto& [_, v] : objects) c.universe.insert(v);
  for (const auto& [_, t] : relations)
    for (const auto& row : t.rows()) {
      c.universe.insert(row.args.begin(), row.args.end());
      if (row.result) c.universe.insert(*row.result);
    }
  c.objects = std::move(objects);
  c.relations = std::move(relations);
  return c;
}

std::string_view to_string(Situation::Expectation e) {
  return e == Situation::Expectation::Adequate ? "adequate" : "violating";
}

}  // namespace lm
