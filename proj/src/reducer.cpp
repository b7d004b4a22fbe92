#include "lm/reducer.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lm/semantics.hpp"

namespace lm {

namespace {

class Expander {
 public:
  Expander(const LogicalModel& m, int level) : m_(m), level_(level) {}

  FormulaPtr run(const FormulaPtr& f, ReductionMapping& map) {
    map_ = &map;
    FormulaPtr out = expand_variables(f);
    out = inline_parameters(out);
    out = expand(out);
    std::sort(map.rows.begin(), map.rows.end());
    map.rows.erase(std::unique(map.rows.begin(), map.rows.end()), map.rows.end());
    return out;
  }

 private:
  bool top(const std::string& name) const {
    const Symbol* s = m_.symbol(name);
    return s && s->level == level_;
  }

  // Agreement is universal over substitutions, so an order-n variable becomes a conjunction.
  FormulaPtr expand_variables(const FormulaPtr& f) {
    for (const auto& v : variables_of(*f)) {
      const VariableDecl* d = m_.variable(v);
      if (!d || d->order != level_) continue;
      if (std::find(map_->expanded_variables.begin(), map_->expanded_variables.end(), v) ==
          map_->expanded_variables.end())
        map_->expanded_variables.push_back(v);
      std::vector<FormulaPtr> parts;
      for (const auto& value : d->values) parts.push_back(expand_variables(substitute(f, v, value)));
      return ast::conj(std::move(parts));
    }
    return f;
  }

  FormulaPtr inline_parameters(const FormulaPtr& f) {
    return rewrite_terms(f, [&](const TermPtr& t) -> TermPtr {
      if (t->kind != Term::Kind::Symbol || !top(t->name)) return t;
      const Value* v = m_.object(t->name);
      if (!v) throw Error(ErrorCode::NonTableInterpretation, "parameter '" + t->name + "' has no value");
      if (std::find(map_->inlined_parameters.begin(), map_->inlined_parameters.end(), t->name) ==
          map_->inlined_parameters.end())
        map_->inlined_parameters.push_back(t->name);
      return ast::lit(*v);
    });
  }

  FormulaPtr expand(const FormulaPtr& f) {
    switch (f->kind) {
      case Formula::Kind::True:
      case Formula::Kind::False:
        return f;
      case Formula::Kind::Atom:
        return expand_atom(f);
      case Formula::Kind::Not:
        return ast::negate(expand(f->children[0]));
      case Formula::Kind::Implies:
        return ast::implies(expand(f->children[0]), expand(f->children[1]));
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        std::vector<FormulaPtr> kids;
        for (const auto& c : f->children) kids.push_back(expand(c));
        // Keep the connective even when expansion produced a single child.
        auto out = std::make_shared<Formula>(*f);
        out->children = std::move(kids);
        return out;
      }
    }
    return f;
  }

  // First top-level application whose arguments contain no other top-level application.
  const Term* innermost(const Term& t) const {
    for (const auto& a : t.args)
      if (const Term* inner = innermost(*a)) return inner;
    if (t.kind == Term::Kind::Apply && t.head == HeadKind::Symbol && top(t.name)) return &t;
    return nullptr;
  }

  const FiniteTable& table(const std::string& name) const {
    const FiniteTable* t = m_.table(name);
    if (!t) throw Error(ErrorCode::NonTableInterpretation, "'" + name + "' has no table");
    return *t;
  }

  FormulaPtr expand_atom(const FormulaPtr& atom) {
    const Term* app = nullptr;
    for (const auto& a : atom->args)
      if ((app = innermost(*a))) break;
    if (app) {
      const Term pattern = *app;
      const FiniteTable& t = table(pattern.name);
      std::vector<FormulaPtr> branches;
      for (std::size_t i = 0; i < t.rows().size(); ++i) {
        const TableRow& row = t.rows()[i];
        map_->rows.emplace_back(pattern.name, i);
        std::vector<FormulaPtr> conds;
        for (std::size_t k = 0; k < row.args.size(); ++k) conds.push_back(ast::eq(pattern.args[k], ast::lit(row.args[k])));
        TermPtr result = ast::lit(*row.result);
        FormulaPtr replaced = rewrite_terms(atom, [&](const TermPtr& x) -> TermPtr {
          return *x == pattern ? result : x;
        });
        conds.push_back(expand_atom(replaced));
        branches.push_back(ast::conj(std::move(conds)));
      }
      return ast::disj(std::move(branches));
    }
    if (atom->head_kind == HeadKind::Symbol && top(atom->head)) {
      const FiniteTable& t = table(atom->head);
      std::vector<FormulaPtr> branches;
      for (std::size_t i = 0; i < t.rows().size(); ++i) {
        map_->rows.emplace_back(atom->head, i);
        std::vector<FormulaPtr> conds;
        for (std::size_t k = 0; k < t.rows()[i].args.size(); ++k)
          conds.push_back(ast::eq(atom->args[k], ast::lit(t.rows()[i].args[k])));
        branches.push_back(ast::conj(std::move(conds)));
      }
      return ast::disj(std::move(branches));
    }
    return atom;
  }

  const LogicalModel& m_;
  int level_;
  ReductionMapping* map_ = nullptr;
};

}  // namespace

std::pair<LogicalModel, ReductionReport> reduce_once(const LogicalModel& model) {
  const int n = model.order();
  if (n < 2)
    throw Error(ErrorCode::OrderTooLow, "model '" + model.name + "' is already of order " + std::to_string(n));

  ReductionReport report;
  report.input_order = n;
  for (const auto& s : model.signature.level(n)) report.eliminated.push_back(s.name);
  report.formulas_before = model.formulas.size();

  LogicalModel out = model;
  Expander ex(model, n);
  out.formulas.clear();
  for (const auto& nf : model.formulas) {
    report.nodes_before += node_count(*nf.formula);
    ReductionMapping map;
    map.output = nf.name;
    map.input = nf.name;
    FormulaPtr f = ex.run(nf.formula, map);
    report.nodes_after += node_count(*f);
    out.formulas.push_back(NamedFormula{nf.name, std::move(f), nf.pos});
    report.mapping.push_back(std::move(map));
  }

  std::vector<Symbol> decls;
  for (auto& s : model.signature.declarations())
    if (s.level != n) decls.push_back(std::move(s));
  out.signature = build_signature(std::move(decls));
  std::erase_if(out.facts, [&](const AlgebraicSystem& a) { return a.level == n; });
  std::erase_if(out.variables, [&](const VariableDecl& v) { return v.order == n; });
  report.output_order = out.order();
  report.formulas_after = out.formulas.size();
  validate_model(out);
  return {std::move(out), std::move(report)};
}

std::pair<LogicalModel, std::vector<ReductionReport>> reduce_to_first_order(const LogicalModel& model) {
  LogicalModel cur = model;
  std::vector<ReductionReport> chain;
  while (cur.order() > 1) {
    auto [next, report] = reduce_once(cur);
    cur = std::move(next);
    chain.push_back(std::move(report));
  }
  return {std::move(cur), std::move(chain)};
}

std::string report_text(const ReductionReport& r) {
  std::ostringstream os;
  os << "reduction: order " << r.input_order << " -> " << r.output_order << "\n";
  os << "eliminated:";
  for (const auto& s : r.eliminated) os << " " << s;
  os << "\nformulas: " << r.formulas_before << " -> " << r.formulas_after << "\n";
  os << "nodes: " << r.nodes_before << " -> " << r.nodes_after << "\n";
  for (const auto& m : r.mapping) {
    os << "formula " << m.output << " <- " << m.input << "\n";
    if (!m.expanded_variables.empty()) {
      os << "  expanded variables:";
      for (const auto& v : m.expanded_variables) os << " " << v;
      os << "\n";
    }
    if (!m.inlined_parameters.empty()) {
      os << "  inlined parameters:";
      for (const auto& p : m.inlined_parameters) os << " " << p;
      os << "\n";
    }
    if (!m.rows.empty()) {
      os << "  rows:";
      for (const auto& [t, i] : m.rows) os << " " << t << "#" << i;
      os << "\n";
    }
  }
  return os.str();
}

std::string report_json(const std::vector<ReductionReport>& chain) {
  nlohmann::ordered_json doc;
  doc["format"] = "lm-reduction-report";
  doc["version"] = 1;
  doc["steps"] = nlohmann::ordered_json::array();
  for (const auto& r : chain) {
    nlohmann::ordered_json step;
    step["input_order"] = r.input_order;
    step["output_order"] = r.output_order;
    step["eliminated"] = r.eliminated;
    step["formulas"] = {{"before", r.formulas_before}, {"after", r.formulas_after}};
    step["nodes"] = {{"before", r.nodes_before}, {"after", r.nodes_after}};
    step["mapping"] = nlohmann::ordered_json::array();
    for (const auto& m : r.mapping) {
      nlohmann::ordered_json e;
      e["output"] = m.output;
      e["input"] = m.input;
      e["rows"] = nlohmann::ordered_json::array();
      for (const auto& [t, i] : m.rows) e["rows"].push_back({{"table", t}, {"row", i}});
      e["inlined_parameters"] = m.inlined_parameters;
      e["expanded_variables"] = m.expanded_variables;
      step["mapping"].push_back(std::move(e));
    }
    doc["steps"].push_back(std::move(step));
  }
  return doc.dump(2) + "\n";
}

// ---- bounded equivalence ---------------------------------------------------------

namespace {

class CandidateEnumerator {
 public:
  CandidateEnumerator(const LogicalModel& m, std::uint64_t bound) : m_(m), bound_(bound) {}

  // Calls fn for every candidate whose universe is exactly `universe`.
  bool each(const std::vector<Value>& universe, const std::function<bool(const CandidateSystem&)>& fn) {
    universe_ = &universe;
    fn_ = &fn;
    objects_.clear();
    relations_.clear();
    return assign(0);
  }

  std::uint64_t count = 0;

 private:
  std::vector<Value> on_scale(const std::string& scale) const {
    std::vector<Value> out;
    for (const auto& v : *universe_)
      if (scale.empty() || m_.scales.conforms(v, scale)) out.push_back(v);
    return out;
  }

  bool assign(std::size_t i) {
    const auto& unknowns = m_.unknowns();
    if (i == unknowns.size()) {
      if (++count > bound_)
        throw Error(ErrorCode::BoundExceeded, "more than " + std::to_string(bound_) + " candidates");
      std::set<Value> extra(universe_->begin(), universe_->end());
      return (*fn_)(make_candidate(objects_, relations_, extra));
    }
    const Symbol& u = unknowns[i];
    if (u.kind == SymbolKind::Objective) {
      for (const auto& v : on_scale(u.result_scale)) {
        objects_[u.name] = v;
        if (!assign(i + 1)) return false;
      }
      objects_.erase(u.name);
      return true;
    }
    // Every table over the universe: tuples of conforming arguments, each absent or present
    // (predicate) or mapped to one conforming result (functional).
    std::vector<std::vector<Value>> tuples{{}};
    for (const auto& sc : u.arg_scales) {
      std::vector<std::vector<Value>> next;
      auto vals = on_scale(sc);
      for (const auto& t : tuples)
        for (const auto& v : vals) {
          next.push_back(t);
          next.back().push_back(v);
        }
      tuples = std::move(next);
    }
    std::vector<Value> results;
    if (u.kind == SymbolKind::Functional) results = on_scale(u.result_scale);
    const std::size_t choices = u.kind == SymbolKind::Functional ? results.size() + 1 : 2;
    std::vector<std::size_t> pick(tuples.size(), 0);
    for (;;) {
      std::vector<TableRow> rows;
      for (std::size_t k = 0; k < tuples.size(); ++k) {
        if (pick[k] == 0) continue;
        TableRow r{tuples[k], std::nullopt};
        if (u.kind == SymbolKind::Functional) r.result = results[pick[k] - 1];
        rows.push_back(std::move(r));
      }
      relations_[u.name] = make_table(u, std::move(rows), &m_.scales, m_.tolerance);
      if (!assign(i + 1)) return false;
      std::size_t k = 0;
      while (k < pick.size() && ++pick[k] == choices) pick[k++] = 0;
      if (k == pick.size()) break;
    }
    relations_.erase(u.name);
    return true;
  }

  const LogicalModel& m_;
  std::uint64_t bound_;
  const std::vector<Value>* universe_ = nullptr;
  const std::function<bool(const CandidateSystem&)>* fn_ = nullptr;
  std::map<std::string, Value> objects_;
  std::map<std::string, FiniteTable> relations_;
};

}  // namespace

EquivalenceVerdict check_equivalence(const LogicalModel& m1, const LogicalModel& m2,
                                     const std::vector<Value>& pool, std::uint64_t bound) {
  for (int level : {0, 1})
    if (m1.signature.level(level) != m2.signature.level(level))
      throw Error(ErrorCode::SignatureMismatch,
                  "the models differ at level " + std::to_string(level) + " of the signature");
  std::vector<Value> values(pool.begin(), pool.end());
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  if (values.size() >= 63) throw Error(ErrorCode::BoundExceeded, "value pool too large to enumerate");

  EquivalenceVerdict verdict;
  CandidateEnumerator en(m1, bound);
  const std::uint64_t subsets = std::uint64_t{1} << values.size();
  for (std::uint64_t mask = 1; mask < subsets && verdict.equivalent; ++mask) {
    std::vector<Value> universe;
    for (std::size_t i = 0; i < values.size(); ++i)
      if (mask >> i & 1) universe.push_back(values[i]);
    en.each(universe, [&](const CandidateSystem& c) {
      try {
        check_relevant(c, m1);
      } catch (const Error&) {
        return true;
      }
      bool a = is_solution(c, m1).solution;
      bool b = is_solution(c, m2).solution;
      if (a == b) return true;
      verdict.equivalent = false;
      verdict.counterexample = c;
      verdict.first_is_solution = a;
      return false;
    });
  }
  verdict.candidates = en.count;
  return verdict;
}

}  // namespace lm
