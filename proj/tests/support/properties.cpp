#include "properties.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "lm/error.hpp"
#include "lm/format.hpp"
#include "lm/parser.hpp"
#include "lm/reducer.hpp"
#include "lm/semantics.hpp"
#include "lm/solver.hpp"

namespace lmtest {

using namespace lm;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

Value conforming(Rng& rng, const RandomModel& m, const std::string& scale) {
  std::vector<Value> fits;
  for (const auto& v : m.pool)
    if (m.model.scales.conforms(v, scale)) fits.push_back(v);
  if (!fits.empty()) return fits[pick(rng, fits.size())];
  if (scale == "col") return Value::scalar(std::vector<std::string>{"cr", "cg", "cb"}[pick(rng, 3)]);
  return Value::integer(static_cast<long long>(pick(rng, 4)));
}

std::string describe(const RandomModel& m, const CandidateSystem& c) {
  std::ostringstream os;
  os << m.text << "-- candidate:";
  for (const auto& [k, v] : c.objects) os << " " << k << "=" << to_text(v);
  for (const auto& [k, t] : c.relations) os << " " << k << "=" << format_table_literal(t);
  return os.str();
}

std::set<std::string> failing(const SolutionCheck& s) {
  std::set<std::string> out;
  for (const auto& f : s.failures) out.insert(f.formula);
  return out;
}

ModelShape wide_shape(Rng& rng) {
  ModelShape s;
  s.structures = coin(rng, 0.3);
  s.relation_unknowns = coin(rng, 0.3);
  return s;
}

}  // namespace

CandidateSystem random_candidate(Rng& rng, const RandomModel& m) {
  std::map<std::string, Value> objects;
  std::map<std::string, FiniteTable> relations;
  for (const auto& u : m.model.unknowns()) {
    if (u.kind == SymbolKind::Objective) {
      if (u.result_scale == "pt") {
        objects[u.name] = parse_value("pt { a: " + to_text(conforming(rng, m, "num")) +
                                          ", c: " + to_text(conforming(rng, m, "col")) + " }",
                                      m.model);
      } else {
        objects[u.name] = conforming(rng, m, u.result_scale);
      }
    } else {
      std::vector<TableRow> rows;
      for (std::size_t i = pick(rng, 3); i > 0; --i) rows.push_back(TableRow{{conforming(rng, m, "num")}, {}});
      relations[u.name] = make_table(u, std::move(rows), &m.model.scales, m.model.tolerance);
    }
  }
  std::set<Value> extra;
  for (const auto& v : m.pool)
    if (coin(rng, 0.4)) extra.insert(v);
  return make_candidate(std::move(objects), std::move(relations), extra);
}

PropertyResult prop_reduction_equivalence(std::uint64_t seed, std::size_t models) {
  PropertyResult r{"reduction equivalence"};
  Timer t;
  Rng rng(seed);
  std::uint64_t candidates = 0;
  while (r.checked < models) {
    RandomModel m = random_model(rng);
    auto [reduced, report] = reduce_once(m.model);
    if (reduced.order() != 1) {
      r.fail("reduced model has order " + std::to_string(reduced.order()) + "\n" + m.text);
      ++r.checked;
      continue;
    }
    EquivalenceVerdict v = check_equivalence(m.model, reduced, m.pool, 1000000);
    candidates += v.candidates;
    if (!v.equivalent) {
      std::string why = "not equivalent\n" + m.text + "-- reduced:\n" + format(reduced);
      if (v.counterexample) why += "\n" + describe(m, *v.counterexample);
      r.fail(why);
    }
    // The reduced source must itself be a re-parsable document.
    if (!(parse_model(format(reduced)) == reduced)) r.fail("reduced model does not re-parse\n" + format(reduced));
    ++r.checked;
  }
  r.compared = candidates;
  r.seconds = t.seconds();
  return r;
}

PropertyResult prop_solver_oracle(std::uint64_t seed, std::size_t instances) {
  PropertyResult r{"solver oracle"};
  Timer t;
  Rng rng(seed);
  std::size_t attempts = 0;
  while (r.checked < instances && attempts < instances * 20) {
    ++attempts;
    RandomModel m = random_model(rng, wide_shape(rng));
    const std::string text = random_task_text(rng, m);
    TaskSpec task;
    try {
      task = parse_task(text, m.model);
    } catch (const Error& e) {
      r.fail(std::string("generated task rejected: ") + e.what() + "\n" + m.text + text);
      continue;
    }
    TaskResult oracle;
    try {
      oracle = brute_force_solve(m.model, task, 200);
    } catch (const Error& e) {
      // Over the candidate cap: not an instance. Other errors must be raised by solve too.
      ++r.skipped;
      if (e.code() == ErrorCode::BoundExceeded) continue;
      try {
        solve(m.model, task);
        r.fail(std::string("oracle raised ") + e.what() + " but solve did not\n" + m.text + text);
      } catch (const Error& e2) {
        if (e2.code() != e.code()) r.fail(std::string("different errors: ") + e.what() + " / " + e2.what());
      }
      continue;
    }
    SolveConfig cfg;
    cfg.workers = 1 + static_cast<unsigned>(r.checked % 3);
    TaskResult got;
    try {
      got = solve(m.model, task, cfg);
    } catch (const Error& e) {
      r.fail(std::string("solve threw ") + e.what() + "\n" + m.text + text);
      ++r.checked;
      continue;
    }
    if (!got.same_answer(oracle)) {
      std::ostringstream os;
      os << "solve/brute_force differ: " << got.solutions.size() << " vs " << oracle.solutions.size() << " ("
         << to_string(got.status) << " vs " << to_string(oracle.status) << ")\n"
         << m.text << text;
      r.fail(os.str());
    }
    ++r.checked;
  }
  r.seconds = t.seconds();
  return r;
}

PropertyResult prop_vacuous_agreement(std::uint64_t seed, std::size_t n) {
  PropertyResult r{"vacuous agreement"};
  Timer t;
  Rng rng(seed);
  while (r.checked < n) {
    RandomModel m = random_model(rng);
    if (!m.col_unknowns.empty()) continue;
    // w ranges over col, and no col value is in this universe.
    std::map<std::string, Value> objects;
    for (const auto& u : m.num_unknowns) objects[u] = conforming(rng, m, "num");
    std::set<Value> extra;
    for (const auto& v : m.pool)
      if (v.is_number()) extra.insert(v);
    CandidateSystem c = make_candidate(std::move(objects), {}, extra);
    const auto& nf = m.model.formulas[pick(rng, m.model.formulas.size())];
    FormulaPtr tagged = ast::conj({nf.formula, ast::eq(ast::var("w"), ast::var("w"))});
    for (const FormulaPtr& f : {tagged, ast::negate(tagged)}) {
      if (!relevant_substitutions(*f, m.model, c).empty()) r.fail("w has values\n" + describe(m, c));
      if (!in_agreement(*f, m.model, c).agrees) r.fail("no vacuous agreement for " + format(f) + "\n" + describe(m, c));
    }
    ++r.checked;
  }
  r.seconds = t.seconds();
  return r;
}

PropertyResult prop_phi_monotonicity(std::uint64_t seed, std::size_t n) {
  PropertyResult r{"phi monotonicity"};
  Timer t;
  Rng rng(seed);
  while (r.checked < n) {
    RandomModel m = random_model(rng, wide_shape(rng));
    CandidateSystem c = random_candidate(rng, m);
    // Solution under Φ ∪ {φ} implies solution under Φ, for each prefix of Φ.
    bool previous = true;
    LogicalModel sub = m.model;
    for (std::size_t k = 0; k <= m.model.formulas.size(); ++k) {
      sub.formulas.assign(m.model.formulas.begin(), m.model.formulas.begin() + static_cast<std::ptrdiff_t>(k));
      const bool now = is_solution(c, sub).solution;
      if (now && !previous) r.fail("adding a formula created a solution\n" + describe(m, c));
      previous = now;
    }
    ++r.checked;
  }
  r.seconds = t.seconds();
  return r;
}

namespace {

// Shuffles table rows within each table block and the order of formula declarations.
std::string permute_text(Rng& rng, const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  std::vector<std::size_t> formula_slots;
  std::vector<std::string> formulas;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (lines[i].rfind("formula ", 0) == 0) {
      formula_slots.push_back(i);
      formulas.push_back(lines[i]);
    }
    if (lines[i].rfind("table ", 0) == 0) {
      std::size_t j = i + 1;
      while (j < lines.size() && lines[j].rfind("  (", 0) == 0) ++j;
      std::shuffle(lines.begin() + static_cast<std::ptrdiff_t>(i + 1), lines.begin() + static_cast<std::ptrdiff_t>(j), rng);
      i = j - 1;
    }
  }
  std::shuffle(formulas.begin(), formulas.end(), rng);
  for (std::size_t k = 0; k < formula_slots.size(); ++k) lines[formula_slots[k]] = formulas[k];
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace

PropertyResult prop_permutation_invariance(std::uint64_t seed, std::size_t n) {
  PropertyResult r{"permutation invariance"};
  Timer t;
  Rng rng(seed);
  while (r.checked < n) {
    RandomModel m = random_model(rng, wide_shape(rng));
    const std::string permuted_text = permute_text(rng, m.text);
    LogicalModel p = parse_model(permuted_text);
    for (int k = 0; k < 5; ++k) {
      CandidateSystem c = random_candidate(rng, m);
      SolutionCheck a = is_solution(c, m.model), b = is_solution(c, p);
      if (a.solution != b.solution || failing(a) != failing(b))
        r.fail("verdict changed under permutation\n" + describe(m, c) + "\n-- permuted:\n" + permuted_text);
    }
    const std::string task_text = random_task_text(rng, m);
    try {
      TaskSpec t1 = parse_task(task_text, m.model), t2 = parse_task(task_text, p);
      TaskResult a = solve(m.model, t1), b = solve(p, t2);
      if (!a.same_answer(b)) r.fail("task answer changed under permutation\n" + m.text + task_text);
    } catch (const Error&) {
      ++r.skipped;
    }
    ++r.checked;
  }
  r.seconds = t.seconds();
  return r;
}

PropertyResult prop_undefined_propagation(std::uint64_t seed, std::size_t n) {
  PropertyResult r{"undefined propagation"};
  Timer t;
  Rng rng(seed);
  while (r.checked < n) {
    RandomModel m = random_model(rng);
    const Symbol* fn = nullptr;
    for (const auto& s : m.model.signature.level(2))
      if (s.kind == SymbolKind::Functional && s.arg_scales == std::vector<std::string>{"num"} && s.result_scale == "num")
        fn = &s;
    if (!fn) continue;
    CandidateSystem c = random_candidate(rng, m);
    // No generated table has the key 7.
    TermPtr u = ast::apply(fn->name, {ast::lit(Value::integer(7))});
    for (int depth = pick(rng, 4); depth > 0; --depth) {
      TermPtr other = coin(rng) ? ast::lit(m.pool.front()) : ast::sym(m.num_unknowns.front());
      switch (pick(rng, 4)) {
        case 0: u = ast::apply("plus", coin(rng) ? std::vector<TermPtr>{u, other} : std::vector<TermPtr>{other, u}); break;
        case 1: u = ast::apply("times", {other, u}); break;
        case 2: u = ast::apply("neg", {u}); break;
        default: u = ast::apply(fn->name, {u}); break;
      }
    }
    if (eval_term(*u, m.model, c)) r.fail("defined: " + format(u) + "\n" + describe(m, c));
    TermPtr other = ast::sym(m.num_unknowns.front());
    for (const char* head : {"eq", "lt", "le", "gt", "ge"}) {
      FormulaPtr a = ast::atom(head, {u, other}), b = ast::atom(head, {other, u});
      if (eval_formula(*a, m.model, c) || eval_formula(*b, m.model, c))
        r.fail("atom with undefined argument held: " + format(a));
      if (!eval_formula(*ast::negate(a), m.model, c)) r.fail("negation of undefined atom failed: " + format(a));
    }
    if (eval_formula(*ast::eq(u, u), m.model, c)) r.fail("undefined = undefined held: " + format(u));
    ++r.checked;
  }
  r.seconds = t.seconds();
  return r;
}

PropertyResult prop_parse_format_identity(std::uint64_t seed, std::size_t n) {
  PropertyResult r{"parse/format identity"};
  Timer t;
  Rng rng(seed);
  const LogicalModel& vocab = ast_vocabulary();
  for (std::size_t i = 0; i < n; ++i) {
    const bool formula = i % 4 != 3;
    std::string text;
    try {
      if (formula) {
        FormulaPtr f = random_formula_ast(rng, vocab, 1 + static_cast<int>(pick(rng, 4)));
        text = format(f);
        FormulaPtr back = parse_formula(text, vocab);
        if (!same(f, back)) r.fail("formula changed: " + text + "  ->  " + format(back));
      } else {
        TermPtr x = random_term_ast(rng, vocab, 1 + static_cast<int>(pick(rng, 4)));
        text = format(x);
        TermPtr back = parse_term(text, vocab);
        if (!same(x, back)) r.fail("term changed: " + text + "  ->  " + format(back));
      }
    } catch (const Error& e) {
      r.fail(std::string("did not re-parse: ") + text + "  (" + e.what() + ")");
    }
    ++r.checked;
  }
  r.seconds = t.seconds();
  return r;
}

}  // namespace lmtest
