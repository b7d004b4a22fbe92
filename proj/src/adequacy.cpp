#include "lm/adequacy.hpp"

#include <algorithm>
#include <map>
#include <random>
#include <sstream>

#include <nlohmann/json.hpp>

#include "lm/format.hpp"

namespace lm {

SituationVerdict check_situation(const LogicalModel& model, const Situation& situation) {
  check_relevant(situation.system, model);
  SolutionCheck c = is_solution(situation.system, model);
  SituationVerdict v;
  v.name = situation.name;
  v.expected = situation.expected;
  v.consistent = c.solution;
  v.failures = std::move(c.failures);
  return v;
}

AdequacyReport validate_corpus(const LogicalModel& model, const std::vector<Situation>& corpus) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "the corpus contains no situations");
  AdequacyReport r;
  for (const auto& s : corpus) r.situations.push_back(check_situation(model, s));
  std::stable_sort(r.situations.begin(), r.situations.end(),
                   [](const SituationVerdict& a, const SituationVerdict& b) { return a.name < b.name; });
  for (const auto& v : r.situations) {
    (v.consistent ? r.consistent : r.violations)++;
    const bool adequate = v.expected == Situation::Expectation::Adequate;
    if (adequate && !v.consistent) r.adequate_violations++;
    if (!adequate && v.consistent) r.violating_consistent++;
  }
  r.model_adequate = r.adequate_violations == 0;
  return r;
}

std::string report_text(const AdequacyReport& r) {
  std::ostringstream os;
  for (const auto& v : r.situations) {
    os << v.name << " [" << to_string(v.expected) << "]: " << (v.consistent ? "consistent" : "violation");
    if (!v.as_expected()) os << " (unexpected)";
    os << "\n";
    for (const auto& f : v.failures) {
      os << "  fails " << f.formula;
      if (!f.witness.empty()) os << " at " << to_text(f.witness);
      os << "\n";
    }
  }
  os << "situations: " << r.situations.size() << ", consistent: " << r.consistent
     << ", violations: " << r.violations << "\n";
  os << "adequate-labelled violations: " << r.adequate_violations
     << ", violating-labelled consistent: " << r.violating_consistent << "\n";
  os << "model adequate: " << (r.model_adequate ? "yes" : "no") << "\n";
  return os.str();
}

std::string report_json(const AdequacyReport& r) {
  nlohmann::ordered_json doc;
  doc["format"] = "lm-adequacy-report";
  doc["version"] = 1;
  doc["model_adequate"] = r.model_adequate;
  doc["summary"] = {{"situations", r.situations.size()},
                    {"consistent", r.consistent},
                    {"violations", r.violations},
                    {"adequate_violations", r.adequate_violations},
                    {"violating_consistent", r.violating_consistent}};
  doc["situations"] = nlohmann::ordered_json::array();
  for (const auto& v : r.situations) {
    nlohmann::ordered_json s;
    s["name"] = v.name;
    s["expected"] = std::string(to_string(v.expected));
    s["verdict"] = v.consistent ? "consistent" : "violation";
    s["failures"] = nlohmann::ordered_json::array();
    for (const auto& f : v.failures) {
      nlohmann::ordered_json w = nlohmann::ordered_json::object();
      for (const auto& [name, value] : f.witness) w[name] = to_text(value);
      s["failures"].push_back({{"formula", f.formula}, {"witness", std::move(w)}});
    }
    doc["situations"].push_back(std::move(s));
  }
  return doc.dump(2) + "\n";
}

// ---- test generation ------------------------------------------------------------

namespace {

using LeafKey = std::pair<std::string, FieldPath>;

struct PathRef {
  std::string unknown;
  FieldPath path;
};

std::optional<PathRef> path_of(const Term& t, const LogicalModel& m) {
  if (t.kind == Term::Kind::Symbol) {
    const Symbol* s = m.symbol(t.name);
    if (s && s->level == 1 && s->kind == SymbolKind::Objective) return PathRef{t.name, {}};
    return std::nullopt;
  }
  if (t.kind == Term::Kind::Field) {
    auto base = path_of(t.base(), m);
    if (base) base->path.push_back(t.name);
    return base;
  }
  return std::nullopt;
}

// Outermost field paths a term reads; `op` inside `feed.op` is not a read of all of op.
void read_paths(const Term& t, const LogicalModel& m, std::vector<PathRef>& out) {
  if (auto p = path_of(t, m)) {
    out.push_back(std::move(*p));
    return;
  }
  for (const auto& a : t.args) read_paths(*a, m, out);
}

bool is_prefix(const FieldPath& a, const FieldPath& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

bool used_as_head(const Formula& f, const std::string& v) {
  if (f.kind == Formula::Kind::Atom && f.head_kind == HeadKind::Variable && f.head == v) return true;
  bool found = false;
  for_each_term(f, [&](const Term& t) {
    found |= t.kind == Term::Kind::Apply && t.head == HeadKind::Variable && t.name == v;
  });
  for (const auto& c : f.children) found |= used_as_head(*c, v);
  return found;
}

void flatten_and(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (f->kind == Formula::Kind::And) {
    for (const auto& c : f->children) flatten_and(c, out);
  } else {
    out.push_back(f);
  }
}

class Generator {
 public:
  Generator(const LogicalModel& m, std::uint64_t seed) : m_(m), rng_(seed) {
    for (const auto& u : m.unknowns()) {
      if (u.kind != SymbolKind::Objective) continue;
      objective_.push_back(&u);
      for (const auto& p : m.scales.leaf_paths(u.result_scale)) leaves_.emplace_back(u.name, p);
    }
    for (const auto& nf : m.formulas) {
      std::vector<FormulaPtr> parts;
      instantiate(nf.formula, parts);
      for (const auto& p : parts) flatten_and(p, conjuncts_);
    }
    for (const auto& c : conjuncts_) collect(*c);
  }

  GeneratedTests run(std::size_t count) {
    GeneratedTests out;
    const std::size_t max_drafts = count * 20 + 100;
    for (std::size_t draft = 0; draft < max_drafts && out.adequate < count; ++draft) {
      auto pins = make_draft();
      if (!pins) {
        out.underdetermined++;
        continue;
      }
      Situation s;
      s.name = name(out.adequate + 1);
      s.system = build(*pins);
      if (!check_situation(m_, s).consistent) {
        out.inconsistent++;
        continue;
      }
      out.situations.push_back(s);
      out.adequate++;
      if (auto mutant = mutate(s, *pins)) {
        out.situations.push_back(std::move(*mutant));
        out.mutants++;
      } else {
        out.unmutated++;
      }
    }
    return out;
  }

 private:
  struct Site {
    std::string table;
    std::vector<TermPtr> args;
  };

  std::size_t pick(std::size_t n) { return static_cast<std::size_t>(rng_() % n); }

  static std::string name(std::size_t i) {
    std::string n = std::to_string(i);
    return "gen_" + std::string(n.size() < 4 ? 4 - n.size() : 0, '0') + n;
  }

  // Order-1 variables become the unknowns of their scale; order >= 2 variables are expanded.
  void instantiate(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
    auto vars = variables_of(*f);
    if (vars.empty()) {
      out.push_back(f);
      return;
    }
    const std::string& v = *vars.begin();
    const VariableDecl* d = m_.variable(v);
    if (!d) return;
    if (d->order >= 2) {
      for (const auto& value : d->values) instantiate(substitute(f, v, value), out);
      return;
    }
    if (!d->scale || used_as_head(*f, v)) return;
    for (const Symbol* u : objective_) {
      if (u->result_scale != *d->scale) continue;
      instantiate(rewrite_terms(f, [&](const TermPtr& t) -> TermPtr {
                    return t->kind == Term::Kind::Variable && t->name == v ? ast::sym(u->name) : t;
                  }),
                  out);
    }
  }

  void collect(const Formula& f) {
    for (const auto& c : f.children) collect(*c);
    if (f.kind != Formula::Kind::Atom) return;
    for_each_term(f, [&](const Term& t) {
      if (t.kind == Term::Kind::Apply && t.head == HeadKind::Symbol && m_.table(t.name))
        sites_.push_back(Site{t.name, t.args});
    });
    if (f.head_kind == HeadKind::Symbol && m_.table(f.head)) sites_.push_back(Site{f.head, f.args});
    std::vector<PathRef> reads;
    for (const auto& a : f.args) read_paths(*a, m_, reads);
    for (const auto& p : reads)
      for (const auto& key : leaves_)
        if (key.first == p.unknown && (is_prefix(p.path, key.second) || is_prefix(key.second, p.path)))
          mentioned_.insert(key);
  }

  CandidateSystem partial(const std::map<LeafKey, Value>& pins) const {
    std::map<std::string, Value> objects;
    for (const Symbol* u : objective_) objects[u->name] = skeleton(u->result_scale);
    for (const auto& [key, v] : pins) objects[key.first] = with_value_at(objects[key.first], key.second, v);
    return make_candidate(std::move(objects));
  }

  Value skeleton(const std::string& scale) const {
    const Scale& s = m_.scales.get(scale);
    if (s.kind != Scale::Kind::Structural) return Value::integer(0);
    std::vector<std::string> names;
    std::vector<Value> values;
    for (const auto& [field, sub] : s.fields) {
      names.push_back(field);
      values.push_back(skeleton(sub));
    }
    return Value::composite(s.name, std::move(names), std::move(values));
  }

  // True when every leaf the term reads is pinned.
  bool ready(const Term& t, const std::map<LeafKey, Value>& pins) const {
    std::vector<PathRef> reads;
    read_paths(t, m_, reads);
    for (const auto& p : reads)
      for (const auto& key : leaves_)
        if (key.first == p.unknown && (is_prefix(p.path, key.second) || is_prefix(key.second, p.path)) &&
            !pins.count(key))
          return false;
    return true;
  }

  void pin_path(const PathRef& p, const Value& v, std::map<LeafKey, Value>& pins) const {
    for (const auto& key : leaves_) {
      if (key.first != p.unknown || !is_prefix(p.path, key.second)) continue;
      const Value* sub = value_at(v, FieldPath(key.second.begin() + static_cast<std::ptrdiff_t>(p.path.size()),
                                                key.second.end()));
      if (sub && !pins.count(key)) pins[key] = *sub;
    }
  }

  std::optional<std::map<LeafKey, Value>> make_draft() {
    std::map<LeafKey, Value> pins;
    const double tol = m_.tolerance;
    for (const auto& site : sites_) {
      const FiniteTable& t = *m_.table(site.table);
      CandidateSystem cur = partial(pins);
      std::vector<std::size_t> rows;
      for (std::size_t r = 0; r < t.rows().size(); ++r) {
        bool fits = true;
        for (std::size_t k = 0; k < site.args.size() && fits; ++k) {
          if (!ready(*site.args[k], pins)) continue;
          auto v = eval_term(*site.args[k], m_, cur);
          fits = v && semantic_equal(*v, t.rows()[r].args[k], tol);
        }
        if (fits) rows.push_back(r);
      }
      if (rows.empty()) return std::nullopt;
      const TableRow& row = t.rows()[rows[pick(rows.size())]];
      for (std::size_t k = 0; k < site.args.size(); ++k)
        if (auto p = path_of(*site.args[k], m_)) pin_path(*p, row.args[k], pins);
    }
    // Directed equalities and interval memberships, until nothing changes.
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& c : conjuncts_) {
        if (c->kind != Formula::Kind::Atom || c->head_kind != HeadKind::Symbol || c->args.size() != 2) continue;
        for (int side : {0, 1}) {
          if (c->head == "member" && side == 1) break;
          if (c->head != "eq" && c->head != "member") break;
          auto p = path_of(*c->args[side], m_);
          const Term& src = *c->args[1 - side];
          if (!p || ready(*c->args[side], pins) || !ready(src, pins)) continue;
          auto v = eval_term(src, m_, partial(pins));
          if (!v) continue;
          const std::size_t before = pins.size();
          if (c->head == "member") {
            if (!v->is_interval()) continue;
            const Interval& iv = v->as_interval();
            auto mid = div(*add(iv.lo, iv.hi), Number::integer(2));
            const Number choices[] = {iv.lo, *mid, iv.hi};
            pin_path(*p, Value(choices[pick(3)]), pins);
          } else {
            pin_path(*p, *v, pins);
          }
          changed |= pins.size() != before;
        }
      }
    }
    for (const auto& key : leaves_) {
      if (pins.count(key)) continue;
      if (mentioned_.count(key)) return std::nullopt;
      const Scale* s = m_.scales.scale_at(scale_of(key.first), key.second);
      if (s && s->kind == Scale::Kind::Scalar) {
        pins[key] = Value::scalar(s->scalars[pick(s->scalars.size())]);
      } else if (s && (s->kind == Scale::Kind::Dimensional || s->kind == Scale::Kind::Integer)) {
        pins[key] = Value::integer(static_cast<long long>(pick(10)));
      } else {
        return std::nullopt;
      }
    }
    return pins;
  }

  const std::string& scale_of(const std::string& unknown) const { return m_.symbol(unknown)->result_scale; }

  CandidateSystem build(const std::map<LeafKey, Value>& pins) const {
    CandidateSystem c = partial(pins);
    std::map<std::string, FiniteTable> relations;
    for (const auto& u : m_.unknowns())
      if (u.kind != SymbolKind::Objective) relations[u.name] = make_table(u, {}, &m_.scales, m_.tolerance);
    return make_candidate(c.objects, std::move(relations));
  }

  std::optional<Situation> mutate(const Situation& s, const std::map<LeafKey, Value>& pins) {
    std::vector<LeafKey> order(leaves_.begin(), leaves_.end());
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[pick(i)]);
    for (const auto& key : order) {
      const Value& v = pins.at(key);
      std::optional<Value> changed;
      if (v.is_number()) {
        changed = Value(*add(v.as_number(), Number::integer(1)));
      } else if (v.is_scalar()) {
        const Scale* sc = m_.scales.scale_at(scale_of(key.first), key.second);
        if (sc && sc->kind == Scale::Kind::Scalar && sc->scalars.size() > 1) {
          auto it = std::find(sc->scalars.begin(), sc->scalars.end(), v.as_scalar());
          std::size_t i = it == sc->scalars.end() ? 0 : static_cast<std::size_t>(it - sc->scalars.begin());
          changed = Value::scalar(sc->scalars[(i + 1) % sc->scalars.size()]);
        }
      }
      if (!changed) continue;
      auto mpins = pins;
      mpins[key] = *changed;
      Situation m;
      m.name = s.name + "_mutant";
      m.expected = Situation::Expectation::Violating;
      m.system = build(mpins);
      if (!check_situation(m_, m).consistent) return m;
    }
    return std::nullopt;
  }

  const LogicalModel& m_;
  std::mt19937_64 rng_;
  std::vector<const Symbol*> objective_;
  std::vector<LeafKey> leaves_;
  std::vector<FormulaPtr> conjuncts_;
  std::vector<Site> sites_;
  std::set<LeafKey> mentioned_;
};

}  // namespace

GeneratedTests generate_tests(const LogicalModel& model, std::size_t count, std::uint64_t seed) {
  bool facts = false;
  for (const auto& a : model.facts) facts |= !a.tables.empty();
  if (!facts) throw Error(ErrorCode::NoFacts, "model '" + model.name + "' has no fact tables to sample");
  return Generator(model, seed).run(count);
}

}  // namespace lm
