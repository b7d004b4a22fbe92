#include "lm/solver.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <mutex>
#include <set>
#include <thread>

#include "lm/format.hpp"

namespace lm {

namespace {

using Clock = std::chrono::steady_clock;

struct PathRef {
  std::string unknown;
  FieldPath path;
};

// Objective-unknown path addressed by `u`, `f.u`, `g.f.u`.
std::optional<PathRef> path_of(const Term& t, const LogicalModel& m) {
  if (t.kind == Term::Kind::Symbol) {
    const Symbol* s = m.symbol(t.name);
    if (s && s->level == 1 && s->kind == SymbolKind::Objective) return PathRef{t.name, {}};
    return std::nullopt;
  }
  if (t.kind == Term::Kind::Field) {
    auto base = path_of(t.base(), m);
    if (!base) return std::nullopt;
    base->path.push_back(t.name);
    return base;
  }
  return std::nullopt;
}

bool is_prefix(const FieldPath& a, const FieldPath& b) {
  return a.size() <= b.size() && std::equal(a.begin(), a.end(), b.begin());
}

void flatten_and(const FormulaPtr& f, std::vector<FormulaPtr>& out) {
  if (f->kind == Formula::Kind::And) {
    for (const auto& c : f->children) flatten_and(c, out);
  } else if (f->kind != Formula::Kind::True) {
    out.push_back(f);
  }
}

bool may_overlap(const ScaleSystem& ss, const std::string& a, const std::string& b) {
  if (a == b) return true;
  const Scale* x = ss.find(a);
  const Scale* y = ss.find(b);
  if (!x || !y) return true;
  auto numeric = [](const Scale* s) {
    return s->kind == Scale::Kind::Dimensional || s->kind == Scale::Kind::Integer;
  };
  if (numeric(x) && numeric(y)) return true;
  if (x->kind == Scale::Kind::Scalar && y->kind == Scale::Kind::Scalar) {
    for (const auto& n : x->scalars)
      if (std::find(y->scalars.begin(), y->scalars.end(), n) != y->scalars.end()) return true;
    return false;
  }
  if (x->kind == Scale::Kind::IntervalOf && y->kind == Scale::Kind::IntervalOf)
    return ss.interval_unit(*x) == ss.interval_unit(*y);
  if (x->kind == Scale::Kind::Symbol && y->kind == Scale::Kind::Symbol) return true;
  return false;
}

FormulaPtr replace_variable(const FormulaPtr& f, const std::string& var, const TermPtr& with) {
  return rewrite_terms(f, [&](const TermPtr& t) -> TermPtr {
    if (t->kind == Term::Kind::Variable && t->name == var) return with;
    return t;
  });
}

// Φt conjuncts with variables removed where the admissible set is known statically.
class Eliminator {
 public:
  Eliminator(const LogicalModel& m, std::vector<NamedFormula>& out, std::vector<NamedFormula>& residual)
      : m_(m), out_(out), residual_(residual) {
    for (const auto& u : m.unknowns()) {
      if (u.kind == SymbolKind::Objective)
        objective_.push_back(&u);
      else
        relations_ = true;
    }
  }

  void add(const NamedFormula& nf) { process(nf.name, nf.formula, nf.pos); }

 private:
  // Variables are quantified over the whole formula, so conjuncts are only split once
  // none remain: with an empty range even a variable-free conjunct holds vacuously.
  void process(const std::string& name, const FormulaPtr& f, const SourcePos& pos) {
    auto vars = variables_of(*f);
    if (vars.empty()) {
      std::vector<FormulaPtr> parts;
      flatten_and(f, parts);
      for (const auto& p : parts) out_.push_back(NamedFormula{name, p, pos});
      return;
    }
    for (const auto& v : vars) {
      const VariableDecl* d = m_.variable(v);
      if (d && d->order >= 2) {
        for (const auto& value : d->values) process(name, substitute(f, v, value), pos);
        return;
      }
    }
    const std::string& v = *vars.begin();
    const VariableDecl* d = m_.variable(v);
    if (relations_ || !d || !d->scale || used_as_head(*f, v)) {
      residual_.push_back(NamedFormula{name, f, pos});
      return;
    }
    std::vector<const Symbol*> exact;
    for (const Symbol* u : objective_) {
      if (u->result_scale == *d->scale) {
        exact.push_back(u);
      } else if (may_overlap(m_.scales, u->result_scale, *d->scale)) {
        residual_.push_back(NamedFormula{name, f, pos});
        return;
      }
    }
    for (const Symbol* u : exact) process(name, replace_variable(f, v, ast::sym(u->name)), pos);
  }

  static bool used_as_head(const Formula& f, const std::string& v) {
    if (f.kind == Formula::Kind::Atom && f.head_kind == HeadKind::Variable && f.head == v) return true;
    bool found = false;
    for (const auto& a : f.args)
      for_each_subterm(*a, [&](const Term& t) {
        found |= t.kind == Term::Kind::Apply && t.head == HeadKind::Variable && t.name == v;
      });
    for (const auto& c : f.children) found |= used_as_head(*c, v);
    return found;
  }

  const LogicalModel& m_;
  std::vector<NamedFormula>& out_;
  std::vector<NamedFormula>& residual_;
  std::vector<const Symbol*> objective_;
  bool relations_ = false;
};

Value skeleton(const ScaleSystem& ss, const std::string& scale) {
  const Scale& s = ss.get(scale);
  if (s.kind != Scale::Kind::Structural) return Value::integer(0);
  std::vector<std::string> names;
  std::vector<Value> values;
  for (const auto& [field, sub] : s.fields) {
    names.push_back(field);
    values.push_back(skeleton(ss, sub));
  }
  return Value::composite(s.name, std::move(names), std::move(values));
}

void intersect(std::optional<std::vector<Value>>& acc, std::vector<Value> add, double tol) {
  std::sort(add.begin(), add.end());
  add.erase(std::unique(add.begin(), add.end()), add.end());
  if (!acc) {
    acc = std::move(add);
    return;
  }
  std::vector<Value> keep;
  for (const auto& v : *acc)
    for (const auto& w : add)
      if (semantic_equal(v, w, tol)) {
        keep.push_back(v);
        break;
      }
  acc = std::move(keep);
}

struct LeafInfo {
  Leaf leaf;
  std::optional<std::vector<Value>> pinned;
  std::optional<std::vector<Value>> annotated;
  std::set<Value> active;
};

class DomainBuilder {
 public:
  explicit DomainBuilder(const TaskModel& tm) : tm_(tm), m_(tm.base), tol_(tm.base.tolerance) {}

  SearchDomain build() {
    make_leaves();
    read_pins();
    read_annotations();
    Eliminator elim(m_, eliminated_, dom_.residual);
    for (const auto& nf : tm_.phiT) elim.add(nf);
    for (const auto& nf : eliminated_) collect_active(*nf.formula);
    specialise_all();
    order_leaves();
    return std::move(dom_);
  }

 private:
  // ---- leaves ------------------------------------------------------------------------

  void make_leaves() {
    for (const auto& u : m_.unknowns()) {
      if (u.kind != SymbolKind::Objective) {
        relation_names_.push_back(u.name);
        continue;
      }
      dom_.skeletons[u.name] = skeleton(m_.scales, u.result_scale);
      for (const auto& p : m_.scales.leaf_paths(u.result_scale)) {
        LeafInfo li;
        li.leaf.unknown = u.name;
        li.leaf.path = p;
        const Scale* s = m_.scales.scale_at(u.result_scale, p);
        li.leaf.scale = s ? s->name : u.result_scale;
        infos_.push_back(std::move(li));
      }
    }
  }

  std::vector<std::size_t> leaves_touching(const PathRef& r) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < infos_.size(); ++i) {
      const Leaf& l = infos_[i].leaf;
      if (l.unknown == r.unknown && (is_prefix(r.path, l.path) || is_prefix(l.path, r.path)))
        out.push_back(i);
    }
    return out;
  }

  // Value of leaf i inside a value written for path r (which is a prefix of the leaf path).
  const Value* project_to(const Value& v, const PathRef& r, std::size_t i) const {
    const FieldPath& lp = infos_[i].leaf.path;
    if (!is_prefix(r.path, lp)) return nullptr;
    return value_at(v, FieldPath(lp.begin() + static_cast<std::ptrdiff_t>(r.path.size()), lp.end()));
  }

  std::optional<std::pair<PathRef, Value>> pin_of(const Formula& f) const {
    if (f.kind != Formula::Kind::Atom || f.head != "eq" || f.head_kind != HeadKind::Symbol ||
        f.args.size() != 2)
      return std::nullopt;
    for (int side : {0, 1}) {
      auto p = path_of(*f.args[side], m_);
      const Term& other = *f.args[1 - side];
      if (p && other.kind == Term::Kind::Literal) return std::make_pair(*p, other.literal);
    }
    return std::nullopt;
  }

  void read_pins() {
    for (const auto& d : tm_.task.delta) {
      std::vector<FormulaPtr> parts;
      flatten_and(d.formula, parts);
      for (const auto& p : parts) {
        if (!variables_of(*p).empty()) continue;
        auto pin = pin_of(*p);
        if (!pin) continue;
        for (std::size_t i : leaves_touching(pin->first)) {
          if (!is_prefix(pin->first.path, infos_[i].leaf.path)) continue;
          const Value* v = project_to(pin->second, pin->first, i);
          intersect(infos_[i].pinned, v ? std::vector<Value>{*v} : std::vector<Value>{}, tol_);
        }
      }
    }
  }

  void read_annotations() {
    for (const auto& a : tm_.task.domains) {
      const Symbol* s = m_.symbol(a.unknown);
      if (s && s->kind != SymbolKind::Objective) {
        auto& tabs = relation_tables_[a.unknown];
        if (!tabs) {
          tabs = a.tables;
        } else {
          std::vector<FiniteTable> keep;
          for (const auto& t : *tabs)
            if (std::find(a.tables.begin(), a.tables.end(), t) != a.tables.end()) keep.push_back(t);
          tabs = std::move(keep);
        }
        continue;
      }
      PathRef r{a.unknown, a.path};
      bool leaf_path = false;
      for (std::size_t i : leaves_touching(r)) {
        if (!is_prefix(r.path, infos_[i].leaf.path)) continue;
        if (infos_[i].leaf.path == r.path) leaf_path = true;
        std::vector<Value> projected;
        for (const auto& v : a.values)
          if (const Value* pv = project_to(v, r, i)) projected.push_back(*pv);
        intersect(infos_[i].annotated, std::move(projected), tol_);
      }
      if (!leaf_path) dom_.filters.push_back(DomainFilter{a.unknown, a.path, a.values});
    }
  }

  // ---- active domain -------------------------------------------------------------------

  void add_active(const Term& t, const Value& v) {
    auto p = path_of(t, m_);
    if (!p) return;
    for (std::size_t i : leaves_touching(*p))
      if (const Value* pv = project_to(v, *p, i)) infos_[i].active.insert(*pv);
  }

  void table_columns(const std::string& head, const std::vector<TermPtr>& args) {
    const FiniteTable* t = m_.table(head);
    if (!t) return;
    for (std::size_t k = 0; k < args.size(); ++k)
      if (path_of(*args[k], m_))
        for (const auto& row : t->rows())
          if (k < row.args.size()) add_active(*args[k], row.args[k]);
  }

  void collect_active(const Formula& f) {
    for (const auto& c : f.children) collect_active(*c);
    if (f.kind != Formula::Kind::Atom) return;
    for (const auto& a : f.args)
      for_each_subterm(*a, [&](const Term& t) {
        if (t.kind == Term::Kind::Apply && t.head == HeadKind::Symbol) table_columns(t.name, t.args);
      });
    if (f.head_kind == HeadKind::Symbol) table_columns(f.head, f.args);
    if (f.head == "eq" && f.head_kind == HeadKind::Symbol && f.args.size() == 2) {
      for (int side : {0, 1}) {
        const Term& o = *f.args[1 - side];
        if (o.kind == Term::Kind::Literal) add_active(*f.args[side], o.literal);
        if (o.kind == Term::Kind::Apply && o.head == HeadKind::Symbol)
          if (const FiniteTable* t = m_.table(o.name))
            for (const auto& row : t->rows())
              if (row.result) add_active(*f.args[side], *row.result);
      }
    }
  }

  // ---- specialisation ----------------------------------------------------------------

  bool ground_head(const std::string& name) const {
    const Symbol* s = m_.symbol(name);
    return s && (s->builtin || s->level >= 2);
  }

  // Literal for a path fully covered by singleton leaves.
  std::optional<Value> singleton_value(const PathRef& r) const {
    auto touched = leaves_touching(r);
    if (touched.empty()) return std::nullopt;
    Value whole = dom_.skeletons.at(r.unknown);
    for (std::size_t i : touched) {
      if (!is_prefix(r.path, infos_[i].leaf.path)) return std::nullopt;  // path below a leaf
      const auto& single = singleton_[i];
      if (!single) return std::nullopt;
      whole = with_value_at(whole, infos_[i].leaf.path, *single);
    }
    const Value* v = value_at(whole, r.path);
    if (!v) return std::nullopt;
    return *v;
  }

  // nullptr means undefined.
  TermPtr fold_term(const TermPtr& t) {
    switch (t->kind) {
      case Term::Kind::Literal:
      case Term::Kind::Variable:
        return t;
      case Term::Kind::Symbol: {
        if (auto p = path_of(*t, m_)) {
          if (auto v = singleton_value(*p)) return ast::lit(*v);
          return t;
        }
        if (!ground_head(t->name) && !(m_.symbol(t->name) && m_.symbol(t->name)->level == 0))
          return t;
        auto v = eval_term(*t, m_, empty_, {}, &dom_.setup);
        return v ? ast::lit(*v) : nullptr;
      }
      case Term::Kind::Field: {
        if (auto p = path_of(*t, m_)) {
          if (auto v = singleton_value(*p)) return ast::lit(*v);
          return t;
        }
        TermPtr base = fold_term(t->args[0]);
        if (!base) return nullptr;
        if (base->kind == Term::Kind::Literal) {
          ++dom_.setup.nodes;
          if (!base->literal.is_composite()) return nullptr;
          const Value* f = base->literal.as_composite().field(t->name);
          return f ? ast::lit(*f) : nullptr;
        }
        return base == t->args[0] ? t : ast::field(t->name, base);
      }
      case Term::Kind::Apply: {
        std::vector<TermPtr> args;
        bool all_literal = true;
        bool changed = false;
        for (const auto& a : t->args) {
          TermPtr f = fold_term(a);
          if (!f) return nullptr;
          all_literal &= f->kind == Term::Kind::Literal;
          changed |= f != a;
          args.push_back(std::move(f));
        }
        TermPtr rebuilt = changed ? ast::apply(t->name, args, t->head) : t;
        if (all_literal && t->head == HeadKind::Symbol && ground_head(t->name)) {
          auto v = eval_term(*rebuilt, m_, empty_, {}, &dom_.setup);
          return v ? ast::lit(*v) : nullptr;
        }
        return rebuilt;
      }
    }
    return t;
  }

  FormulaPtr fold(const FormulaPtr& f) {
    switch (f->kind) {
      case Formula::Kind::True:
      case Formula::Kind::False:
        return f;
      case Formula::Kind::Atom: {
        std::vector<TermPtr> args;
        bool all_literal = true;
        bool changed = false;
        for (const auto& a : f->args) {
          TermPtr t = fold_term(a);
          if (!t) return ast::falsity();
          all_literal &= t->kind == Term::Kind::Literal;
          changed |= t != a;
          args.push_back(std::move(t));
        }
        FormulaPtr rebuilt = changed ? ast::atom(f->head, args, f->head_kind) : f;
        if (all_literal && f->head_kind == HeadKind::Symbol && ground_head(f->head))
          return eval_formula(*rebuilt, m_, empty_, {}, &dom_.setup) ? ast::truth() : ast::falsity();
        return rebuilt;
      }
      case Formula::Kind::Not: {
        FormulaPtr c = fold(f->children[0]);
        if (c->kind == Formula::Kind::True) return ast::falsity();
        if (c->kind == Formula::Kind::False) return ast::truth();
        return c == f->children[0] ? f : ast::negate(c);
      }
      case Formula::Kind::Implies: {
        FormulaPtr p = fold(f->children[0]);
        if (p->kind == Formula::Kind::False) return ast::truth();
        FormulaPtr c = fold(f->children[1]);
        if (p->kind == Formula::Kind::True) return c;
        if (c->kind == Formula::Kind::True) return ast::truth();
        if (c->kind == Formula::Kind::False) return ast::negate(p);
        return ast::implies(p, c);
      }
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        const bool is_and = f->kind == Formula::Kind::And;
        std::vector<FormulaPtr> kept;
        for (const auto& c : f->children) {
          FormulaPtr s = fold(c);
          if (s->kind == (is_and ? Formula::Kind::False : Formula::Kind::True)) return s;
          if (s->kind == (is_and ? Formula::Kind::True : Formula::Kind::False)) continue;
          kept.push_back(std::move(s));
        }
        return is_and ? ast::conj(std::move(kept)) : ast::disj(std::move(kept));
      }
    }
    return f;
  }

  void specialise_all() {
    singleton_.resize(infos_.size());
    for (std::size_t i = 0; i < infos_.size(); ++i) {
      const auto& src = infos_[i].pinned ? infos_[i].pinned : infos_[i].annotated;
      if (src && src->size() == 1 && m_.scales.conforms(src->front(), infos_[i].leaf.scale))
        singleton_[i] = src->front();
    }
    for (const auto& nf : eliminated_) {
      std::vector<FormulaPtr> parts;
      flatten_and(fold(nf.formula), parts);
      for (auto& p : parts) dom_.conjuncts.push_back(NamedFormula{nf.name, std::move(p), nf.pos});
    }
  }

  // ---- derived leaves ----------------------------------------------------------------

  struct Def {
    TermPtr term;
    std::vector<FormulaPtr> guard;  // sibling conjuncts that must hold for this branch
  };

  bool mentions_leaf(const Formula& f, std::size_t leaf) const {
    std::set<std::size_t> ls;
    std::set<std::string> rs;
    for_each_term(f, [&](const Term& t) {
      if (auto p = path_of(t, m_))
        for (std::size_t i : leaves_touching(*p)) ls.insert(i);
    });
    return ls.count(leaf) > 0;
  }

  std::optional<std::vector<Def>> defining_terms(const Formula& f, std::size_t leaf) const {
    const Leaf& l = infos_[leaf].leaf;
    switch (f.kind) {
      case Formula::Kind::False:
        return std::vector<Def>{};
      case Formula::Kind::Atom: {
        if (f.head != "eq" || f.head_kind != HeadKind::Symbol || f.args.size() != 2) return std::nullopt;
        for (int side : {0, 1}) {
          auto p = path_of(*f.args[side], m_);
          if (p && p->unknown == l.unknown && p->path == l.path)
            return std::vector<Def>{Def{f.args[1 - side], {}}};
        }
        return std::nullopt;
      }
      case Formula::Kind::And:
        for (std::size_t k = 0; k < f.children.size(); ++k) {
          auto d = defining_terms(*f.children[k], leaf);
          if (!d) continue;
          for (std::size_t j = 0; j < f.children.size(); ++j) {
            if (j == k || mentions_leaf(*f.children[j], leaf) || !variables_of(*f.children[j]).empty()) continue;
            for (auto& def : *d) def.guard.push_back(f.children[j]);
          }
          return d;
        }
        return std::nullopt;
      case Formula::Kind::Or: {
        std::vector<Def> all;
        for (const auto& c : f.children) {
          auto d = defining_terms(*c, leaf);
          if (!d) return std::nullopt;
          all.insert(all.end(), d->begin(), d->end());
        }
        return all;
      }
      default:
        return std::nullopt;
    }
  }

  void footprint(const Formula& f, std::set<std::size_t>& leaves, std::set<std::string>& rels) const {
    if (f.kind == Formula::Kind::Atom && f.head_kind == HeadKind::Symbol) {
      const Symbol* s = m_.symbol(f.head);
      if (s && s->level == 1) rels.insert(f.head);
    }
    for (const auto& a : f.args) footprint(*a, leaves, rels);
    for (const auto& c : f.children) footprint(*c, leaves, rels);
  }

  void footprint(const Term& t, std::set<std::size_t>& leaves, std::set<std::string>& rels) const {
    if (auto p = path_of(t, m_)) {
      for (std::size_t i : leaves_touching(*p)) leaves.insert(i);
      return;
    }
    if (t.kind == Term::Kind::Apply && t.head == HeadKind::Symbol) {
      const Symbol* s = m_.symbol(t.name);
      if (s && s->level == 1) rels.insert(t.name);
    }
    for (const auto& a : t.args) footprint(*a, leaves, rels);
  }

  void order_leaves() {
    const std::size_t n = infos_.size();
    std::vector<int> state(n, 0);  // 0 pending, 1 static, 2 derived accepted
    std::vector<std::optional<std::vector<Def>>> defs(n);
    std::vector<std::set<std::size_t>> deps(n);
    std::vector<std::string> origin(n);

    for (std::size_t i = 0; i < n; ++i) {
      Leaf& l = infos_[i].leaf;
      if (infos_[i].pinned) {
        l.source = Leaf::Source::Pinned;
        l.values = *infos_[i].pinned;
        state[i] = 1;
      } else if (infos_[i].annotated) {
        l.source = Leaf::Source::Annotated;
        l.values = *infos_[i].annotated;
        state[i] = 1;
      } else {
        for (const auto& c : dom_.conjuncts) {
          auto d = defining_terms(*c.formula, i);
          if (!d) continue;
          std::set<std::size_t> dl;
          std::set<std::string> dr;
          for (const auto& def : *d) footprint(*def.term, dl, dr);
          if (dl.count(i)) continue;
          defs[i] = std::move(d);
          deps[i] = std::move(dl);
          origin[i] = c.name;
          break;
        }
      }
    }

    std::vector<std::size_t> order;
    std::vector<std::size_t> statics;
    for (std::size_t i = 0; i < n; ++i)
      if (state[i] == 1) statics.push_back(i);
    std::sort(statics.begin(), statics.end(), [&](std::size_t a, std::size_t b) {
      const Leaf& x = infos_[a].leaf;
      const Leaf& y = infos_[b].leaf;
      return std::tie(x.unknown, x.path) < std::tie(y.unknown, y.path);
    });
    order = statics;

    auto pending_sorted = [&] {
      std::vector<std::size_t> p;
      for (std::size_t i = 0; i < n; ++i)
        if (state[i] == 0) p.push_back(i);
      std::sort(p.begin(), p.end(), [&](std::size_t a, std::size_t b) {
        const Leaf& x = infos_[a].leaf;
        const Leaf& y = infos_[b].leaf;
        return std::tie(x.unknown, x.path) < std::tie(y.unknown, y.path);
      });
      return p;
    };

    // Leaves read by a definition's guards, so a leaf whose guards are decidable goes first.
    std::vector<std::set<std::size_t>> guard_deps(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (!defs[i]) continue;
      std::set<std::string> rels;
      for (const auto& def : *defs[i])
        for (const auto& g : def.guard) footprint(*g, guard_deps[i], rels);
    }
    auto assigned = [&](const std::set<std::size_t>& ds) {
      return std::all_of(ds.begin(), ds.end(), [&](std::size_t d) { return state[d] != 0; });
    };

    for (;;) {
      auto pending = pending_sorted();
      if (pending.empty()) break;
      bool progress = false;
      bool strict = std::any_of(pending.begin(), pending.end(), [&](std::size_t i) {
        return defs[i] && assigned(deps[i]) && assigned(guard_deps[i]);
      });
      for (std::size_t i : pending) {
        if (!defs[i]) continue;
        if (!assigned(deps[i]) || (strict && !assigned(guard_deps[i]))) continue;
        Leaf& l = infos_[i].leaf;
        l.source = Leaf::Source::Derived;
        for (const auto& def : *defs[i]) l.derived.push_back(def.term);
        l.origin = origin[i];
        state[i] = 2;
        order.push_back(i);
        progress = true;
      }
      if (progress) continue;
      // Stuck: a leaf with no definition goes to the active domain first; a definition
      // cycle only when nothing else is left.
      std::size_t i = pending.front();
      for (std::size_t p : pending)
        if (!defs[p]) {
          i = p;
          break;
        }
      Leaf& l = infos_[i].leaf;
      if (infos_[i].active.empty())
        throw Error(ErrorCode::UnboundedUnknown,
                    "unknown '" + l.unknown + "'" +
                        (l.path.empty() ? std::string() : " at field path '" + join(l.path) + "'") +
                        ": no input pin, domain annotation, defining equation or table column bounds it");
      l.source = Leaf::Source::ActiveDomain;
      l.values.assign(infos_[i].active.begin(), infos_[i].active.end());
      state[i] = 1;
      order.push_back(i);
    }

    // Relations first, then objective leaves in the order computed above.
    for (const auto& name : relation_names_) {
      auto it = relation_tables_.find(name);
      if (it == relation_tables_.end() || !it->second)
        throw Error(ErrorCode::UnboundedUnknown,
                    "relation unknown '" + name + "' needs a domain annotation listing its admissible tables");
      Leaf l;
      l.unknown = name;
      l.source = Leaf::Source::Tables;
      l.tables = *it->second;
      std::sort(l.tables.begin(), l.tables.end(), [](const FiniteTable& a, const FiniteTable& b) {
        return std::lexicographical_compare(a.rows().begin(), a.rows().end(), b.rows().begin(), b.rows().end());
      });
      dom_.leaves.push_back(std::move(l));
    }
    const std::size_t offset = dom_.leaves.size();
    std::vector<std::size_t> position(n);
    for (std::size_t k = 0; k < order.size(); ++k) position[order[k]] = offset + k;
    for (std::size_t i : order) {
      Leaf l = infos_[i].leaf;
      if (l.source != Leaf::Source::Derived) {
        std::vector<Value> typed;
        for (auto& v : l.values)
          if (m_.scales.conforms(v, l.scale)) typed.push_back(std::move(v));
        l.values = std::move(typed);
      }
      for (std::size_t d : deps[i]) l.depends_on.push_back(position[d]);
      std::sort(l.depends_on.begin(), l.depends_on.end());
      if (l.source == Leaf::Source::Derived) {
        // Guards are only usable when everything they read is assigned before this leaf.
        for (const auto& def : *defs[i]) {
          std::vector<FormulaPtr> usable;
          for (const auto& g : def.guard) {
            std::set<std::size_t> gl;
            std::set<std::string> gr;
            footprint(*g, gl, gr);
            bool before = std::all_of(gl.begin(), gl.end(), [&](std::size_t d) {
              return state[d] != 0 && position[d] < position[i];
            });
            if (before) usable.push_back(g);
          }
          l.guards.push_back(usable.empty() ? nullptr : ast::conj(std::move(usable)));
        }
      }
      dom_.leaves.push_back(std::move(l));
    }
  }

  static std::string join(const FieldPath& p) {
    std::string out;
    for (auto it = p.rbegin(); it != p.rend(); ++it) out += *it + ".";
    if (!out.empty()) out.pop_back();
    return out;
  }

  const TaskModel& tm_;
  const LogicalModel& m_;
  double tol_;
  CandidateSystem empty_;
  SearchDomain dom_;
  std::vector<LeafInfo> infos_;
  std::vector<std::optional<Value>> singleton_;
  std::vector<std::string> relation_names_;
  std::map<std::string, std::optional<std::vector<FiniteTable>>> relation_tables_;
  std::vector<NamedFormula> eliminated_;
};

// ---- shared enumeration helpers ---------------------------------------------------

bool passes_filters(const SearchDomain& dom, const CandidateSystem& c, double tol) {
  for (const auto& f : dom.filters) {
    auto it = c.objects.find(f.unknown);
    if (it == c.objects.end()) return false;
    const Value* v = value_at(it->second, f.path);
    if (!v) return false;
    bool ok = false;
    for (const auto& a : f.values) ok |= semantic_equal(*v, a, tol);
    if (!ok) return false;
  }
  return true;
}

struct Assignment {
  CandidateSystem cur;

  void set(const Leaf& l, const Value& v) {
    auto& slot = cur.objects[l.unknown];
    slot = with_value_at(slot, l.path, v);
  }
  void set(const Leaf& l, const FiniteTable& t) { cur.relations[l.unknown] = t; }
};

std::vector<Value> derived_values(const Leaf& l, const LogicalModel& m, const CandidateSystem& cur,
                                  EvalCounters* counters, bool use_guards) {
  std::set<Value> out;
  for (std::size_t k = 0; k < l.derived.size(); ++k) {
    if (use_guards && l.guards[k] && !eval_formula(*l.guards[k], m, cur, {}, counters)) continue;
    auto v = eval_term(*l.derived[k], m, cur, {}, counters);
    if (v && m.scales.conforms(*v, l.scale)) out.insert(std::move(*v));
  }
  return {out.begin(), out.end()};
}

std::vector<TaskSolution> finish(const TaskModel& tm, std::vector<CandidateSystem> found) {
  std::sort(found.begin(), found.end());
  found.erase(std::unique(found.begin(), found.end()), found.end());
  auto kept = apply_psi(tm.task.psi, tm.base, std::move(found));
  std::vector<TaskSolution> out;
  for (auto& c : kept) {
    TaskSolution s;
    for (const auto& t : tm.task.outputs) s.outputs.emplace_back(format(*t), project(*t, tm.base, c));
    s.system = std::move(c);
    out.push_back(std::move(s));
  }
  return out;
}

class Searcher {
 public:
  Searcher(const TaskModel& tm, const SearchDomain& dom, const SolveConfig& cfg, Clock::time_point start,
           std::atomic<std::uint64_t>& examined, std::atomic<bool>& stop, std::string& reason,
           std::mutex& reason_mu)
      : tm_(tm), dom_(dom), cfg_(cfg), start_(start), examined_(examined), stop_(stop),
        reason_(reason), reason_mu_(reason_mu) {
    checks_.resize(dom.leaves.size());
    std::map<std::pair<std::string, FieldPath>, std::size_t> index;
    std::map<std::string, std::size_t> rel_index;
    for (std::size_t i = 0; i < dom.leaves.size(); ++i) {
      if (dom.leaves[i].relation())
        rel_index[dom.leaves[i].unknown] = i;
      else
        index[{dom.leaves[i].unknown, dom.leaves[i].path}] = i;
    }
    for (const auto& c : dom.conjuncts) {
      long at = -1;
      std::function<void(const Term&)> visit = [&](const Term& t) {
        if (auto p = path_of(t, tm.base)) {
          for (const auto& [key, i] : index)
            if (key.first == p->unknown && (is_prefix(p->path, key.second) || is_prefix(key.second, p->path)))
              at = std::max(at, static_cast<long>(i));
          return;
        }
        if (t.kind == Term::Kind::Apply && rel_index.count(t.name))
          at = std::max(at, static_cast<long>(rel_index[t.name]));
        for (const auto& a : t.args) visit(*a);
      };
      std::function<void(const Formula&)> walk = [&](const Formula& f) {
        if (f.kind == Formula::Kind::Atom && rel_index.count(f.head))
          at = std::max(at, static_cast<long>(rel_index[f.head]));
        for (const auto& a : f.args) visit(*a);
        for (const auto& ch : f.children) walk(*ch);
      };
      walk(*c.formula);
      if (at < 0)
        initial_.push_back(&c);
      else
        checks_[static_cast<std::size_t>(at)].push_back(&c);
    }
    for (const auto& [name, sk] : dom.skeletons) a_.cur.objects[name] = sk;
  }

  bool initial_ok() {
    for (const NamedFormula* c : initial_)
      if (!eval_formula(*c->formula, tm_.base, a_.cur, {}, &steps)) return false;
    return true;
  }

  void run(unsigned worker, unsigned workers) { dfs(0, worker, workers); }

  std::vector<CandidateSystem> found;
  EvalCounters steps;
  std::uint64_t nodes = 0;

 private:
  bool checks_pass(std::size_t d) {
    for (const NamedFormula* c : checks_[d])
      if (!eval_formula(*c->formula, tm_.base, a_.cur, {}, &steps)) return false;
    return true;
  }

  void halt(const std::string& why) {
    std::lock_guard<std::mutex> lock(reason_mu_);
    if (reason_.empty()) reason_ = why;
    stop_ = true;
  }

  bool out_of_time() {
    if ((++nodes & 0xff) != 0) return false;
    double secs = std::chrono::duration<double>(Clock::now() - start_).count();
    if (secs > cfg_.time_budget_seconds) {
      halt("time budget of " + std::to_string(cfg_.time_budget_seconds) + " s exhausted");
      return true;
    }
    return false;
  }

  void dfs(std::size_t d, unsigned worker, unsigned workers) {
    if (stop_) return;
    if (d == dom_.leaves.size()) {
      complete();
      return;
    }
    if (out_of_time()) return;
    const Leaf& l = dom_.leaves[d];
    if (l.relation()) {
      for (std::size_t k = 0; k < l.tables.size() && !stop_; ++k) {
        if (d == 0 && k % workers != worker) continue;
        a_.set(l, l.tables[k]);
        if (checks_pass(d)) dfs(d + 1, worker, workers);
      }
      return;
    }
    std::vector<Value> derived;
    const std::vector<Value>* values = &l.values;
    if (l.source == Leaf::Source::Derived) {
      derived = derived_values(l, tm_.base, a_.cur, &steps, true);
      values = &derived;
    }
    for (std::size_t k = 0; k < values->size() && !stop_; ++k) {
      if (d == 0 && k % workers != worker) continue;
      a_.set(l, (*values)[k]);
      if (checks_pass(d)) dfs(d + 1, worker, workers);
    }
  }

  void complete() {
    if (examined_.fetch_add(1) >= cfg_.max_candidates) {
      halt("candidate limit of " + std::to_string(cfg_.max_candidates) + " reached");
      return;
    }
    CandidateSystem c = make_candidate(a_.cur.objects, a_.cur.relations);
    try {
      check_relevant(c, tm_.base);
    } catch (const Error&) {
      return;
    }
    if (!passes_filters(dom_, c, tm_.base.tolerance)) return;
    if (!dom_.residual.empty() && !check_formulas(dom_.residual, tm_.base, c, &steps, true).solution) return;
    found.push_back(std::move(c));
  }

  const TaskModel& tm_;
  const SearchDomain& dom_;
  const SolveConfig& cfg_;
  Clock::time_point start_;
  std::atomic<std::uint64_t>& examined_;
  std::atomic<bool>& stop_;
  std::string& reason_;
  std::mutex& reason_mu_;
  Assignment a_;
  std::vector<const NamedFormula*> initial_;
  std::vector<std::vector<const NamedFormula*>> checks_;
};

}  // namespace

std::string_view to_string(Leaf::Source source) {
  switch (source) {
    case Leaf::Source::Pinned:
      return "pinned";
    case Leaf::Source::Annotated:
      return "annotated";
    case Leaf::Source::Derived:
      return "derived";
    case Leaf::Source::ActiveDomain:
      return "active-domain";
    case Leaf::Source::Tables:
      return "tables";
  }
  return "?";
}

std::string_view to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::SolutionsFound:
      return "solutions_found";
    case SolveStatus::NoSolutions:
      return "no_solutions";
    case SolveStatus::Truncated:
      return "truncated";
  }
  return "?";
}

TaskModel compose_task_model(const LogicalModel& model, const TaskSpec& task) {
  TaskModel tm;
  tm.base = model;
  tm.task = task;
  tm.phiT = model.formulas;
  for (const auto& d : task.delta) tm.phiT.push_back(NamedFormula{"delta:" + d.name, d.formula, d.pos});
  return tm;
}

std::map<std::string, std::vector<Value>> SearchDomain::per_unknown() const {
  std::map<std::string, std::vector<Value>> out;
  std::set<std::string> dynamic;
  for (const auto& l : leaves)
    if (l.source == Leaf::Source::Derived) dynamic.insert(l.unknown);
  for (const auto& [name, sk] : skeletons) {
    if (dynamic.count(name)) continue;
    std::vector<Value> acc{sk};
    for (const auto& l : leaves) {
      if (l.relation() || l.unknown != name) continue;
      std::vector<Value> next;
      for (const auto& partial : acc)
        for (const auto& v : l.values) next.push_back(with_value_at(partial, l.path, v));
      acc = std::move(next);
    }
    std::sort(acc.begin(), acc.end());
    out[name] = std::move(acc);
  }
  return out;
}

std::map<std::string, std::vector<FiniteTable>> SearchDomain::per_relation_unknown() const {
  std::map<std::string, std::vector<FiniteTable>> out;
  for (const auto& l : leaves)
    if (l.relation()) out[l.unknown] = l.tables;
  return out;
}

SearchDomain derive_domains(const TaskModel& tm) { return DomainBuilder(tm).build(); }

MaybeValue project(const Term& term, const LogicalModel& model, const CandidateSystem& candidate,
                   EvalCounters* counters) {
  auto vars = variables_of(term);
  if (vars.empty()) return eval_term(term, model, candidate, {}, counters);
  // Wrap the term in a trivial atom so the substitution enumerator sees its variables.
  FormulaPtr probe = ast::eq(std::make_shared<Term>(term), std::make_shared<Term>(term));
  MaybeValue common;
  bool first = true;
  for (const auto& s : relevant_substitutions(*probe, model, candidate)) {
    auto v = eval_term(term, model, candidate, s, counters);
    if (!v) return std::nullopt;
    if (first) {
      common = std::move(v);
      first = false;
    } else if (!semantic_equal(*common, *v, model.tolerance)) {
      return std::nullopt;
    }
  }
  return common;
}

std::vector<CandidateSystem> apply_psi(const Psi& psi, const LogicalModel& model,
                                       std::vector<CandidateSystem> solutions) {
  switch (psi.kind) {
    case Psi::Kind::None:
      return solutions;
    case Psi::Kind::Require: {
      std::vector<CandidateSystem> kept;
      for (auto& c : solutions)
        if (in_agreement(*psi.condition, model, c).agrees) kept.push_back(std::move(c));
      return kept;
    }
    case Psi::Kind::Maximize:
    case Psi::Kind::Minimize: {
      std::vector<Number> scores;
      for (const auto& c : solutions) {
        auto v = project(*psi.objective, model, c);
        if (!v || !v->is_number())
          throw Error(ErrorCode::PsiNotNumeric,
                      "objective '" + format(*psi.objective) + "' is " +
                          (v ? to_text(*v) : std::string("undefined")) + " on a solution");
        scores.push_back(v->as_number());
      }
      if (scores.empty()) return solutions;
      const bool maximize = psi.kind == Psi::Kind::Maximize;
      Number best = scores.front();
      for (const auto& s : scores)
        if (maximize ? s.compare(best) > 0 : s.compare(best) < 0) best = s;
      std::vector<CandidateSystem> kept;
      for (std::size_t i = 0; i < solutions.size(); ++i)
        if (scores[i].approx_equal(best, model.tolerance)) kept.push_back(std::move(solutions[i]));
      return kept;
    }
  }
  return solutions;
}

TaskResult solve(const LogicalModel& model, const TaskSpec& task, const SolveConfig& config) {
  const auto start = Clock::now();
  TaskModel tm = compose_task_model(model, task);
  SearchDomain dom = derive_domains(tm);

  TaskResult result;
  result.stats.setup = dom.setup;
  std::atomic<std::uint64_t> examined{0};
  std::atomic<bool> stop{false};
  std::string reason;
  std::mutex reason_mu;

  const unsigned workers = std::max(1u, config.workers);
  std::vector<std::unique_ptr<Searcher>> searchers;
  for (unsigned w = 0; w < workers; ++w)
    searchers.push_back(std::make_unique<Searcher>(tm, dom, config, start, examined, stop, reason, reason_mu));

  std::vector<CandidateSystem> found;
  if (searchers.front()->initial_ok()) {
    if (workers == 1) {
      searchers.front()->run(0, 1);
    } else {
      std::vector<std::thread> threads;
      for (unsigned w = 0; w < workers; ++w)
        threads.emplace_back([&, w] { searchers[w]->run(w, workers); });
      for (auto& t : threads) t.join();
    }
  }
  for (auto& s : searchers) {
    result.stats.steps += s->steps;
    result.stats.nodes += s->nodes;
    found.insert(found.end(), std::make_move_iterator(s->found.begin()),
                 std::make_move_iterator(s->found.end()));
  }
  result.stats.candidates = std::min<std::uint64_t>(examined.load(), config.max_candidates);
  result.stats.solutions_before_psi = found.size();
  result.solutions = finish(tm, std::move(found));
  if (stop) {
    result.status = SolveStatus::Truncated;
    result.truncation = reason;
  } else {
    result.status = result.solutions.empty() ? SolveStatus::NoSolutions : SolveStatus::SolutionsFound;
  }
  result.stats.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

TaskResult brute_force_solve(const LogicalModel& model, const TaskSpec& task, std::uint64_t bound) {
  const auto start = Clock::now();
  TaskModel tm = compose_task_model(model, task);
  SearchDomain dom = derive_domains(tm);
  TaskResult result;
  std::vector<CandidateSystem> found;
  Assignment a;
  for (const auto& [name, sk] : dom.skeletons) a.cur.objects[name] = sk;
  std::uint64_t count = 0;

  std::function<void(std::size_t)> enumerate = [&](std::size_t d) {
    if (d == dom.leaves.size()) {
      if (++count > bound)
        throw Error(ErrorCode::BoundExceeded,
                    "more than " + std::to_string(bound) + " candidates to enumerate");
      CandidateSystem c = make_candidate(a.cur.objects, a.cur.relations);
      try {
        check_relevant(c, tm.base);
      } catch (const Error&) {
        return;
      }
      if (!passes_filters(dom, c, tm.base.tolerance)) return;
      if (check_formulas(tm.phiT, tm.base, c, nullptr, true).solution) found.push_back(std::move(c));
      return;
    }
    const Leaf& l = dom.leaves[d];
    if (l.relation()) {
      for (const auto& t : l.tables) {
        a.set(l, t);
        enumerate(d + 1);
      }
      return;
    }
    std::vector<Value> values =
        l.source == Leaf::Source::Derived ? derived_values(l, tm.base, a.cur, nullptr, false) : l.values;
    for (const auto& v : values) {
      a.set(l, v);
      enumerate(d + 1);
    }
  };
  enumerate(0);

  result.stats.candidates = count;
  result.stats.solutions_before_psi = found.size();
  result.solutions = finish(tm, std::move(found));
  result.status = result.solutions.empty() ? SolveStatus::NoSolutions : SolveStatus::SolutionsFound;
  result.stats.elapsed_seconds = std::chrono::duration<double>(Clock::now() - start).count();
  return result;
}

}  // namespace lm
