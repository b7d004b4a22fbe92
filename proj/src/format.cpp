#include "lm/format.hpp"

#include <sstream>

namespace lm {

namespace {

// Binding strength of a term; higher binds tighter.
int term_rank(const Term& t) {
  if (t.kind != Term::Kind::Apply || t.head != HeadKind::Symbol || t.args.size() != 2) return 3;
  if (t.name == "plus" || t.name == "minus") return 1;
  if (t.name == "times" || t.name == "div") return 2;
  return 3;
}

std::string args_text(const std::vector<TermPtr>& args) {
  std::string out = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) out += ", ";
    out += format(*args[i]);
  }
  return out + ")";
}

std::string wrap_if(bool cond, std::string s) { return cond ? "(" + s + ")" : s; }

int formula_rank(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::Implies:
      return 0;
    case Formula::Kind::Or:
      return 1;
    case Formula::Kind::And:
      return 2;
    case Formula::Kind::Not:
      return 3;
    default:
      return 4;
  }
}

std::string level_suffix(int level) {
  return level == 2 ? std::string() : " level " + std::to_string(level);
}

std::string scale_list(const Symbol& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.arg_scales.size(); ++i) {
    if (i) out += ", ";
    out += s.arg_scales[i];
  }
  return out + ")";
}

std::string value_set(const std::vector<Value>& values) {
  std::string out = "{";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += to_text(values[i]);
  }
  return out + "}";
}

std::string row_text(const TableRow& row) {
  std::string out = "(";
  for (std::size_t i = 0; i < row.args.size(); ++i) {
    if (i) out += ", ";
    out += to_text(row.args[i]);
  }
  out += ")";
  if (row.result) out += " -> " + to_text(*row.result);
  return out;
}

}  // namespace

std::string format(const Term& t) {
  switch (t.kind) {
    case Term::Kind::Literal:
      return to_text(t.literal);
    case Term::Kind::Symbol:
    case Term::Kind::Variable:
      return t.name;
    case Term::Kind::Field: {
      const Term& base = t.base();
      bool plain = base.kind == Term::Kind::Symbol || base.kind == Term::Kind::Variable ||
                   base.kind == Term::Kind::Field ||
                   (base.kind == Term::Kind::Apply && term_rank(base) == 3);
      return t.name + "." + wrap_if(!plain, format(base));
    }
    case Term::Kind::Apply: {
      int rank = term_rank(t);
      if (rank == 3) return t.name + args_text(t.args);
      std::string op = std::string(infix_spelling(t.name));
      const Term& l = *t.args[0];
      const Term& r = *t.args[1];
      return wrap_if(term_rank(l) < rank, format(l)) + " " + op + " " +
             wrap_if(term_rank(r) <= rank, format(r));
    }
  }
  return {};
}

std::string format(const Formula& f) {
  switch (f.kind) {
    case Formula::Kind::True:
      return "true";
    case Formula::Kind::False:
      return "false";
    case Formula::Kind::Atom: {
      if (f.head_kind == HeadKind::Symbol && f.args.size() == 2) {
        auto op = infix_spelling(f.head);
        if (!op.empty()) return format(*f.args[0]) + " " + std::string(op) + " " + format(*f.args[1]);
      }
      return f.head + args_text(f.args);
    }
    case Formula::Kind::Not: {
      const Formula& c = *f.children[0];
      return "not " + wrap_if(formula_rank(c) < 3, format(c));
    }
    case Formula::Kind::Implies: {
      const Formula& p = *f.children[0];
      const Formula& c = *f.children[1];
      return wrap_if(formula_rank(p) <= 0, format(p)) + " => " + format(c);
    }
    case Formula::Kind::And:
    case Formula::Kind::Or: {
      int rank = formula_rank(f);
      std::string op = f.kind == Formula::Kind::And ? " and " : " or ";
      std::string out;
      for (std::size_t i = 0; i < f.children.size(); ++i) {
        if (i) out += op;
        out += wrap_if(formula_rank(*f.children[i]) <= rank, format(*f.children[i]));
      }
      return out;
    }
  }
  return {};
}

std::string format(const TermPtr& term) { return format(*term); }
std::string format(const FormulaPtr& formula) { return format(*formula); }

std::string format_table_literal(const FiniteTable& table) {
  std::string out = "{";
  for (std::size_t i = 0; i < table.rows().size(); ++i) {
    if (i) out += ", ";
    out += row_text(table.rows()[i]);
  }
  return out + "}";
}

std::string format(const LogicalModel& m) {
  std::ostringstream out;
  if (!m.name.empty()) out << "model " << m.name << ";\n";
  if (m.tolerance != kDefaultTolerance) out << "tolerance " << Number::decimal(m.tolerance).str() << ";\n";

  const auto scales = m.scales.declared();
  if (!scales.empty()) out << "\n";
  for (const Scale* s : scales) {
    switch (s->kind) {
      case Scale::Kind::Dimensional:
        out << "scale " << s->name << " = dimensional " << s->unit << ";\n";
        break;
      case Scale::Kind::Integer:
        out << "scale " << s->name << " = integer;\n";
        break;
      case Scale::Kind::Scalar: {
        out << "scale " << s->name << " = scalar {";
        for (std::size_t i = 0; i < s->scalars.size(); ++i) out << (i ? ", " : "") << s->scalars[i];
        out << "};\n";
        break;
      }
      case Scale::Kind::IntervalOf:
        out << "scale " << s->name << " = interval of " << s->base << ";\n";
        break;
      case Scale::Kind::Structural:
        out << "structure " << s->name << " {\n";
        for (const auto& [field, scale] : s->fields) out << "  " << field << ": " << scale << ";\n";
        out << "}\n";
        break;
      case Scale::Kind::Symbol:
        break;
    }
  }

  bool first = true;
  for (const Symbol& s : m.signature.declarations()) {
    if (s.builtin) continue;
    if (first) out << "\n";
    first = false;
    const std::string typed = s.result_scale.empty() ? "" : " : " + s.result_scale;
    if (s.level == 0) {
      out << "constant " << s.name << typed << " = " << to_text(m.constants.at(s.name)) << ";\n";
    } else if (s.level == 1) {
      out << "unknown " << s.name;
      if (s.kind == SymbolKind::Objective) {
        out << typed;
      } else {
        out << scale_list(s);
        if (s.kind == SymbolKind::Functional) out << " -> " << s.result_scale;
      }
      out << ";\n";
    } else if (s.kind == SymbolKind::Objective) {
      const Value* v = m.object(s.name);
      out << "parameter " << s.name << typed << " = " << (v ? to_text(*v) : "0")
          << level_suffix(s.level) << ";\n";
    } else {
      out << "relation " << s.name << scale_list(s);
      if (s.kind == SymbolKind::Functional) out << " -> " << s.result_scale;
      out << level_suffix(s.level) << ";\n";
    }
  }

  for (const auto& a : m.facts) {
    for (const auto& [name, table] : a.tables) {
      out << "\ntable " << name << " {\n";
      for (const auto& row : table.rows()) out << "  " << row_text(row) << ";\n";
      out << "}\n";
    }
  }

  if (!m.variables.empty()) out << "\n";
  for (const auto& v : m.variables) {
    out << "variable " << v.name;
    if (v.order != 1) out << " order " << v.order;
    if (v.scale)
      out << " : " << *v.scale;
    else
      out << " in " << value_set(v.values);
    out << ";\n";
  }

  if (!m.formulas.empty()) out << "\n";
  for (const auto& nf : m.formulas) out << "formula " << nf.name << ": " << format(*nf.formula) << ";\n";
  return out.str();
}

std::string format(const TaskSpec& task) {
  std::ostringstream out;
  if (!task.name.empty()) out << "task " << task.name << ";\n";
  for (const auto& d : task.delta) out << "given " << d.name << ": " << format(*d.formula) << ";\n";
  for (const auto& d : task.domains) {
    out << "domain: ";
    for (auto it = d.path.rbegin(); it != d.path.rend(); ++it) out << *it << ".";
    out << d.unknown << " in ";
    if (d.tables.empty() && d.values.empty() && !d.path.empty()) {
      out << "{}";
    } else if (!d.tables.empty()) {
      out << "{";
      for (std::size_t i = 0; i < d.tables.size(); ++i)
        out << (i ? ", " : "") << format_table_literal(d.tables[i]);
      out << "}";
    } else {
      out << value_set(d.values);
    }
    out << ";\n";
  }
  switch (task.psi.kind) {
    case Psi::Kind::None:
      break;
    case Psi::Kind::Require:
      out << "psi: require " << format(*task.psi.condition) << ";\n";
      break;
    case Psi::Kind::Maximize:
      out << "psi: maximize " << format(*task.psi.objective) << ";\n";
      break;
    case Psi::Kind::Minimize:
      out << "psi: minimize " << format(*task.psi.objective) << ";\n";
      break;
  }
  out << "output: ";
  for (std::size_t i = 0; i < task.outputs.size(); ++i) out << (i ? ", " : "") << format(*task.outputs[i]);
  out << ";\n";
  return out.str();
}

std::string format(const Situation& s, const LogicalModel& model) {
  std::ostringstream out;
  out << "situation " << s.name << " {\n";
  out << "  expect: " << to_string(s.expected) << ";\n";
  for (const Symbol& u : model.unknowns()) {
    if (auto it = s.system.objects.find(u.name); it != s.system.objects.end())
      out << "  " << u.name << " = " << to_text(it->second) << ";\n";
    if (auto it = s.system.relations.find(u.name); it != s.system.relations.end())
      out << "  " << u.name << " = " << format_table_literal(it->second) << ";\n";
  }
  CandidateSystem implied = make_candidate(s.system.objects, s.system.relations);
  std::vector<Value> extra;
  for (const auto& v : s.system.universe)
    if (!implied.universe.count(v)) extra.push_back(v);
  if (!extra.empty()) out << "  universe: " << value_set(extra) << ";\n";
  out << "}\n";
  return out.str();
}

std::string format_corpus(const std::vector<Situation>& corpus, const LogicalModel& model) {
  std::string out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (i) out += "\n";
    out += format(corpus[i], model);
  }
  return out;
}

}  // namespace lm
