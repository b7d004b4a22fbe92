#include "random.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "lm/parser.hpp"

namespace lmtest {

using namespace lm;

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
bool coin(Rng& rng, double p) { return std::uniform_real_distribution<double>(0, 1)(rng) < p; }

namespace {

const std::vector<std::string> kNums = {"0", "1", "2", "3"};
const std::vector<std::string> kCols = {"cr", "cg", "cb"};

template <class T>
const T& one_of(Rng& rng, const std::vector<T>& v) {
  return v[pick(rng, v.size())];
}

enum class TableKind { NumToNum, NumColToNum, NumPred, NumToCol };

struct TableDecl {
  std::string name;
  TableKind kind;
};

// Text-level generator; everything it prints is meant to parse and validate.
class ModelWriter {
 public:
  ModelWriter(Rng& rng, const ModelShape& shape) : rng_(rng), shape_(shape) {}

  RandomModel run() {
    RandomModel out;
    std::ostringstream os;
    os << "model rnd;\n";
    os << "scale num = integer;\n";
    os << "scale col = scalar {cr, cg, cb};\n";
    if (shape_.structures) os << "structure pt { a: num; c: col; }\n";

    const int n_obj = 1 + static_cast<int>(pick(rng_, static_cast<std::size_t>(shape_.max_objective)));
    for (int i = 0; i < n_obj; ++i) {
      const bool col = i > 0 && coin(rng_, 0.4);
      std::string name = "x" + std::to_string(i);
      os << "unknown " << name << " : " << (col ? "col" : "num") << ";\n";
      (col ? col_unknowns_ : num_unknowns_).push_back(name);
      out.objective.push_back(name);
    }
    if (shape_.structures) {
      os << "unknown s : pt;\n";
      out.objective.push_back("s");
      out.has_struct = true;
    }
    if (shape_.relation_unknowns && coin(rng_, 0.6)) {
      os << "unknown r(num);\n";
      out.has_relation = relation_ = true;
    }

    const int n_tab = 1 + static_cast<int>(pick(rng_, static_cast<std::size_t>(shape_.max_tables)));
    for (int i = 0; i < n_tab; ++i) {
      TableDecl t{"f" + std::to_string(i), static_cast<TableKind>(pick(rng_, 4))};
      switch (t.kind) {
        case TableKind::NumToNum: os << "relation " << t.name << "(num) -> num;\n"; break;
        case TableKind::NumColToNum: os << "relation " << t.name << "(num, col) -> num;\n"; break;
        case TableKind::NumPred: os << "relation " << t.name << "(num);\n"; break;
        case TableKind::NumToCol: os << "relation " << t.name << "(num) -> col;\n"; break;
      }
      tables_.push_back(t);
    }
    if (shape_.parameters && coin(rng_)) {
      os << "parameter k : num = " << one_of(rng_, kNums) << ";\n";
      param_ = true;
    }
    for (const auto& t : tables_) os << table_text(t);

    os << "variable v : num;\n";
    os << "variable w : col;\n";
    if (shape_.structures) os << "variable u : pt;\n";
    if (shape_.order2_variables && coin(rng_, 0.6)) {
      os << "variable z order 2 in {" << one_of(rng_, kNums) << ", " << one_of(rng_, kNums) << "};\n";
      order2_ = true;
    }

    const int n_form = 1 + static_cast<int>(pick(rng_, static_cast<std::size_t>(shape_.max_formulas)));
    for (int i = 0; i < n_form; ++i)
      os << "formula phi" << i << ": " << formula(static_cast<int>(pick(rng_, 3)), true) << ";\n";

    out.text = os.str();
    out.model = parse_model(out.text, ParseOptions{"<random>", {}});
    out.num_unknowns = num_unknowns_;
    out.col_unknowns = col_unknowns_;
    out.pool = pool(out);
    return out;
  }

  // First-order pieces reused by the task writer.
  std::string formula(int depth, bool higher) {
    if (depth <= 0 || coin(rng_, 0.35)) return atom(higher);
    switch (pick(rng_, 4)) {
      case 0: return "not (" + formula(depth - 1, higher) + ")";
      case 1: return "(" + formula(depth - 1, higher) + " and " + formula(depth - 1, higher) + ")";
      case 2: return "(" + formula(depth - 1, higher) + " or " + formula(depth - 1, higher) + ")";
      default: return "(" + formula(depth - 1, higher) + " => " + formula(depth - 1, higher) + ")";
    }
  }

  std::string num_term(int depth, bool higher) {
    std::vector<std::string> opts = {one_of(rng_, kNums), "v"};
    for (const auto& u : num_unknowns_) opts.push_back(u);
    for (const auto& u : num_unknowns_) opts.push_back(u);
    if (shape_.structures) {
      opts.push_back("a.s");
      opts.push_back("a.u");
    }
    if (higher && param_) opts.push_back("k");
    if (higher && order2_) opts.push_back("z");
    if (depth > 0) {
      opts.push_back("(" + num_term(depth - 1, higher) + " + " + num_term(depth - 1, higher) + ")");
      if (higher) {
        for (const auto& t : tables_) {
          if (t.kind == TableKind::NumToNum) opts.push_back(t.name + "(" + num_term(depth - 1, higher) + ")");
          if (t.kind == TableKind::NumColToNum)
            opts.push_back(t.name + "(" + num_term(depth - 1, higher) + ", " + col_term(depth - 1, higher) + ")");
        }
      }
    }
    return one_of(rng_, opts);
  }

  std::string col_term(int depth, bool higher) {
    std::vector<std::string> opts = {one_of(rng_, kCols), "w"};
    for (const auto& u : col_unknowns_) opts.push_back(u);
    if (shape_.structures) {
      opts.push_back("c.s");
      opts.push_back("c.u");
    }
    if (depth > 0 && higher)
      for (const auto& t : tables_)
        if (t.kind == TableKind::NumToCol) opts.push_back(t.name + "(" + num_term(depth - 1, higher) + ")");
    return one_of(rng_, opts);
  }

  std::string atom(bool higher) {
    const int d = 2;
    std::vector<std::string> opts = {
        num_term(d, higher) + " = " + num_term(d, higher),
        num_term(d, higher) + " < " + num_term(d, higher),
        num_term(d, higher) + " <= " + num_term(d, higher),
        col_term(d, higher) + " = " + col_term(d, higher),
    };
    if (higher)
      for (const auto& t : tables_)
        if (t.kind == TableKind::NumPred) opts.push_back(t.name + "(" + num_term(d, higher) + ")");
    if (relation_) opts.push_back("r(" + num_term(d, higher) + ")");
    return one_of(rng_, opts);
  }

 private:
  std::string table_text(const TableDecl& t) {
    std::ostringstream os;
    os << "table " << t.name << " {\n";
    const int rows = 1 + static_cast<int>(pick(rng_, static_cast<std::size_t>(shape_.max_rows)));
    std::set<std::string> keys;
    for (int i = 0; i < rows * 3 && static_cast<int>(keys.size()) < rows; ++i) {
      std::string key = one_of(rng_, kNums);
      if (t.kind == TableKind::NumColToNum) key += ", " + one_of(rng_, kCols);
      if (!keys.insert(key).second) continue;
      os << "  (" << key << ")";
      if (t.kind == TableKind::NumToNum || t.kind == TableKind::NumColToNum) os << " -> " << one_of(rng_, kNums);
      if (t.kind == TableKind::NumToCol) os << " -> " << one_of(rng_, kCols);
      os << ";\n";
    }
    os << "}\n";
    return os.str();
  }

  std::vector<Value> pool(const RandomModel& m) {
    std::vector<std::string> nums = kNums, cols = kCols;
    std::shuffle(nums.begin(), nums.end(), rng_);
    std::shuffle(cols.begin(), cols.end(), rng_);
    const std::size_t size = 2 + pick(rng_, static_cast<std::size_t>(std::max(1, shape_.max_pool - 1)));
    std::vector<Value> out;
    out.push_back(parse_value(nums[0]));
    if (!m.col_unknowns.empty()) out.push_back(parse_value(cols[0]));
    std::size_t ni = 1, ci = m.col_unknowns.empty() ? 0 : 1;
    while (out.size() < size) {
      if (coin(rng_, 0.7) && ni < nums.size())
        out.push_back(parse_value(nums[ni++]));
      else if (ci < cols.size())
        out.push_back(parse_value(cols[ci++]));
      else
        out.push_back(parse_value(nums[ni++]));
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  Rng& rng_;
  ModelShape shape_;
  std::vector<TableDecl> tables_;
  std::vector<std::string> num_unknowns_, col_unknowns_;
  bool param_ = false, order2_ = false, relation_ = false;

  friend std::string lmtest::random_task_text(Rng&, const RandomModel&);
};

std::string value_set(Rng& rng, const std::vector<std::string>& all, std::size_t n) {
  std::vector<std::string> v = all;
  std::shuffle(v.begin(), v.end(), rng);
  v.resize(std::min(n, v.size()));
  std::string out = "{";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + v[i];
  return out + "}";
}

}  // namespace

RandomModel random_model(Rng& rng, const ModelShape& shape) { return ModelWriter(rng, shape).run(); }

std::string random_task_text(Rng& rng, const RandomModel& m) {
  // Only first-order pieces go into Δ, Ψ and Π; the writer is reused for its term grammar.
  ModelShape shape;
  shape.structures = m.has_struct;
  ModelWriter w(rng, shape);
  w.num_unknowns_ = m.num_unknowns;
  w.col_unknowns_ = m.col_unknowns;
  w.relation_ = m.has_relation;

  std::ostringstream os;
  os << "task rnd;\n";
  std::size_t space = 1;
  auto budget = [&](std::size_t want, std::size_t max) {
    std::size_t n = std::min(want, max);
    while (n > 1 && space * n > 200) --n;
    space *= n;
    return n;
  };
  for (const auto& u : m.num_unknowns) {
    if (coin(rng, 0.15)) {
      os << "given pin_" << u << ": " << u << " = " << one_of(rng, kNums) << ";\n";
    } else if (coin(rng, 0.9)) {
      os << "domain: " << u << " in " << value_set(rng, kNums, budget(1 + pick(rng, 4), 4)) << ";\n";
    }
  }
  for (const auto& u : m.col_unknowns)
    if (coin(rng, 0.9)) os << "domain: " << u << " in " << value_set(rng, kCols, budget(1 + pick(rng, 3), 3)) << ";\n";
  if (m.has_struct) {
    if (coin(rng, 0.2)) {
      os << "given pin_s: s = pt { a: " << one_of(rng, kNums) << ", c: " << one_of(rng, kCols) << " };\n";
    } else {
      os << "domain: a.s in " << value_set(rng, kNums, budget(1 + pick(rng, 4), 4)) << ";\n";
      os << "domain: c.s in " << value_set(rng, kCols, budget(1 + pick(rng, 3), 3)) << ";\n";
    }
  }
  if (m.has_relation) {
    const std::vector<std::string> tables = {"{}", "{(0)}", "{(1)}", "{(0), (1)}", "{(2), (3)}"};
    os << "domain: r in " << value_set(rng, tables, budget(1 + pick(rng, 3), tables.size())) << ";\n";
  }
  const std::size_t n_delta = pick(rng, 3);
  for (std::size_t i = 0; i < n_delta; ++i) {
    std::string f;
    // Δ must mention an unknown; retry a few times, then fall back to a trivial one.
    for (int tries = 0; tries < 20 && f.empty(); ++tries) {
      std::string cand = w.formula(static_cast<int>(pick(rng, 2)), false);
      bool mentions = false;
      for (const auto& u : m.objective) mentions |= cand.find(u) != std::string::npos;
      if (m.has_relation) mentions |= cand.find("r(") != std::string::npos;
      if (mentions) f = cand;
    }
    if (f.empty()) f = m.objective.front() + " = " + m.objective.front();
    os << "given d" << i << ": " << f << ";\n";
  }
  switch (pick(rng, 4)) {
    case 0: os << "psi: none;\n"; break;
    case 1: os << "psi: require " << w.formula(1, false) << ";\n"; break;
    case 2:
      if (!m.num_unknowns.empty()) {
        os << "psi: maximize " << w.num_term(1, false) << ";\n";
        break;
      }
      [[fallthrough]];
    default:
      if (!m.num_unknowns.empty()) os << "psi: minimize " << m.num_unknowns.front() << ";\n";
      break;
  }
  os << "output: ";
  for (std::size_t i = 0; i < m.objective.size(); ++i) os << (i ? ", " : "") << m.objective[i];
  if (!m.num_unknowns.empty() && coin(rng, 0.3)) os << ", " << m.num_unknowns.front() << " + 1";
  os << ";\n";
  return os.str();
}

// ---- AST vocabulary ------------------------------------------------------------

const LogicalModel& ast_vocabulary() {
  static const LogicalModel m = parse_model(R"(
model vocab;
scale num = integer;
scale len = dimensional mm;
scale span = interval of len;
scale col = scalar {red, green, blue};
structure part { size: len; colour: col; }
structure assembly { main: part; count: num; }
unknown n : num;
unknown q : len;
unknown p : part;
unknown a : assembly;
unknown rel(num) -> num;
relation f(num) -> num;
relation h(num, col) -> num;
relation lim(col) -> span;
relation ok(num);
relation f2(num) -> num level 3;
parameter k : num = 2;
variable i : num;
variable c : col;
variable pv : part;
variable g order 2 in {@rel};
variable z order 3 in {@f};
table f { (1) -> 2; }
table h { (1, red) -> 3; }
table lim { (red) -> [1, 2] mm; }
table ok { (1); }
table f2 { (1) -> 1; }
)");
  return m;
}

namespace {

std::string random_name_scalar(Rng& rng) { return one_of(rng, std::vector<std::string>{"red", "green", "blue"}); }

Value random_number(Rng& rng) {
  switch (pick(rng, 4)) {
    case 0: return parse_value(std::to_string(static_cast<int>(pick(rng, 50))));
    case 1: return parse_value("-" + std::to_string(1 + pick(rng, 9)));
    case 2: return parse_value(std::to_string(1 + pick(rng, 9)) + "/" + std::to_string(2 + pick(rng, 7)));
    default: return Value(Number::decimal(static_cast<double>(pick(rng, 10000)) / 64.0 + 0.5));
  }
}

// Scale-directed construction so the parser's typing accepts the result.
TermPtr term_of(Rng& rng, const LogicalModel& m, const std::string& scale, int depth);

TermPtr num_leaf(Rng& rng) {
  switch (pick(rng, 4)) {
    case 0: return ast::sym("n");
    case 1: return ast::var("i");
    case 2: return ast::sym("k");
    default: return ast::lit(random_number(rng));
  }
}

TermPtr term_of(Rng& rng, const LogicalModel& m, const std::string& scale, int depth) {
  const bool deep = depth > 0;
  if (scale == "num") {
    if (!deep) return num_leaf(rng);
    switch (pick(rng, 10)) {
      case 0: return ast::apply("f", {term_of(rng, m, "num", depth - 1)});
      case 1: return ast::apply("h", {term_of(rng, m, "num", depth - 1), term_of(rng, m, "col", depth - 1)});
      case 2: return ast::apply("g", {term_of(rng, m, "num", depth - 1)}, HeadKind::Variable);
      case 3: return ast::apply("rel", {term_of(rng, m, "num", depth - 1)});
      case 4: {
        static const std::vector<std::string> ops = {"plus", "minus", "times", "div", "min", "max"};
        return ast::apply(one_of(rng, ops), {term_of(rng, m, "num", depth - 1), term_of(rng, m, "num", depth - 1)});
      }
      case 5: return ast::apply(coin(rng) ? "neg" : "abs", {term_of(rng, m, "num", depth - 1)});
      case 6: return ast::field("count", ast::sym("a"));
      case 7:
        if (coin(rng)) return ast::apply("z", {term_of(rng, m, "num", depth - 1)}, HeadKind::Variable);
        return ast::apply("f2", {term_of(rng, m, "num", depth - 1)});
      default: return num_leaf(rng);
    }
  }
  if (scale == "len") {
    switch (pick(rng, deep ? 6 : 3)) {
      case 0: return ast::sym("q");
      case 1: return ast::field("size", coin(rng) ? ast::sym("p") : ast::var("pv"));
      case 2: return ast::field_chain({"size", "main"}, ast::sym("a"));
      case 3: return ast::apply(coin(rng) ? "lower" : "upper", {term_of(rng, m, "span", depth - 1)});
      case 4: return ast::apply("midpoint", {term_of(rng, m, "span", depth - 1)});
      default: return ast::apply("plus", {term_of(rng, m, "len", depth - 1), term_of(rng, m, "len", depth - 1)});
    }
  }
  if (scale == "span") {
    if (deep && coin(rng)) return ast::apply("lim", {term_of(rng, m, "col", depth - 1)});
    return ast::lit(parse_value("[" + std::to_string(pick(rng, 5)) + ", " + std::to_string(5 + pick(rng, 5)) + "] mm"));
  }
  if (scale == "col") {
    switch (pick(rng, 4)) {
      case 0: return ast::var("c");
      case 1: return ast::field("colour", ast::sym("p"));
      case 2: return ast::field_chain({"colour", "main"}, ast::sym("a"));
      default: return ast::lit(Value::scalar(random_name_scalar(rng)));
    }
  }
  // part
  if (coin(rng)) return coin(rng) ? ast::sym("p") : ast::var("pv");
  return ast::lit(parse_value("part { size: " + std::to_string(pick(rng, 9)) + ", colour: " + random_name_scalar(rng) + " }", m));
}

FormulaPtr atom_of(Rng& rng, const LogicalModel& m, int depth) {
  static const std::vector<std::string> cmp = {"eq", "lt", "le", "gt", "ge"};
  switch (pick(rng, 7)) {
    case 0: return ast::atom(one_of(rng, cmp), {term_of(rng, m, "num", depth), term_of(rng, m, "num", depth)});
    case 1: return ast::atom(one_of(rng, cmp), {term_of(rng, m, "len", depth), term_of(rng, m, "len", depth)});
    case 2: return ast::atom("member", {term_of(rng, m, "len", depth), term_of(rng, m, "span", depth)});
    case 3: return ast::eq(term_of(rng, m, "col", depth), term_of(rng, m, "col", depth));
    case 4: return ast::atom("ok", {term_of(rng, m, "num", depth)});
    case 5: return ast::eq(term_of(rng, m, "part", depth), term_of(rng, m, "part", depth));
    default: return coin(rng) ? ast::truth() : ast::falsity();
  }
}

}  // namespace

TermPtr random_term_ast(Rng& rng, const LogicalModel& m, int depth) {
  static const std::vector<std::string> scales = {"num", "len", "span", "col", "part"};
  return term_of(rng, m, one_of(rng, scales), depth);
}

FormulaPtr random_formula_ast(Rng& rng, const LogicalModel& m, int depth) {
  if (depth <= 0 || coin(rng, 0.3)) return atom_of(rng, m, static_cast<int>(pick(rng, 3)));
  switch (pick(rng, 4)) {
    case 0: return ast::negate(random_formula_ast(rng, m, depth - 1));
    case 1:
    case 2: {
      std::vector<FormulaPtr> parts;
      const std::size_t n = 2 + pick(rng, 2);
      for (std::size_t i = 0; i < n; ++i) parts.push_back(random_formula_ast(rng, m, depth - 1));
      return pick(rng, 2) ? ast::conj(std::move(parts)) : ast::disj(std::move(parts));
    }
    default: return ast::implies(random_formula_ast(rng, m, depth - 1), random_formula_ast(rng, m, depth - 1));
  }
}

}  // namespace lmtest
