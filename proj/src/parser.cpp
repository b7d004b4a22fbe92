#include "lm/parser.hpp"

#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>
#include <unordered_map>

namespace lm {

namespace {

// ---------------------------------------------------------------------------
// Lexer

struct Token {
  enum class Kind { Ident, Int, Decimal, Rational, String, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  SourcePos pos;
};

const std::set<std::string> kReserved = {"and", "or", "not", "in", "true", "false",
                                         "forall", "exists", "pi"};

bool is_ident_start(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_';
}
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
 public:
  Lexer(std::string_view text, std::string file) : text_(text), file_(std::move(file)) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    for (;;) {
      skip_space();
      Token t;
      t.pos = here();
      if (i_ >= text_.size()) {
        t.kind = Token::Kind::End;
        out.push_back(std::move(t));
        return out;
      }
      char c = text_[i_];
      if (is_ident_start(c)) {
        std::size_t start = i_;
        while (i_ < text_.size() && is_ident_char(text_[i_])) advance();
        t.kind = Token::Kind::Ident;
        t.text = std::string(text_.substr(start, i_ - start));
      } else if (is_digit(c)) {
        lex_number(t);
      } else if (c == '"') {
        lex_string(t);
      } else if (static_cast<unsigned char>(c) >= 0x80) {
        lex_unicode(t);
      } else {
        lex_punct(t);
      }
      out.push_back(std::move(t));
    }
  }

 private:
  SourcePos here() const { return SourcePos{file_, line_, col_}; }

  void advance() {
    if (text_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void skip_space() {
    while (i_ < text_.size()) {
      char c = text_[i_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '#') {
        while (i_ < text_.size() && text_[i_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  void lex_number(Token& t) {
    std::size_t start = i_;
    while (i_ < text_.size() && is_digit(text_[i_])) advance();
    bool decimal = false;
    if (i_ + 1 < text_.size() && text_[i_] == '.' && is_digit(text_[i_ + 1])) {
      decimal = true;
      advance();
      while (i_ < text_.size() && is_digit(text_[i_])) advance();
    }
    if (i_ < text_.size() && (text_[i_] == 'e' || text_[i_] == 'E')) {
      std::size_t k = i_ + 1;
      if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
      if (k < text_.size() && is_digit(text_[k])) {
        decimal = true;
        while (i_ < k) advance();
        while (i_ < text_.size() && is_digit(text_[i_])) advance();
      }
    }
    if (!decimal && i_ + 1 < text_.size() && text_[i_] == '/' && is_digit(text_[i_ + 1])) {
      advance();
      while (i_ < text_.size() && is_digit(text_[i_])) advance();
      t.kind = Token::Kind::Rational;
    } else {
      t.kind = decimal ? Token::Kind::Decimal : Token::Kind::Int;
    }
    t.text = std::string(text_.substr(start, i_ - start));
    if (i_ < text_.size() && is_ident_start(text_[i_]))
      throw Error(ErrorCode::SyntaxError, "malformed number '" + t.text + text_[i_] + "'", here());
  }

  void lex_string(Token& t) {
    advance();
    std::size_t start = i_;
    while (i_ < text_.size() && text_[i_] != '"' && text_[i_] != '\n') advance();
    if (i_ >= text_.size() || text_[i_] != '"')
      throw Error(ErrorCode::SyntaxError, "unterminated string", t.pos);
    t.kind = Token::Kind::String;
    t.text = std::string(text_.substr(start, i_ - start));
    advance();
  }

  void lex_unicode(Token& t) {
    auto match = [&](std::string_view seq) { return text_.substr(i_, seq.size()) == seq; };
    auto take = [&](std::size_t n) {
      for (std::size_t k = 0; k < n; ++k) advance();
    };
    if (match("∀") || match("∃"))
      throw Error(ErrorCode::QuantifierRejected, "quantifiers are not allowed", t.pos);
    if (match("∈")) {  // element-of
      take(3);
      t.kind = Token::Kind::Ident;
      t.text = "in";
      return;
    }
    if (match("×")) {
      take(2);
      t.kind = Token::Kind::Punct;
      t.text = "*";
      return;
    }
    if (match("≤") || match("≥")) {
      t.kind = Token::Kind::Punct;
      t.text = match("≤") ? "<=" : ">=";
      take(3);
      return;
    }
    throw Error(ErrorCode::SyntaxError, "unexpected byte in input", t.pos);
  }

  void lex_punct(Token& t) {
    auto two = text_.substr(i_, 2);
    t.kind = Token::Kind::Punct;
    for (std::string_view p : {"<=", ">=", "->", "=>"}) {
      if (two == p) {
        t.text = std::string(p);
        advance();
        advance();
        return;
      }
    }
    char c = text_[i_];
    static const std::string singles = "(){}[],;:.@=<>+-*/";
    if (singles.find(c) == std::string::npos) {
      std::string shown = (c >= 0x20 && c < 0x7f) ? std::string(1, c) : "\\x" + std::to_string(static_cast<int>(static_cast<unsigned char>(c)));
      throw Error(ErrorCode::SyntaxError, "unexpected character '" + shown + "'", t.pos);
    }
    t.text = std::string(1, c);
    advance();
  }

  std::string_view text_;
  std::string file_;
  std::size_t i_ = 0;
  std::uint32_t line_ = 1;
  std::uint32_t col_ = 1;
};

// ---------------------------------------------------------------------------
// Raw declarations collected in the first pass.

struct RawRow {
  std::vector<Value> args;
  std::optional<Value> result;
  SourcePos pos;
};

struct RawTable {
  std::string name;
  std::vector<RawRow> rows;
  std::optional<std::string> file;
  SourcePos pos;
};

struct RawSymbol {
  Symbol symbol;
  std::optional<Value> value;
  SourcePos pos;
};

struct RawVariable {
  VariableDecl decl;
  SourcePos pos;
};

struct RawDocument {
  std::string name;
  std::vector<std::pair<Scale, SourcePos>> scales;
  std::vector<RawSymbol> symbols;
  std::vector<RawTable> tables;
  std::vector<RawVariable> variables;
  std::vector<NamedFormula> formulas;
  std::optional<double> tolerance;
};

constexpr int kMaxDepth = 200;

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::vector<Token> tokens, std::unordered_map<const void*, SourcePos>* positions)
      : toks_(std::move(tokens)), positions_(positions) {}

  bool at_end() const { return peek().kind == Token::Kind::End; }
  const Token& peek(std::size_t ahead = 0) const {
    std::size_t k = std::min(i_ + ahead, toks_.size() - 1);
    return toks_[k];
  }
  const Token& next() {
    const Token& t = toks_[i_];
    if (i_ + 1 < toks_.size()) ++i_;
    return t;
  }
  SourcePos pos() const { return peek().pos; }

  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Punct && t.text == p;
  }
  bool is_word(std::string_view w, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == Token::Kind::Ident && t.text == w;
  }
  bool accept_punct(std::string_view p) {
    if (!is_punct(p)) return false;
    next();
    return true;
  }
  bool accept_word(std::string_view w) {
    if (!is_word(w)) return false;
    next();
    return true;
  }

  [[noreturn]] void fail(const std::string& what) const {
    const Token& t = peek();
    std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw Error(ErrorCode::SyntaxError, "expected " + what + ", found " + found, t.pos);
  }

  void expect_punct(std::string_view p) {
    if (!accept_punct(p)) fail("'" + std::string(p) + "'");
  }
  void expect_word(std::string_view w) {
    if (!accept_word(w)) fail("'" + std::string(w) + "'");
  }

  std::string expect_name(const std::string& what = "a name") {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail(what);
    if (t.text == "forall" || t.text == "exists")
      throw Error(ErrorCode::QuantifierRejected, "quantifiers are not allowed", t.pos);
    if (kReserved.count(t.text))
      throw Error(ErrorCode::SyntaxError, "'" + t.text + "' is a reserved word", t.pos);
    return next().text;
  }

  int expect_int() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Int) fail("an integer");
    if (t.text.size() > 6) throw Error(ErrorCode::SyntaxError, "integer too large", t.pos);
    return std::stoi(next().text);
  }

  // ---- values -----------------------------------------------------------

  bool starts_number() const {
    const Token& t = peek();
    return t.kind == Token::Kind::Int || t.kind == Token::Kind::Decimal ||
           t.kind == Token::Kind::Rational;
  }

  Number number_token() {
    const Token& t = next();
    try {
      switch (t.kind) {
        case Token::Kind::Int:
          return Number::exact(Rational(boost::multiprecision::cpp_int(t.text)));
        case Token::Kind::Rational: {
          auto slash = t.text.find('/');
          boost::multiprecision::cpp_int num(t.text.substr(0, slash));
          boost::multiprecision::cpp_int den(t.text.substr(slash + 1));
          if (den == 0) throw Error(ErrorCode::SyntaxError, "zero denominator", t.pos);
          return Number::exact(Rational(num, den));
        }
        case Token::Kind::Decimal: {
          char* end = nullptr;
          double d = std::strtod(t.text.c_str(), &end);
          return Number::decimal(d);
        }
        default:
          break;
      }
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      throw Error(ErrorCode::SyntaxError, "number '" + t.text + "' is out of range", t.pos);
    }
    throw Error(ErrorCode::SyntaxError, "expected a number", t.pos);
  }

  Number parse_signed_number() {
    bool negative = accept_punct("-");
    Number n;
    if (accept_word("pi")) {
      n = Number::decimal(std::numbers::pi);
    } else if (starts_number()) {
      n = number_token();
    } else {
      fail("a number");
    }
    return negative ? n.negated() : n;
  }

  Value parse_interval_value() {
    SourcePos at = pos();
    expect_punct("[");
    Number lo = parse_signed_number();
    expect_punct(",");
    Number hi = parse_signed_number();
    expect_punct("]");
    std::string unit;
    if (peek().kind == Token::Kind::Ident && !kReserved.count(peek().text)) unit = next().text;
    if (lo.compare(hi) > 0)
      throw Error(ErrorCode::ScaleMismatch, "interval lower bound exceeds upper bound", at);
    return Value::interval(std::move(lo), std::move(hi), std::move(unit));
  }

  Value parse_composite_value(std::string structure) {
    expect_punct("{");
    std::vector<std::string> names;
    std::vector<Value> values;
    if (!is_punct("}")) {
      do {
        names.push_back(expect_name("a field name"));
        expect_punct(":");
        values.push_back(parse_value_expr());
      } while (accept_punct(","));
    }
    expect_punct("}");
    return Value::composite(std::move(structure), std::move(names), std::move(values));
  }

  Value parse_value_expr() {
    Depth guard(*this);
    const Token& t = peek();
    if (is_punct("-") || starts_number() || is_word("pi")) return Value(parse_signed_number());
    if (is_punct("[")) return parse_interval_value();
    if (accept_punct("@")) return Value::symbol(expect_name("a symbol name"));
    if (t.kind == Token::Kind::Ident) {
      std::string name = expect_name("a value");
      if (is_punct("{")) return parse_composite_value(std::move(name));
      return Value::scalar(std::move(name));
    }
    fail("a value");
  }

  std::vector<Value> parse_value_set() {
    expect_punct("{");
    std::vector<Value> out;
    if (!is_punct("}")) {
      do {
        out.push_back(parse_value_expr());
      } while (accept_punct(","));
    }
    expect_punct("}");
    return out;
  }

  RawRow parse_row() {
    RawRow row;
    row.pos = pos();
    expect_punct("(");
    if (!is_punct(")")) {
      do {
        row.args.push_back(parse_value_expr());
      } while (accept_punct(","));
    }
    expect_punct(")");
    if (accept_punct("->")) row.result = parse_value_expr();
    return row;
  }

  /// `{ (a, b) -> c, (d, e) -> f }`
  std::vector<RawRow> parse_table_literal() {
    expect_punct("{");
    std::vector<RawRow> rows;
    if (!is_punct("}")) {
      do {
        rows.push_back(parse_row());
      } while (accept_punct(","));
    }
    expect_punct("}");
    return rows;
  }

  // ---- terms --------------------------------------------------------------

  struct Depth {
    explicit Depth(Parser& p) : p_(p) {
      if (++p_.depth_ > kMaxDepth)
        throw Error(ErrorCode::SyntaxError, "expression nested too deeply", p_.pos());
    }
    ~Depth() { --p_.depth_; }
    Parser& p_;
  };

  TermPtr mark(TermPtr t, const SourcePos& at) {
    if (positions_) (*positions_)[t.get()] = at;
    return t;
  }

  TermPtr parse_term() {
    Depth guard(*this);
    SourcePos at = pos();
    TermPtr lhs = parse_multiplicative();
    while (is_punct("+") || is_punct("-")) {
      std::string op = next().text == "+" ? "plus" : "minus";
      TermPtr rhs = parse_multiplicative();
      lhs = mark(ast::apply(op, {lhs, rhs}), at);
    }
    return lhs;
  }

  TermPtr parse_multiplicative() {
    SourcePos at = pos();
    TermPtr lhs = parse_unary();
    while (is_punct("*") || is_punct("/")) {
      std::string op = next().text == "*" ? "times" : "div";
      TermPtr rhs = parse_unary();
      lhs = mark(ast::apply(op, {lhs, rhs}), at);
    }
    return lhs;
  }

  TermPtr parse_unary() {
    Depth guard(*this);
    SourcePos at = pos();
    if (is_punct("-")) {
      const Token& after = peek(1);
      bool literal = after.kind == Token::Kind::Int || after.kind == Token::Kind::Decimal ||
                     after.kind == Token::Kind::Rational;
      if (literal) return mark(ast::lit(Value(parse_signed_number())), at);
      next();
      return mark(ast::apply("neg", {parse_unary()}), at);
    }
    return parse_primary();
  }

  TermPtr parse_primary() {
    Depth guard(*this);
    SourcePos at = pos();
    const Token& t = peek();
    if (starts_number()) return mark(ast::lit(Value(number_token())), at);
    if (is_punct("[")) return mark(ast::lit(parse_interval_value()), at);
    if (accept_punct("@")) return mark(ast::lit(Value::symbol(expect_name("a symbol name"))), at);
    if (accept_punct("(")) {
      TermPtr inner = parse_term();
      expect_punct(")");
      return inner;
    }
    if (t.kind != Token::Kind::Ident) fail("a term");
    if (t.text == "pi") {
      next();
      return mark(ast::sym("pi"), at);
    }
    std::string name = expect_name("a term");
    if (is_punct("(")) {
      next();
      std::vector<TermPtr> args;
      if (!is_punct(")")) {
        do {
          args.push_back(parse_term());
        } while (accept_punct(","));
      }
      expect_punct(")");
      TermPtr app = mark(ast::apply(std::move(name), std::move(args)), at);
      prefix_apps_.insert(app.get());
      return app;
    }
    if (accept_punct(".")) return mark(ast::field(std::move(name), parse_primary()), at);
    if (is_punct("{")) return mark(ast::lit(parse_composite_value(std::move(name))), at);
    return mark(ast::sym(std::move(name)), at);
  }

  // ---- formulas -----------------------------------------------------------

  FormulaPtr parse_formula() {
    Depth guard(*this);
    FormulaPtr lhs = parse_disjunction();
    if (accept_punct("=>")) return ast::implies(lhs, parse_formula());
    return lhs;
  }

  FormulaPtr parse_disjunction() {
    std::vector<FormulaPtr> parts{parse_conjunction()};
    while (accept_word("or")) parts.push_back(parse_conjunction());
    return ast::disj(std::move(parts));
  }

  FormulaPtr parse_conjunction() {
    std::vector<FormulaPtr> parts{parse_negation()};
    while (accept_word("and")) parts.push_back(parse_negation());
    return ast::conj(std::move(parts));
  }

  FormulaPtr parse_negation() {
    Depth guard(*this);
    if (accept_word("not")) return ast::negate(parse_negation());
    return parse_atom();
  }

  bool is_relop(std::size_t ahead = 0) const {
    for (std::string_view op : {"=", "<", "<=", ">", ">="})
      if (is_punct(op, ahead)) return true;
    return is_word("in", ahead);
  }

  /// At '(' decide whether the parenthesis groups a formula or a term.
  bool paren_groups_formula() const {
    std::size_t depth = 0;
    std::size_t k = i_;
    for (; k < toks_.size(); ++k) {
      const Token& t = toks_[k];
      if (t.kind == Token::Kind::End) return true;
      if (t.kind == Token::Kind::Punct && (t.text == "(" || t.text == "[" || t.text == "{")) ++depth;
      if (t.kind == Token::Kind::Punct && (t.text == ")" || t.text == "]" || t.text == "}")) {
        if (--depth == 0) break;
      }
    }
    std::size_t after = k + 1 - i_;
    if (is_relop(after)) return false;
    for (std::string_view op : {"+", "-", "*", "/"})
      if (is_punct(op, after)) return false;
    return true;
  }

  FormulaPtr parse_atom() {
    Depth guard(*this);
    SourcePos at = pos();
    if (is_word("forall") || is_word("exists"))
      throw Error(ErrorCode::QuantifierRejected, "quantifiers are not allowed", at);
    if (accept_word("true")) return ast::truth();
    if (accept_word("false")) return ast::falsity();
    if (is_punct("(") && paren_groups_formula()) {
      next();
      FormulaPtr inner = parse_formula();
      expect_punct(")");
      return inner;
    }
    TermPtr lhs = parse_term();
    if (is_relop()) {
      const Token& op = next();
      static const std::unordered_map<std::string, std::string> heads = {
          {"=", "eq"}, {"<", "lt"}, {"<=", "le"}, {">", "gt"}, {">=", "ge"}, {"in", "member"}};
      TermPtr rhs = parse_term();
      auto f = ast::atom(heads.at(op.text), {lhs, rhs});
      if (positions_) (*positions_)[f.get()] = at;
      return f;
    }
    if (lhs->kind == Term::Kind::Apply && prefix_apps_.count(lhs.get())) {
      auto f = ast::atom(lhs->name, lhs->args);
      if (positions_) (*positions_)[f.get()] = at;
      return f;
    }
    fail("a comparison or predicate application");
  }

  // ---- model document ---------------------------------------------------------

  RawDocument parse_model_document(RawDocument doc = {}) {
    while (!at_end()) parse_model_statement(doc);
    return doc;
  }

  std::vector<std::string> parse_scale_list() {
    std::vector<std::string> out;
    expect_punct("(");
    if (!is_punct(")")) {
      do {
        out.push_back(expect_name("a scale name"));
      } while (accept_punct(","));
    }
    expect_punct(")");
    return out;
  }

  int parse_level_suffix(int fallback) {
    if (!accept_word("level")) return fallback;
    SourcePos at = pos();
    int level = expect_int();
    if (level < 2)
      throw Error(ErrorCode::LevelViolation, "parameter levels start at 2", at);
    return level;
  }

  void parse_model_statement(RawDocument& doc) {
    SourcePos at = pos();
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) fail("a declaration");
    const std::string kw = t.text;
    if (kw == "forall" || kw == "exists")
      throw Error(ErrorCode::QuantifierRejected, "quantifiers are not allowed", at);
    next();
    if (kw == "model") {
      doc.name = expect_name();
      expect_punct(";");
    } else if (kw == "tolerance") {
      Number n = parse_signed_number();
      if (n.as_double() <= 0) throw Error(ErrorCode::SyntaxError, "tolerance must be positive", at);
      doc.tolerance = n.as_double();
      expect_punct(";");
    } else if (kw == "scale") {
      Scale s;
      s.name = expect_name("a scale name");
      expect_punct("=");
      if (accept_word("dimensional")) {
        s.kind = Scale::Kind::Dimensional;
        s.unit = expect_name("a unit");
      } else if (accept_word("integer")) {
        s.kind = Scale::Kind::Integer;
      } else if (accept_word("scalar")) {
        s.kind = Scale::Kind::Scalar;
        expect_punct("{");
        do {
          s.scalars.push_back(expect_name("a scalar value"));
        } while (accept_punct(","));
        expect_punct("}");
      } else if (accept_word("interval")) {
        s.kind = Scale::Kind::IntervalOf;
        expect_word("of");
        s.base = expect_name("a scale name");
      } else {
        fail("'dimensional', 'integer', 'scalar' or 'interval'");
      }
      expect_punct(";");
      doc.scales.emplace_back(std::move(s), at);
    } else if (kw == "structure") {
      Scale s;
      s.kind = Scale::Kind::Structural;
      s.name = expect_name("a structure name");
      expect_punct("{");
      while (!is_punct("}")) {
        std::string field = expect_name("a field name");
        expect_punct(":");
        std::string scale = expect_name("a scale name");
        expect_punct(";");
        s.fields.emplace_back(std::move(field), std::move(scale));
      }
      expect_punct("}");
      accept_punct(";");
      doc.scales.emplace_back(std::move(s), at);
    } else if (kw == "constant") {
      RawSymbol r;
      r.pos = at;
      r.symbol.name = expect_name();
      r.symbol.level = 0;
      if (accept_punct(":")) r.symbol.result_scale = expect_name("a scale name");
      expect_punct("=");
      r.value = parse_value_expr();
      expect_punct(";");
      doc.symbols.push_back(std::move(r));
    } else if (kw == "unknown" || kw == "relation") {
      RawSymbol r;
      r.pos = at;
      r.symbol.name = expect_name();
      r.symbol.level = kw == "unknown" ? 1 : 2;
      if (kw == "unknown" && accept_punct(":")) {
        r.symbol.kind = SymbolKind::Objective;
        r.symbol.result_scale = expect_name("a scale name");
      } else {
        r.symbol.arg_scales = parse_scale_list();
        r.symbol.arity = static_cast<int>(r.symbol.arg_scales.size());
        if (accept_punct("->")) {
          r.symbol.kind = SymbolKind::Functional;
          r.symbol.result_scale = expect_name("a scale name");
        } else {
          r.symbol.kind = SymbolKind::Predicate;
        }
      }
      if (kw == "relation") r.symbol.level = parse_level_suffix(2);
      expect_punct(";");
      doc.symbols.push_back(std::move(r));
    } else if (kw == "parameter") {
      RawSymbol r;
      r.pos = at;
      r.symbol.name = expect_name();
      r.symbol.kind = SymbolKind::Objective;
      if (accept_punct(":")) r.symbol.result_scale = expect_name("a scale name");
      expect_punct("=");
      r.value = parse_value_expr();
      r.symbol.level = parse_level_suffix(2);
      expect_punct(";");
      doc.symbols.push_back(std::move(r));
    } else if (kw == "table") {
      RawTable tab;
      tab.pos = at;
      tab.name = expect_name("a relation name");
      if (accept_word("from")) {
        if (peek().kind != Token::Kind::String) fail("a quoted file name");
        tab.file = next().text;
        expect_punct(";");
      } else {
        expect_punct("{");
        while (!is_punct("}")) {
          tab.rows.push_back(parse_row());
          expect_punct(";");
        }
        expect_punct("}");
        accept_punct(";");
      }
      doc.tables.push_back(std::move(tab));
    } else if (kw == "variable") {
      RawVariable v;
      v.pos = at;
      v.decl.name = expect_name("a variable name");
      if (accept_word("order")) v.decl.order = expect_int();
      if (accept_punct(":")) {
        v.decl.scale = expect_name("a scale name");
      } else if (accept_word("in")) {
        v.decl.values = parse_value_set();
      } else {
        fail("':' or 'in'");
      }
      expect_punct(";");
      doc.variables.push_back(std::move(v));
    } else if (kw == "formula") {
      NamedFormula nf;
      nf.pos = at;
      nf.name = expect_name("a formula name");
      expect_punct(":");
      nf.formula = parse_formula();
      expect_punct(";");
      doc.formulas.push_back(std::move(nf));
    } else {
      throw Error(ErrorCode::SyntaxError, "unknown declaration '" + kw + "'", at);
    }
  }

  // ---- task document ----------------------------------------------------------

  struct RawDomain {
    std::vector<std::string> path;  // as written, outermost first, unknown last
    std::vector<Value> values;
    std::vector<std::vector<RawRow>> tables;
    SourcePos pos;
  };

  struct RawTask {
    std::string name;
    std::vector<NamedFormula> delta;
    Psi psi;
    std::vector<TermPtr> outputs;
    std::vector<RawDomain> domains;
    bool saw_output = false;
  };

  RawTask parse_task_document(const LogicalModel& model) {
    RawTask task;
    int unnamed = 0;
    while (!at_end()) {
      SourcePos at = pos();
      if (peek().kind != Token::Kind::Ident) fail("a task clause");
      std::string kw = next().text;
      if (kw == "forall" || kw == "exists")
        throw Error(ErrorCode::QuantifierRejected, "quantifiers are not allowed", at);
      if (kw == "task") {
        task.name = expect_name();
        expect_punct(";");
      } else if (kw == "given") {
        NamedFormula nf;
        nf.pos = at;
        ++unnamed;
        if (peek().kind == Token::Kind::Ident && is_punct(":", 1)) {
          nf.name = expect_name("a formula name");
        } else {
          nf.name = "delta" + std::to_string(unnamed);
        }
        expect_punct(":");
        nf.formula = parse_formula();
        expect_punct(";");
        task.delta.push_back(std::move(nf));
      } else if (kw == "domain") {
        RawDomain d;
        d.pos = at;
        expect_punct(":");
        d.path.push_back(expect_name("an unknown or field name"));
        while (accept_punct(".")) d.path.push_back(expect_name("an unknown or field name"));
        expect_word("in");
        const Symbol* s = model.symbol(d.path.back());
        if (s && s->level == 1 && s->kind != SymbolKind::Objective) {
          expect_punct("{");
          if (!is_punct("}")) {
            do {
              d.tables.push_back(parse_table_literal());
            } while (accept_punct(","));
          }
          expect_punct("}");
        } else {
          d.values = parse_value_set();
        }
        expect_punct(";");
        task.domains.push_back(std::move(d));
      } else if (kw == "psi") {
        expect_punct(":");
        if (accept_word("none")) {
          task.psi = Psi{};
        } else if (accept_word("require")) {
          task.psi.kind = Psi::Kind::Require;
          task.psi.condition = parse_formula();
        } else if (accept_word("maximize") || accept_word("minimize")) {
          task.psi.kind = toks_[i_ - 1].text == "maximize" ? Psi::Kind::Maximize : Psi::Kind::Minimize;
          task.psi.objective = parse_term();
        } else {
          fail("'none', 'require', 'maximize' or 'minimize'");
        }
        expect_punct(";");
      } else if (kw == "output") {
        expect_punct(":");
        task.saw_output = true;
        do {
          task.outputs.push_back(parse_term());
        } while (accept_punct(","));
        expect_punct(";");
      } else {
        throw Error(ErrorCode::SyntaxError, "unknown task clause '" + kw + "'", at);
      }
    }
    return task;
  }

  // ---- corpus document --------------------------------------------------------

  struct RawSituation {
    std::string name;
    std::optional<Situation::Expectation> expected;
    std::vector<std::pair<std::string, Value>> objects;
    std::vector<std::pair<std::string, std::vector<RawRow>>> relations;
    std::vector<Value> universe;
    SourcePos pos;
  };

  std::vector<RawSituation> parse_corpus_document(const LogicalModel& model) {
    std::vector<RawSituation> out;
    while (!at_end()) {
      RawSituation s;
      s.pos = pos();
      expect_word("situation");
      s.name = expect_name("a situation name");
      expect_punct("{");
      while (!is_punct("}")) {
        SourcePos at = pos();
        if (accept_word("expect")) {
          expect_punct(":");
          if (accept_word("adequate")) {
            s.expected = Situation::Expectation::Adequate;
          } else if (accept_word("violating")) {
            s.expected = Situation::Expectation::Violating;
          } else {
            fail("'adequate' or 'violating'");
          }
        } else if (accept_word("universe")) {
          expect_punct(":");
          auto extra = parse_value_set();
          s.universe.insert(s.universe.end(), extra.begin(), extra.end());
        } else {
          std::string name = expect_name("an unknown name");
          expect_punct("=");
          const Symbol* sym = model.symbol(name);
          if (!sym || sym->level != 1)
            throw Error(ErrorCode::UnknownSymbol, "'" + name + "' is not an unknown", at);
          if (sym->kind == SymbolKind::Objective) {
            s.objects.emplace_back(name, parse_value_expr());
          } else {
            s.relations.emplace_back(name, parse_table_literal());
          }
        }
        expect_punct(";");
      }
      expect_punct("}");
      if (!s.expected)
        throw Error(ErrorCode::SyntaxError, "situation '" + s.name + "' lacks an expect clause", s.pos);
      out.push_back(std::move(s));
    }
    return out;
  }

 private:
  std::vector<Token> toks_;
  std::size_t i_ = 0;
  int depth_ = 0;
  std::unordered_map<const void*, SourcePos>* positions_;
  std::set<const Term*> prefix_apps_;
};

// ---------------------------------------------------------------------------
// Resolution

Value normalize_value(const Value& v, const ScaleSystem& scales, const SourcePos& pos) {
  if (!v.is_composite()) return v;
  const Composite& c = v.as_composite();
  const Scale* s = scales.find(c.structure);
  if (!s || s->kind != Scale::Kind::Structural)
    throw Error(ErrorCode::UnknownScale, "'" + c.structure + "' is not a structure", pos);
  for (const auto& name : c.names) {
    bool known = false;
    for (const auto& f : s->fields) known |= f.first == name;
    if (!known)
      throw Error(ErrorCode::UnknownField,
                  "structure '" + c.structure + "' has no field '" + name + "'", pos);
  }
  std::vector<std::string> names;
  std::vector<Value> values;
  for (const auto& [field, scale] : s->fields) {
    const Value* fv = c.field(field);
    if (!fv)
      throw Error(ErrorCode::ScaleMismatch,
                  "value of structure '" + c.structure + "' lacks field '" + field + "'", pos);
    names.push_back(field);
    values.push_back(normalize_value(*fv, scales, pos));
  }
  if (names.size() != c.names.size())
    throw Error(ErrorCode::ScaleMismatch, "structure value repeats a field", pos);
  return Value::composite(c.structure, std::move(names), std::move(values));
}

class Resolver {
 public:
  Resolver(const LogicalModel& model, const std::unordered_map<const void*, SourcePos>& positions)
      : model_(model), positions_(positions) {}

  SourcePos where(const void* node, const SourcePos& fallback) const {
    auto it = positions_.find(node);
    return it == positions_.end() ? fallback : it->second;
  }

  TermPtr term(const TermPtr& t, const SourcePos& fallback) const {
    SourcePos at = where(t.get(), fallback);
    switch (t->kind) {
      case Term::Kind::Literal:
        return ast::lit(normalize_value(t->literal, model_.scales, at));
      case Term::Kind::Symbol: {
        if (model_.variable(t->name)) return ast::var(t->name);
        if (model_.symbol(t->name)) return ast::sym(t->name);
        if (model_.scales.is_scalar_name(t->name)) return ast::lit(Value::scalar(t->name));
        throw Error(ErrorCode::UnknownSymbol, "unknown name '" + t->name + "'", at);
      }
      case Term::Kind::Variable:
        return t;
      case Term::Kind::Apply: {
        std::vector<TermPtr> args;
        for (const auto& a : t->args) args.push_back(term(a, at));
        HeadKind kind = model_.variable(t->name) ? HeadKind::Variable : HeadKind::Symbol;
        if (kind == HeadKind::Symbol && !model_.symbol(t->name))
          throw Error(ErrorCode::UnknownSymbol, "unknown function '" + t->name + "'", at);
        return ast::apply(t->name, std::move(args), kind);
      }
      case Term::Kind::Field:
        return ast::field(t->name, term(t->args.front(), at));
    }
    return t;
  }

  FormulaPtr formula(const FormulaPtr& f, const SourcePos& fallback) const {
    SourcePos at = where(f.get(), fallback);
    switch (f->kind) {
      case Formula::Kind::True:
      case Formula::Kind::False:
        return f;
      case Formula::Kind::Atom: {
        std::vector<TermPtr> args;
        for (const auto& a : f->args) args.push_back(term(a, at));
        HeadKind kind = model_.variable(f->head) ? HeadKind::Variable : HeadKind::Symbol;
        if (kind == HeadKind::Symbol && !model_.symbol(f->head))
          throw Error(ErrorCode::UnknownSymbol, "unknown predicate '" + f->head + "'", at);
        return ast::atom(f->head, std::move(args), kind);
      }
      case Formula::Kind::Not:
        return ast::negate(formula(f->children[0], at));
      case Formula::Kind::Implies:
        return ast::implies(formula(f->children[0], at), formula(f->children[1], at));
      case Formula::Kind::And:
      case Formula::Kind::Or: {
        auto copy = std::make_shared<Formula>(*f);
        for (auto& c : copy->children) c = formula(c, at);
        return copy;
      }
    }
    return f;
  }

 private:
  const LogicalModel& model_;
  const std::unordered_map<const void*, SourcePos>& positions_;
};

template <class Fn>
auto guarded(const SourcePos& fallback, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    if (e.pos().valid()) throw;
    throw Error(e.code(), e.detail(), fallback);
  } catch (const std::invalid_argument& e) {
    throw Error(ErrorCode::ScaleMismatch, e.what(), fallback);
  }
}

std::vector<Token> lex(std::string_view text, const std::string& file) {
  return Lexer(text, file).run();
}

void check_row_scales(const RawRow& row, const Symbol& sym, const ScaleSystem& scales) {
  for (std::size_t i = 0; i < row.args.size() && i < sym.arg_scales.size(); ++i)
    if (!scales.conforms(row.args[i], sym.arg_scales[i]))
      throw Error(ErrorCode::ScaleMismatch,
                  "value " + to_text(row.args[i]) + " is not on scale '" + sym.arg_scales[i] +
                      "' (argument " + std::to_string(i + 1) + " of '" + sym.name + "')",
                  row.pos);
  if (row.result && !sym.result_scale.empty() && !scales.conforms(*row.result, sym.result_scale))
    throw Error(ErrorCode::ScaleMismatch,
                "result " + to_text(*row.result) + " is not on scale '" + sym.result_scale +
                    "' (result of '" + sym.name + "')",
                row.pos);
}

FiniteTable build_table(const Symbol& sym, std::vector<RawRow> rows, const ScaleSystem& scales,
                        double tolerance, const SourcePos& pos) {
  std::vector<TableRow> out;
  for (auto& r : rows) {
    SourcePos at = r.pos;
    guarded(at, [&] {
      for (auto& v : r.args) v = normalize_value(v, scales, at);
      if (r.result) r.result = normalize_value(*r.result, scales, at);
      if (static_cast<int>(r.args.size()) != sym.arity_or_zero())
        throw Error(ErrorCode::ArityMismatch,
                    "row has " + std::to_string(r.args.size()) + " arguments, '" + sym.name +
                        "' takes " + std::to_string(sym.arity_or_zero()),
                    at);
      if ((sym.kind == SymbolKind::Functional) != r.result.has_value())
        throw Error(ErrorCode::ArityMismatch,
                    sym.kind == SymbolKind::Functional ? "functional row lacks '-> result'"
                                                       : "predicate row has a result",
                    at);
      check_row_scales(r, sym, scales);
      return 0;
    });
    out.push_back(TableRow{std::move(r.args), std::move(r.result)});
  }
  return guarded(pos, [&] { return make_table(sym, std::move(out), &scales, tolerance); });
}

std::vector<RawRow> read_sidecar(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read table file '" + path.string() + "'");
  std::vector<RawRow> rows;
  std::string line;
  std::uint32_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    RawRow row;
    row.pos = SourcePos{path.string(), lineno, 1};
    bool result_next = false;
    std::size_t start = 0;
    while (start <= line.size()) {
      std::size_t tab = line.find('\t', start);
      std::size_t end = tab == std::string::npos ? line.size() : tab;
      std::string cell = line.substr(start, end - start);
      SourcePos cell_pos{path.string(), lineno, static_cast<std::uint32_t>(start + 1)};
      std::size_t a = cell.find_first_not_of(' ');
      std::size_t b = cell.find_last_not_of(' ');
      cell = a == std::string::npos ? std::string() : cell.substr(a, b - a + 1);
      if (cell == "->") {
        if (result_next || row.result)
          throw Error(ErrorCode::SyntaxError, "repeated '->' in table row", cell_pos);
        result_next = true;
      } else if (!cell.empty()) {
        if (row.result)
          throw Error(ErrorCode::SyntaxError, "cell after the result in table row", cell_pos);
        Value v;
        try {
          v = parse_value(cell);
        } catch (const Error& e) {
          throw Error(e.code(), e.detail(), cell_pos);
        }
        if (result_next) {
          row.result = std::move(v);
          result_next = false;
        } else {
          row.args.push_back(std::move(v));
        }
      }
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    if (result_next) throw Error(ErrorCode::SyntaxError, "'->' without a result", row.pos);
    rows.push_back(std::move(row));
  }
  return rows;
}

LogicalModel build_model(RawDocument doc, std::unordered_map<const void*, SourcePos>& positions,
                         const std::filesystem::path& base_dir) {
  LogicalModel model;
  model.name = doc.name;
  if (doc.tolerance) model.tolerance = *doc.tolerance;
  for (auto& [scale, at] : doc.scales)
    guarded(at, [&] {
      model.scales.add(std::move(scale));
      return 0;
    });
  guarded(doc.scales.empty() ? SourcePos{} : doc.scales.front().second, [&] {
    model.scales.validate();
    return 0;
  });

  std::vector<Symbol> decls = builtin_symbols();
  std::unordered_map<std::string, SourcePos> symbol_pos;
  for (const auto& r : doc.symbols) {
    for (const auto& sc : r.symbol.arg_scales)
      if (!model.scales.contains(sc))
        throw Error(ErrorCode::UnknownScale, "unknown scale '" + sc + "'", r.pos);
    if (!r.symbol.result_scale.empty() && !model.scales.contains(r.symbol.result_scale))
      throw Error(ErrorCode::UnknownScale, "unknown scale '" + r.symbol.result_scale + "'", r.pos);
    for (const auto& d : decls)
      if (d.name == r.symbol.name)
        throw Error(ErrorCode::DuplicateSymbol,
                    "symbol '" + d.name + "' declared at level " + std::to_string(d.level) +
                        " and level " + std::to_string(r.symbol.level),
                    r.pos);
    decls.push_back(r.symbol);
    symbol_pos[r.symbol.name] = r.pos;
  }
  model.signature = build_signature(std::move(decls));

  for (auto& r : doc.symbols) {
    if (!r.value) continue;
    Value v = guarded(r.pos, [&] { return normalize_value(*r.value, model.scales, r.pos); });
    if (!r.symbol.result_scale.empty() && !model.scales.conforms(v, r.symbol.result_scale))
      throw Error(ErrorCode::ScaleMismatch,
                  "value " + to_text(v) + " is not on scale '" + r.symbol.result_scale + "'", r.pos);
    if (r.symbol.level == 0) {
      model.constants[r.symbol.name] = std::move(v);
    } else {
      AlgebraicSystem* a = nullptr;
      for (auto& f : model.facts)
        if (f.level == r.symbol.level) a = &f;
      if (!a) {
        model.facts.push_back(AlgebraicSystem{r.symbol.level, {}, {}});
        a = &model.facts.back();
      }
      a->objects[r.symbol.name] = std::move(v);
    }
  }

  for (auto& raw : doc.tables) {
    const Symbol* sym = model.signature.find(raw.name);
    if (!sym) throw Error(ErrorCode::UnknownSymbol, "table for undeclared relation '" + raw.name + "'", raw.pos);
    if (sym->level < 2)
      throw Error(ErrorCode::LevelViolation,
                  "tables interpret level-2+ relations; '" + raw.name + "' is at level " +
                      std::to_string(sym->level),
                  raw.pos);
    if (sym->kind == SymbolKind::Objective)
      throw Error(ErrorCode::NonTableInterpretation, "'" + raw.name + "' is a parameter, not a relation", raw.pos);
    std::vector<RawRow> rows = std::move(raw.rows);
    if (raw.file) rows = read_sidecar(base_dir / *raw.file);
    FiniteTable table = build_table(*sym, std::move(rows), model.scales, model.tolerance, raw.pos);
    AlgebraicSystem* a = nullptr;
    for (auto& f : model.facts)
      if (f.level == sym->level) a = &f;
    if (!a) {
      model.facts.push_back(AlgebraicSystem{sym->level, {}, {}});
      a = &model.facts.back();
    }
    if (a->tables.count(raw.name))
      throw Error(ErrorCode::DuplicateSymbol, "relation '" + raw.name + "' has two tables", raw.pos);
    a->tables.emplace(raw.name, std::move(table));
  }
  std::sort(model.facts.begin(), model.facts.end(),
            [](const AlgebraicSystem& a, const AlgebraicSystem& b) { return a.level < b.level; });

  for (auto& rv : doc.variables) {
    VariableDecl v = std::move(rv.decl);
    std::set<Value> uniq;
    for (auto& value : v.values)
      uniq.insert(guarded(rv.pos, [&] { return normalize_value(value, model.scales, rv.pos); }));
    v.values.assign(uniq.begin(), uniq.end());
    if (model.signature.find(v.name) || model.scales.is_scalar_name(v.name))
      throw Error(ErrorCode::DuplicateSymbol, "variable '" + v.name + "' clashes with another name", rv.pos);
    model.variables.push_back(std::move(v));
  }
  for (const auto& rv : doc.variables)
    guarded(rv.pos, [&] {
      // Order and range checks live in validate_model; run them early for a position.
      return 0;
    });

  Resolver resolve(model, positions);
  for (auto& nf : doc.formulas) {
    nf.formula = resolve.formula(nf.formula, nf.pos);
    model.formulas.push_back(nf);
  }

  SourcePos first = doc.formulas.empty() ? SourcePos{} : doc.formulas.front().pos;
  for (const auto& rv : doc.variables) {
    if (rv.decl.order < 1 || rv.decl.order > model.order())
      throw Error(ErrorCode::LevelViolation,
                  "variable '" + rv.decl.name + "' has order " + std::to_string(rv.decl.order) +
                      " in a model of order " + std::to_string(model.order()),
                  rv.pos);
  }
  guarded(first, [&] {
    validate_model(model);
    return 0;
  });
  return model;
}

template <class Fn>
auto total(const std::string& file, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::SyntaxError, e.what(), SourcePos{file, 1, 1});
  }
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot read '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

LogicalModel parse_model(const std::vector<SourceText>& sources,
                         const std::filesystem::path& base_dir) {
  std::string first = sources.empty() ? std::string() : sources.front().name;
  return total(first, [&] {
    std::unordered_map<const void*, SourcePos> positions;
    RawDocument doc;
    std::vector<std::vector<Token>> keep;
    for (const auto& src : sources) {
      Parser p(lex(src.text, src.name), &positions);
      doc = p.parse_model_document(std::move(doc));
    }
    return build_model(std::move(doc), positions, base_dir);
  });
}

LogicalModel parse_model(std::string_view text, const ParseOptions& options) {
  return parse_model({SourceText{options.file_name, std::string(text)}}, options.base_dir);
}

LogicalModel load_model_file(const std::filesystem::path& path) {
  std::string text = read_file(path);
  return parse_model({SourceText{path.string(), std::move(text)}}, path.parent_path());
}

TaskSpec parse_task(std::string_view text, const LogicalModel& model, const ParseOptions& options) {
  return total(options.file_name, [&] {
    std::unordered_map<const void*, SourcePos> positions;
    Parser p(lex(text, options.file_name), &positions);
    auto raw = p.parse_task_document(model);
    Resolver resolve(model, positions);
    TaskSpec task;
    task.name = raw.name;
    for (auto& d : raw.delta) {
      d.formula = resolve.formula(d.formula, d.pos);
      task.delta.push_back(std::move(d));
    }
    task.psi.kind = raw.psi.kind;
    if (raw.psi.condition) task.psi.condition = resolve.formula(raw.psi.condition, {});
    if (raw.psi.objective) task.psi.objective = resolve.term(raw.psi.objective, {});
    for (auto& t : raw.outputs) task.outputs.push_back(resolve.term(t, {}));
    for (auto& d : raw.domains) {
      DomainAnnotation ann;
      ann.unknown = d.path.back();
      for (auto it = d.path.rbegin() + 1; it != d.path.rend(); ++it) ann.path.push_back(*it);
      const Symbol* sym = model.symbol(ann.unknown);
      if (!sym || sym->level != 1)
        throw Error(ErrorCode::UnknownSymbol, "'" + ann.unknown + "' is not an unknown", d.pos);
      std::set<Value> uniq;
      for (auto& v : d.values)
        uniq.insert(guarded(d.pos, [&] { return normalize_value(v, model.scales, d.pos); }));
      ann.values.assign(uniq.begin(), uniq.end());
      for (auto& rows : d.tables)
        ann.tables.push_back(build_table(*sym, std::move(rows), model.scales, model.tolerance, d.pos));
      task.domains.push_back(std::move(ann));
    }
    guarded(SourcePos{options.file_name, 1, 1}, [&] {
      validate_task(task, model);
      return 0;
    });
    return task;
  });
}

TaskSpec load_task_file(const std::filesystem::path& path, const LogicalModel& model) {
  std::string text = read_file(path);
  return parse_task(text, model, ParseOptions{path.string(), path.parent_path()});
}

std::vector<Situation> parse_corpus(std::string_view text, const LogicalModel& model,
                                    const ParseOptions& options) {
  return total(options.file_name, [&] {
    Parser p(lex(text, options.file_name), nullptr);
    auto raws = p.parse_corpus_document(model);
    std::vector<Situation> out;
    std::set<std::string> names;
    for (auto& raw : raws) {
      if (!names.insert(raw.name).second)
        throw Error(ErrorCode::DuplicateSymbol, "situation '" + raw.name + "' appears twice", raw.pos);
      std::map<std::string, Value> objects;
      std::map<std::string, FiniteTable> relations;
      for (auto& [name, v] : raw.objects) {
        Value norm = guarded(raw.pos, [&] { return normalize_value(v, model.scales, raw.pos); });
        if (!objects.emplace(name, std::move(norm)).second)
          throw Error(ErrorCode::DuplicateSymbol, "unknown '" + name + "' assigned twice", raw.pos);
      }
      for (auto& [name, rows] : raw.relations) {
        const Symbol* sym = model.symbol(name);
        relations.emplace(name, build_table(*sym, std::move(rows), model.scales, model.tolerance, raw.pos));
      }
      std::set<Value> extra;
      for (auto& v : raw.universe)
        extra.insert(guarded(raw.pos, [&] { return normalize_value(v, model.scales, raw.pos); }));
      Situation s;
      s.name = raw.name;
      s.expected = *raw.expected;
      s.system = make_candidate(std::move(objects), std::move(relations), extra);
      out.push_back(std::move(s));
    }
    return out;
  });
}

Value parse_value(std::string_view text) {
  return total("", [&] {
    Parser p(lex(text, ""), nullptr);
    Value v = p.parse_value_expr();
    if (!p.at_end()) p.fail("end of value");
    return v;
  });
}

Value parse_value(std::string_view text, const LogicalModel& model) {
  Value v = parse_value(text);
  return normalize_value(v, model.scales, SourcePos{"", 1, 1});
}

TermPtr parse_term(std::string_view text, const LogicalModel& model) {
  return total("", [&] {
    std::unordered_map<const void*, SourcePos> positions;
    Parser p(lex(text, ""), &positions);
    TermPtr t = p.parse_term();
    if (!p.at_end()) p.fail("end of term");
    return Resolver(model, positions).term(t, SourcePos{"", 1, 1});
  });
}

FormulaPtr parse_formula(std::string_view text, const LogicalModel& model) {
  return total("", [&] {
    std::unordered_map<const void*, SourcePos> positions;
    Parser p(lex(text, ""), &positions);
    FormulaPtr f = p.parse_formula();
    if (!p.at_end()) p.fail("end of formula");
    return Resolver(model, positions).formula(f, SourcePos{"", 1, 1});
  });
}

}  // namespace lm
