#pragma once

#include <compare>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace lm {

using Rational = boost::multiprecision::cpp_rational;

inline constexpr double kDefaultTolerance = 1e-9;

/// A number that stays an exact rational as long as every input was exact.
/// Anything touching a decimal degrades to double.
class Number {
 public:
  Number() : exact_(true), rational_(0), decimal_(0.0) {}

  static Number exact(Rational value);
  static Number integer(long long value) { return exact(Rational(value)); }
  static Number fraction(long long num, long long den);
  /// Throws std::invalid_argument on NaN or infinity.
  static Number decimal(double value);

  bool is_exact() const { return exact_; }
  bool is_integer() const;
  const Rational& rational() const { return rational_; }
  double as_double() const;

  /// Canonical literal text: `3`, `-7/2`, `2.5`, `1e-05`.
  std::string str() const;

  // Arithmetic is partial: division by zero and non-finite results yield nullopt.
  friend std::optional<Number> add(const Number& a, const Number& b);
  friend std::optional<Number> sub(const Number& a, const Number& b);
  friend std::optional<Number> mul(const Number& a, const Number& b);
  friend std::optional<Number> div(const Number& a, const Number& b);
  Number negated() const;
  Number magnitude() const;

  /// Exact numeric comparison (decimals are converted exactly).
  int compare(const Number& other) const;
  bool approx_equal(const Number& other, double tolerance) const;
  bool approx_less(const Number& other, double tolerance) const;
  bool approx_less_equal(const Number& other, double tolerance) const;

  /// Structural identity: exact and decimal forms of the same quantity differ.
  bool operator==(const Number& other) const;
  /// Total canonical order: numeric order, exact before decimal on ties.
  std::strong_ordering operator<=>(const Number& other) const;

 private:
  bool exact_;
  Rational rational_;
  double decimal_;
};

struct ScalarName {
  std::string name;
  bool operator==(const ScalarName&) const = default;
  auto operator<=>(const ScalarName&) const = default;
};

struct SymbolRef {
  std::string name;
  bool operator==(const SymbolRef&) const = default;
  auto operator<=>(const SymbolRef&) const = default;
};

struct Interval {
  Number lo;
  Number hi;
  std::string unit;
  bool operator==(const Interval&) const = default;
  std::strong_ordering operator<=>(const Interval& other) const;
};

class Value;

/// Composite values carry their structural scale name and the fields in scale order.
struct Composite {
  std::string structure;
  std::vector<std::string> names;
  std::vector<Value> values;

  const Value* field(const std::string& name) const;
  bool operator==(const Composite& other) const;
  std::strong_ordering operator<=>(const Composite& other) const;
};

class Value {
 public:
  enum class Kind { Number, Scalar, Interval, Composite, Symbol };

  Value() : rep_(Number()) {}
  Value(Number n) : rep_(std::move(n)) {}  // NOLINT(implicit)

  static Value number(Number n) { return Value(std::move(n)); }
  static Value integer(long long n) { return Value(Number::integer(n)); }
  static Value scalar(std::string name);
  /// Throws std::invalid_argument when lo > hi.
  static Value interval(Number lo, Number hi, std::string unit = {});
  static Value composite(std::string structure, std::vector<std::string> names,
                         std::vector<Value> values);
  static Value symbol(std::string name);

  Kind kind() const { return static_cast<Kind>(rep_.index()); }
  bool is_number() const { return kind() == Kind::Number; }
  bool is_scalar() const { return kind() == Kind::Scalar; }
  bool is_interval() const { return kind() == Kind::Interval; }
  bool is_composite() const { return kind() == Kind::Composite; }
  bool is_symbol() const { return kind() == Kind::Symbol; }

  const Number& as_number() const { return std::get<Number>(rep_); }
  const std::string& as_scalar() const { return std::get<ScalarName>(rep_).name; }
  const Interval& as_interval() const { return std::get<Interval>(rep_); }
  const Composite& as_composite() const { return std::get<Composite>(rep_); }
  const std::string& as_symbol() const { return std::get<SymbolRef>(rep_).name; }

  bool operator==(const Value& other) const { return rep_ == other.rep_; }
  std::strong_ordering operator<=>(const Value& other) const;

 private:
  using Rep = std::variant<Number, ScalarName, Interval, Composite, SymbolRef>;
  explicit Value(Rep rep) : rep_(std::move(rep)) {}
  Rep rep_;
};

/// Equality used by `=` in formulas and by table lookup: tolerant on decimals.
bool semantic_equal(const Value& a, const Value& b, double tolerance);

/// Canonical textual form; parse_value() in formula-lang reads it back.
std::string to_text(const Value& value);

/// Possibly-undefined result of evaluating a term.
using MaybeValue = std::optional<Value>;

}  // namespace lm
