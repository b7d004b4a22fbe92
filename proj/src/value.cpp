#include "lm/value.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace lm {

Number Number::exact(Rational value) {
  Number n;
  n.exact_ = true;
  n.rational_ = std::move(value);
  return n;
}

Number Number::fraction(long long num, long long den) {
  if (den == 0) throw std::invalid_argument("zero denominator");
  return exact(Rational(num, den));
}

Number Number::decimal(double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("non-finite decimal");
  Number n;
  n.exact_ = false;
  n.decimal_ = value == 0.0 ? 0.0 : value;  // drop negative zero
  n.rational_ = Rational(n.decimal_);
  return n;
}

bool Number::is_integer() const {
  if (exact_) return boost::multiprecision::denominator(rational_) == 1;
  return false;
}

double Number::as_double() const {
  if (!exact_) return decimal_;
  return rational_.convert_to<double>();
}

std::string Number::str() const {
  if (exact_) {
    auto num = boost::multiprecision::numerator(rational_);
    auto den = boost::multiprecision::denominator(rational_);
    if (den == 1) return num.str();
    return num.str() + "/" + den.str();
  }
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, decimal_);
  std::string out(buf, res.ptr);
  if (out.find_first_of(".eE") == std::string::npos) out += ".0";
  return out;
}

namespace {

std::optional<Number> finite_or_none(double v) {
  if (!std::isfinite(v)) return std::nullopt;
  return Number::decimal(v);
}

}  // namespace

std::optional<Number> add(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) return Number::exact(a.rational_ + b.rational_);
  return finite_or_none(a.as_double() + b.as_double());
}

std::optional<Number> sub(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) return Number::exact(a.rational_ - b.rational_);
  return finite_or_none(a.as_double() - b.as_double());
}

std::optional<Number> mul(const Number& a, const Number& b) {
  if (a.exact_ && b.exact_) return Number::exact(a.rational_ * b.rational_);
  return finite_or_none(a.as_double() * b.as_double());
}

std::optional<Number> div(const Number& a, const Number& b) {
  if (b.exact_ ? b.rational_ == 0 : b.decimal_ == 0.0) return std::nullopt;
  if (a.exact_ && b.exact_) return Number::exact(a.rational_ / b.rational_);
  return finite_or_none(a.as_double() / b.as_double());
}

Number Number::negated() const {
  if (exact_) return exact(-rational_);
  return decimal(-decimal_);
}

Number Number::magnitude() const {
  if (exact_) return exact(boost::multiprecision::abs(rational_));
  return decimal(std::fabs(decimal_));
}

int Number::compare(const Number& other) const {
  if (!exact_ && !other.exact_) {
    if (decimal_ < other.decimal_) return -1;
    return decimal_ > other.decimal_ ? 1 : 0;
  }
  if (rational_ < other.rational_) return -1;
  return rational_ > other.rational_ ? 1 : 0;
}

bool Number::approx_equal(const Number& other, double tolerance) const {
  if (exact_ && other.exact_) return rational_ == other.rational_;
  double a = as_double();
  double b = other.as_double();
  double scale = std::max({1.0, std::fabs(a), std::fabs(b)});
  return std::fabs(a - b) <= tolerance * scale;
}

bool Number::approx_less(const Number& other, double tolerance) const {
  return !approx_equal(other, tolerance) && compare(other) < 0;
}

bool Number::approx_less_equal(const Number& other, double tolerance) const {
  return approx_equal(other, tolerance) || compare(other) < 0;
}

bool Number::operator==(const Number& other) const {
  if (exact_ != other.exact_) return false;
  return exact_ ? rational_ == other.rational_ : decimal_ == other.decimal_;
}

std::strong_ordering Number::operator<=>(const Number& other) const {
  int c = compare(other);
  if (c != 0) return c < 0 ? std::strong_ordering::less : std::strong_ordering::greater;
  if (exact_ == other.exact_) return std::strong_ordering::equal;
  return exact_ ? std::strong_ordering::less : std::strong_ordering::greater;
}

std::strong_ordering Interval::operator<=>(const Interval& other) const {
  if (auto c = lo <=> other.lo; c != 0) return c;
  if (auto c = hi <=> other.hi; c != 0) return c;
  return unit <=> other.unit;
}

const Value* Composite::field(const std::string& name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return &values[i];
  return nullptr;
}

bool Composite::operator==(const Composite& other) const {
  return structure == other.structure && names == other.names && values == other.values;
}

std::strong_ordering Composite::operator<=>(const Composite& other) const {
  if (auto c = structure <=> other.structure; c != 0) return c;
  if (auto c = names <=> other.names; c != 0) return c;
  return std::lexicographical_compare_three_way(values.begin(), values.end(),
                                                other.values.begin(), other.values.end());
}

Value Value::scalar(std::string name) { return Value(Rep(ScalarName{std::move(name)})); }

Value Value::interval(Number lo, Number hi, std::string unit) {
  if (lo.compare(hi) > 0) throw std::invalid_argument("interval lower bound exceeds upper bound");
  return Value(Rep(Interval{std::move(lo), std::move(hi), std::move(unit)}));
}

Value Value::composite(std::string structure, std::vector<std::string> names,
                       std::vector<Value> values) {
  if (names.size() != values.size())
    throw std::invalid_argument("composite field names and values differ in length");
  return Value(Rep(Composite{std::move(structure), std::move(names), std::move(values)}));
}

Value Value::symbol(std::string name) { return Value(Rep(SymbolRef{std::move(name)})); }

std::strong_ordering Value::operator<=>(const Value& other) const {
  if (rep_.index() != other.rep_.index())
    return rep_.index() <=> other.rep_.index();
  return std::visit(
      [&](const auto& lhs) -> std::strong_ordering {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(other.rep_);
        return lhs <=> rhs;
      },
      rep_);
}

bool semantic_equal(const Value& a, const Value& b, double tolerance) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Value::Kind::Number:
      return a.as_number().approx_equal(b.as_number(), tolerance);
    case Value::Kind::Scalar:
      return a.as_scalar() == b.as_scalar();
    case Value::Kind::Symbol:
      return a.as_symbol() == b.as_symbol();
    case Value::Kind::Interval: {
      const auto& x = a.as_interval();
      const auto& y = b.as_interval();
      return x.unit == y.unit && x.lo.approx_equal(y.lo, tolerance) &&
             x.hi.approx_equal(y.hi, tolerance);
    }
    case Value::Kind::Composite: {
      const auto& x = a.as_composite();
      const auto& y = b.as_composite();
      if (x.structure != y.structure || x.names != y.names) return false;
      for (std::size_t i = 0; i < x.values.size(); ++i)
        if (!semantic_equal(x.values[i], y.values[i], tolerance)) return false;
      return true;
    }
  }
  return false;
}

std::string to_text(const Value& value) {
  switch (value.kind()) {
    case Value::Kind::Number:
      return value.as_number().str();
    case Value::Kind::Scalar:
      return value.as_scalar();
    case Value::Kind::Symbol:
      return "@" + value.as_symbol();
    case Value::Kind::Interval: {
      const auto& iv = value.as_interval();
      std::string out = "[" + iv.lo.str() + ", " + iv.hi.str() + "]";
      if (!iv.unit.empty()) out += " " + iv.unit;
      return out;
    }
    case Value::Kind::Composite: {
      const auto& c = value.as_composite();
      std::string out = c.structure + "{";
      for (std::size_t i = 0; i < c.names.size(); ++i) {
        if (i) out += ", ";
        out += c.names[i] + ": " + to_text(c.values[i]);
      }
      return out + "}";
    }
  }
  return {};
}

}  // namespace lm
