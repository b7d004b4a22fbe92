#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace lm {

enum class SymbolKind { Objective, Functional, Predicate };

std::string_view to_string(SymbolKind kind);

struct Symbol {
  std::string name;
  SymbolKind kind = SymbolKind::Objective;
  std::optional<int> arity;  // absent for objective symbols
  int level = 0;
  // Declared scales; empty strings mean "unchecked" (builtins).
  std::vector<std::string> arg_scales;
  std::string result_scale;  // functional result, or the scale of an objective symbol
  bool builtin = false;

  int arity_or_zero() const { return arity.value_or(0); }
  bool operator==(const Symbol&) const = default;
};

/// Partitioned symbol sets Σ0 … Σn.
class Signature {
 public:
  Signature() = default;

  int order() const { return order_; }
  const Symbol* find(const std::string& name) const;
  /// Symbols declared at `level` in declaration order (empty past the top level).
  const std::vector<Symbol>& level(int level) const;
  int level_count() const { return static_cast<int>(levels_.size()); }
  std::vector<Symbol> declarations() const;

  bool operator==(const Signature& other) const { return levels_ == other.levels_; }

 private:
  friend Signature build_signature(std::vector<Symbol> declarations);
  std::vector<std::vector<Symbol>> levels_;
  std::map<std::string, std::pair<int, std::size_t>> index_;
  int order_ = 1;
};

/// Validates disjointness and arities. Order is the highest non-empty level (at least 1).
/// Errors: DuplicateSymbol, BadArity, EmptyLevelZero.
Signature build_signature(std::vector<Symbol> declarations);

/// The calculable core of Σ0: arithmetic, comparison, interval membership and `pi`.
const std::vector<Symbol>& builtin_symbols();

/// Infix spelling of a builtin (`+`, `<`, `in`, ...) or empty if it is written prefix.
std::string_view infix_spelling(const std::string& builtin);

}  // namespace lm
