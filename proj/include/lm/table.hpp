#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lm/scale.hpp"
#include "lm/signature.hpp"
#include "lm/value.hpp"

namespace lm {

struct TableRow {
  std::vector<Value> args;
  std::optional<Value> result;  // functional tables only

  bool operator==(const TableRow&) const = default;
  std::strong_ordering operator<=>(const TableRow& other) const;
};

/// Extensional interpretation of a functional or predicate symbol.
/// Rows are kept in canonical order so that behaviour never depends on input order.
class FiniteTable {
 public:
  FiniteTable() = default;

  const std::string& symbol() const { return symbol_; }
  SymbolKind kind() const { return kind_; }
  int arity() const { return arity_; }
  const std::vector<TableRow>& rows() const { return rows_; }
  bool empty() const { return rows_.empty(); }
  const std::vector<std::string>& arg_scales() const { return arg_scales_; }
  const std::string& result_scale() const { return result_scale_; }

  /// Functional lookup by linear scan. `rows_examined`, when given, is incremented per row.
  /// Throws ArityMismatch; a miss is nullopt.
  MaybeValue lookup(std::span<const Value> args, double tolerance,
                    std::uint64_t* rows_examined = nullptr) const;
  /// Predicate membership under the closed-world reading.
  bool holds(std::span<const Value> args, double tolerance,
             std::uint64_t* rows_examined = nullptr) const;
  /// Same scans over borrowed argument values.
  const Value* lookup_refs(std::span<const Value* const> args, double tolerance,
                           std::uint64_t* rows_examined = nullptr) const;
  bool holds_refs(std::span<const Value* const> args, double tolerance,
                  std::uint64_t* rows_examined = nullptr) const;

  bool operator==(const FiniteTable&) const = default;

 private:
  friend FiniteTable make_table(const Symbol&, std::vector<TableRow>, const ScaleSystem*, double);
  std::string symbol_;
  SymbolKind kind_ = SymbolKind::Predicate;
  int arity_ = 0;
  std::vector<std::string> arg_scales_;
  std::string result_scale_;
  std::vector<TableRow> rows_;
};

/// Builds a validated table for a functional or predicate symbol.
/// Predicate duplicates collapse; functional rows with equal arguments must agree.
/// `scales` may be null to skip conformance checks (scales come from `symbol`).
/// Errors: ArityMismatch, ScaleMismatch, FunctionalConflict, LevelViolation.
FiniteTable make_table(const Symbol& symbol, std::vector<TableRow> rows,
                       const ScaleSystem* scales, double tolerance = kDefaultTolerance);

}  // namespace lm
