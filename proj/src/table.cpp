#include "lm/table.hpp"

#include <algorithm>

#include "lm/error.hpp"

namespace lm {

std::strong_ordering TableRow::operator<=>(const TableRow& other) const {
  auto c = std::lexicographical_compare_three_way(args.begin(), args.end(),
                                                  other.args.begin(), other.args.end());
  if (c != 0) return c;
  if (result.has_value() != other.result.has_value())
    return result.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
  if (!result) return std::strong_ordering::equal;
  return *result <=> *other.result;
}

namespace {

bool args_match(std::span<const Value> a, std::span<const Value> b, double tolerance) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!semantic_equal(a[i], b[i], tolerance)) return false;
  return true;
}

std::string describe_row(const TableRow& row) {
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

FiniteTable make_table(const Symbol& symbol, std::vector<TableRow> rows,
                       const ScaleSystem* scales, double tolerance) {
  if (symbol.kind == SymbolKind::Objective)
    throw Error(ErrorCode::NonTableInterpretation,
                "objective symbol '" + symbol.name + "' cannot have a table");
  if (symbol.level < 1)
    throw Error(ErrorCode::LevelViolation,
                "level-0 symbol '" + symbol.name + "' is calculable, not tabulated");
  FiniteTable t;
  t.symbol_ = symbol.name;
  t.kind_ = symbol.kind;
  t.arity_ = symbol.arity_or_zero();
  t.arg_scales_ = symbol.arg_scales;
  t.result_scale_ = symbol.result_scale;
  const bool functional = symbol.kind == SymbolKind::Functional;

  for (const auto& row : rows) {
    if (static_cast<int>(row.args.size()) != t.arity_)
      throw Error(ErrorCode::ArityMismatch, "row " + describe_row(row) + " of '" + symbol.name +
                                                "' has " + std::to_string(row.args.size()) +
                                                " arguments, expected " +
                                                std::to_string(t.arity_));
    if (functional != row.result.has_value())
      throw Error(ErrorCode::ArityMismatch,
                  "row " + describe_row(row) + " of '" + symbol.name +
                      (functional ? "' lacks a result" : "' has a result but the symbol is a predicate"));
    if (!scales) continue;
    for (std::size_t i = 0; i < row.args.size(); ++i) {
      if (i < t.arg_scales_.size() && !t.arg_scales_[i].empty() &&
          !scales->conforms(row.args[i], t.arg_scales_[i]))
        throw Error(ErrorCode::ScaleMismatch, "value " + to_text(row.args[i]) + " in row " +
                                                  describe_row(row) + " of '" + symbol.name +
                                                  "' is not on scale '" + t.arg_scales_[i] + "'");
    }
    if (row.result && !t.result_scale_.empty() && !scales->conforms(*row.result, t.result_scale_))
      throw Error(ErrorCode::ScaleMismatch, "result " + to_text(*row.result) + " of row " +
                                                describe_row(row) + " in '" + symbol.name +
                                                "' is not on scale '" + t.result_scale_ + "'");
  }

  std::sort(rows.begin(), rows.end());
  rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
  if (functional) {
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = i + 1; j < rows.size(); ++j)
        if (args_match(rows[i].args, rows[j].args, tolerance))
          throw Error(ErrorCode::FunctionalConflict, "'" + symbol.name + "' maps the same arguments to " +
                                                         to_text(*rows[i].result) + " and " +
                                                         to_text(*rows[j].result));
  }
  t.rows_ = std::move(rows);
  return t;
}

MaybeValue FiniteTable::lookup(std::span<const Value> args, double tolerance,
                               std::uint64_t* rows_examined) const {
  if (static_cast<int>(args.size()) != arity_)
    throw Error(ErrorCode::ArityMismatch, "'" + symbol_ + "' applied to " +
                                              std::to_string(args.size()) + " arguments");
  for (const auto& row : rows_) {
    if (rows_examined) ++*rows_examined;
    if (args_match(row.args, args, tolerance)) return row.result;
  }
  return std::nullopt;
}

bool FiniteTable::holds(std::span<const Value> args, double tolerance,
                        std::uint64_t* rows_examined) const {
  if (static_cast<int>(args.size()) != arity_)
    throw Error(ErrorCode::ArityMismatch, "'" + symbol_ + "' applied to " +
                                              std::to_string(args.size()) + " arguments");
  for (const auto& row : rows_) {
    if (rows_examined) ++*rows_examined;
    if (args_match(row.args, args, tolerance)) return true;
  }
  return false;
}

namespace {

bool refs_match(const std::vector<Value>& row, std::span<const Value* const> args, double tolerance) {
  for (std::size_t i = 0; i < row.size(); ++i)
    if (!semantic_equal(row[i], *args[i], tolerance)) return false;
  return true;
}

}  // namespace

const Value* FiniteTable::lookup_refs(std::span<const Value* const> args, double tolerance,
                                      std::uint64_t* rows_examined) const {
  if (static_cast<int>(args.size()) != arity_)
    throw Error(ErrorCode::ArityMismatch, "'" + symbol_ + "' applied to " +
                                              std::to_string(args.size()) + " arguments");
  for (const auto& row : rows_) {
    if (rows_examined) ++*rows_examined;
    if (refs_match(row.args, args, tolerance)) return row.result ? &*row.result : nullptr;
  }
  return nullptr;
}

bool FiniteTable::holds_refs(std::span<const Value* const> args, double tolerance,
                             std::uint64_t* rows_examined) const {
  if (static_cast<int>(args.size()) != arity_)
    throw Error(ErrorCode::ArityMismatch, "'" + symbol_ + "' applied to " +
                                              std::to_string(args.size()) + " arguments");
  for (const auto& row : rows_) {
    if (rows_examined) ++*rows_examined;
    if (refs_match(row.args, args, tolerance)) return true;
  }
  return false;
}

}  // namespace lm
