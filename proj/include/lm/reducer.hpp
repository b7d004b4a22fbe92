#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lm/model.hpp"

namespace lm {

/// Where one output formula came from.
struct ReductionMapping {
  std::string output;
  std::string input;
  /// Table rows expanded into the output formula, as (table, row index) in canonical row order.
  std::vector<std::pair<std::string, std::size_t>> rows;
  std::vector<std::string> inlined_parameters;
  std::vector<std::string> expanded_variables;
};

struct ReductionReport {
  int input_order = 0;
  int output_order = 0;
  std::vector<std::string> eliminated;  // the top-level symbols, declaration order
  std::size_t formulas_before = 0;
  std::size_t formulas_after = 0;
  std::size_t nodes_before = 0;
  std::size_t nodes_after = 0;
  std::vector<ReductionMapping> mapping;
};

/// Ωⁿ → Ωⁿ⁻¹ by inlining the level-n fact tables. Errors: OrderTooLow, NonTableInterpretation.
std::pair<LogicalModel, ReductionReport> reduce_once(const LogicalModel& model);

/// Iterates reduce_once down to order 1; an order-1 model comes back unchanged with no reports.
std::pair<LogicalModel, std::vector<ReductionReport>> reduce_to_first_order(const LogicalModel& model);

std::string report_text(const ReductionReport& report);
std::string report_json(const std::vector<ReductionReport>& chain);

struct EquivalenceVerdict {
  bool equivalent = true;  // "equivalent-within-bound"
  std::uint64_t candidates = 0;
  std::optional<CandidateSystem> counterexample;
  bool first_is_solution = false;  // for the counterexample
};

/// Bounded check of equal solution sets: every relevant candidate drawn from `pool`
/// (objective unknowns take pool values on their scale, the universe adds any subset of
/// the rest of the pool, relation unknowns take every table over the universe).
/// Errors: SignatureMismatch, BoundExceeded.
EquivalenceVerdict check_equivalence(const LogicalModel& m1, const LogicalModel& m2,
                                     const std::vector<Value>& pool, std::uint64_t bound);

}  // namespace lm
