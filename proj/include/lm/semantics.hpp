#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lm/model.hpp"

namespace lm {

using Substitution = std::map<std::string, Value>;

/// Evaluation-step instrumentation: one step per term or formula node visited,
/// plus one per fact-table row examined during lookups.
struct EvalCounters {
  std::uint64_t nodes = 0;
  std::uint64_t rows = 0;
  std::uint64_t total() const { return nodes + rows; }
  EvalCounters& operator+=(const EvalCounters& o) {
    nodes += o.nodes;
    rows += o.rows;
    return *this;
  }
};

/// Value of a term, or nullopt for undefined. Throws UnboundVariable.
MaybeValue eval_term(const Term& term, const LogicalModel& model, const CandidateSystem& candidate,
                     const Substitution& subst = {}, EvalCounters* counters = nullptr);

/// Two-valued truth; an atom with an undefined argument is false.
bool eval_formula(const Formula& formula, const LogicalModel& model,
                  const CandidateSystem& candidate, const Substitution& subst = {},
                  EvalCounters* counters = nullptr);

/// Admissible values of a variable: range ∩ universe for order 1, the declared set otherwise.
std::vector<Value> admissible_values(const VariableDecl& variable, const LogicalModel& model,
                                     const CandidateSystem& candidate);

/// Cartesian product over the formula's variables sorted by name; the first variable
/// varies slowest.
std::vector<Substitution> relevant_substitutions(const Formula& formula, const LogicalModel& model,
                                                 const CandidateSystem& candidate);

struct Agreement {
  bool agrees = true;
  std::optional<Substitution> witness;  // first failing substitution
};

Agreement in_agreement(const Formula& formula, const LogicalModel& model,
                       const CandidateSystem& candidate, EvalCounters* counters = nullptr);

struct FormulaFailure {
  std::string formula;
  Substitution witness;
};

struct SolutionCheck {
  bool solution = true;
  std::vector<FormulaFailure> failures;  // in formula order
};

/// Throws NotRelevant when a universe element lies outside the base universe or an
/// interpreted value is missing from the universe.
void check_relevant(const CandidateSystem& candidate, const LogicalModel& model);

SolutionCheck is_solution(const CandidateSystem& candidate, const LogicalModel& model,
                          EvalCounters* counters = nullptr);

/// Agreement of an explicit formula list (used for Φ ∪ Δ). Stops at the first failure
/// when `first_only` is set.
SolutionCheck check_formulas(const std::vector<NamedFormula>& formulas, const LogicalModel& model,
                             const CandidateSystem& candidate, EvalCounters* counters = nullptr,
                             bool first_only = false);

std::string to_text(const Substitution& subst);

}  // namespace lm
