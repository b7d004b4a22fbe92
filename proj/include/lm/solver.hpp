#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lm/model.hpp"
#include "lm/semantics.hpp"

namespace lm {

struct SolveConfig {
  std::uint64_t max_candidates = 1000000;
  double time_budget_seconds = 60.0;
  unsigned workers = 1;
};

/// Ω_t: the base model with Φt = Φ ∪ Δ. Δ formulas are renamed `delta:NAME`.
struct TaskModel {
  LogicalModel base;
  TaskSpec task;
  std::vector<NamedFormula> phiT;
};

TaskModel compose_task_model(const LogicalModel& model, const TaskSpec& task);

/// One searched coordinate: a leaf field of an objective unknown, or a relation unknown.
struct Leaf {
  enum class Source { Pinned, Annotated, Derived, ActiveDomain, Tables };

  std::string unknown;
  FieldPath path;       // from the unknown's root; empty for non-structural unknowns
  std::string scale;    // scale of the leaf
  Source source = Source::ActiveDomain;
  std::vector<Value> values;        // static sources, canonical order
  std::vector<FiniteTable> tables;  // Tables
  // Derived: the leaf equals one of these terms (one per disjunctive branch).
  std::vector<TermPtr> derived;
  // Per derived term: conditions already decidable when the leaf is reached that its
  // branch needs (nullptr when none). The brute-force oracle ignores them.
  std::vector<FormulaPtr> guards;
  std::vector<std::size_t> depends_on;  // earlier leaves the terms read
  std::string origin;                   // formula that defines a derived leaf

  bool relation() const { return source == Source::Tables; }
};

std::string_view to_string(Leaf::Source source);

/// Admissibility filter from a domain annotation on a non-leaf field path.
struct DomainFilter {
  std::string unknown;
  FieldPath path;
  std::vector<Value> values;
};

struct SearchDomain {
  std::vector<Leaf> leaves;  // assignment order: relations, static leaves, derived leaves
  std::vector<DomainFilter> filters;
  /// Top-level conjuncts of Φt after variable elimination and specialisation.
  std::vector<NamedFormula> conjuncts;
  /// Conjuncts whose variables could not be eliminated; checked on complete candidates.
  std::vector<NamedFormula> residual;
  EvalCounters setup;
  /// Placeholder value per objective unknown (zero at every leaf).
  std::map<std::string, Value> skeletons;

  /// Static value set of every objective unknown whose leaves are all static (product).
  std::map<std::string, std::vector<Value>> per_unknown() const;
  std::map<std::string, std::vector<FiniteTable>> per_relation_unknown() const;
};

/// Errors: UnboundedUnknown (names the unknown and the missing source).
SearchDomain derive_domains(const TaskModel& tm);

enum class SolveStatus { SolutionsFound, NoSolutions, Truncated };
std::string_view to_string(SolveStatus status);

struct TaskSolution {
  CandidateSystem system;
  std::vector<std::pair<std::string, MaybeValue>> outputs;  // Π in task order

  bool operator==(const TaskSolution&) const = default;
};

struct SolveStats {
  std::uint64_t candidates = 0;  // complete assignments examined
  std::uint64_t nodes = 0;       // partial assignments visited
  std::uint64_t solutions_before_psi = 0;
  double elapsed_seconds = 0;
  EvalCounters steps;  // evaluation during the search
  EvalCounters setup;  // one-off specialisation work
};

struct TaskResult {
  SolveStatus status = SolveStatus::NoSolutions;
  std::vector<TaskSolution> solutions;
  SolveStats stats;
  std::string truncation;  // which limit stopped the search

  bool same_answer(const TaskResult& other) const {
    return status == other.status && solutions == other.solutions;
  }
};

TaskResult solve(const LogicalModel& model, const TaskSpec& task, const SolveConfig& config = {});

/// Independent oracle: enumerates every assignment of the search domain without pruning
/// and checks each with the plain solution test over the unspecialised Φt.
/// Errors: BoundExceeded.
TaskResult brute_force_solve(const LogicalModel& model, const TaskSpec& task, std::uint64_t bound);

/// Π projection. A term with order-1 variables yields the common value over its relevant
/// substitutions, or undefined when they disagree or there are none.
MaybeValue project(const Term& term, const LogicalModel& model, const CandidateSystem& candidate,
                   EvalCounters* counters = nullptr);

/// Ψ filter over a canonically sorted solution list. Errors: PsiNotNumeric.
std::vector<CandidateSystem> apply_psi(const Psi& psi, const LogicalModel& model,
                                       std::vector<CandidateSystem> solutions);

}  // namespace lm
