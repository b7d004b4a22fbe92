#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "lm/ast.hpp"
#include "lm/scale.hpp"
#include "lm/signature.hpp"
#include "lm/table.hpp"
#include "lm/value.hpp"

namespace lm {

/// A formula variable. Order-1 variables range over a scale or an explicit value set
/// (intersected with the candidate universe); higher orders need an explicit finite set.
struct VariableDecl {
  std::string name;
  int order = 1;
  std::optional<std::string> scale;
  std::vector<Value> values;  // canonical order, no duplicates

  bool operator==(const VariableDecl&) const = default;
};

/// Fact system A_i for i >= 2: tables for functional/predicate symbols, values for
/// objective parameters.
struct AlgebraicSystem {
  int level = 2;
  std::map<std::string, FiniteTable> tables;
  std::map<std::string, Value> objects;

  bool operator==(const AlgebraicSystem&) const = default;
};

/// Ωⁿ = ⟨Φ, A⟩ together with its signature, scale system and variable declarations.
struct LogicalModel {
  std::string name;
  Signature signature;
  ScaleSystem scales;
  std::map<std::string, Value> constants;  // user constants of Σ0
  std::vector<AlgebraicSystem> facts;      // levels 2..n in order
  std::vector<NamedFormula> formulas;
  std::vector<VariableDecl> variables;
  double tolerance = kDefaultTolerance;

  int order() const { return signature.order(); }
  const VariableDecl* variable(const std::string& name) const;
  const Symbol* symbol(const std::string& name) const { return signature.find(name); }
  const FiniteTable* table(const std::string& name) const;
  /// Value of a user constant (Σ0) or objective parameter (Σ≥2).
  const Value* object(const std::string& name) const;
  /// Σ1 symbols in declaration order.
  const std::vector<Symbol>& unknowns() const { return signature.level(1); }
  const AlgebraicSystem* fact_system(int level) const;
  const NamedFormula* formula(const std::string& name) const;

  bool operator==(const LogicalModel& other) const;
};

/// Cross-reference and typing checks shared by the parser and programmatic builders.
/// Errors: UnknownSymbol, UnknownScale, UnknownField, ArityMismatch, LevelViolation,
/// NonTableInterpretation, DuplicateSymbol.
void validate_model(const LogicalModel& model);

/// Scale of a term when it can be determined statically.
std::optional<std::string> infer_scale(const Term& term, const LogicalModel& model);

/// Highest symbol level or variable order used by a formula (0 when it uses only Σ0).
int formula_order(const Formula& formula, const LogicalModel& model);

struct Psi {
  enum class Kind { None, Require, Maximize, Minimize };
  Kind kind = Kind::None;
  FormulaPtr condition;  // Require
  TermPtr objective;     // Maximize / Minimize

  bool operator==(const Psi& other) const {
    return kind == other.kind && same(condition, other.condition) &&
           same(objective, other.objective);
  }
};

/// Search-space restriction declared by a task: admissible values of an unknown,
/// or of one leaf field of a composite unknown, or admissible tables of a relation unknown.
struct DomainAnnotation {
  std::string unknown;
  FieldPath path;
  std::vector<Value> values;
  std::vector<FiniteTable> tables;

  bool operator==(const DomainAnnotation&) const = default;
};

/// ⟨Δ, Ψ, Π⟩ bound to a model.
struct TaskSpec {
  std::string name;
  std::vector<NamedFormula> delta;
  Psi psi;
  std::vector<TermPtr> outputs;
  std::vector<DomainAnnotation> domains;

  bool operator==(const TaskSpec& other) const;
};

/// Errors: DeltaWithoutUnknown, SecondOrderInDelta, EmptyOutput, LevelViolation, plus
/// the typing errors of validate_model.
void validate_task(const TaskSpec& task, const LogicalModel& model);

/// A relevant algebraic system of Σ1: finite universe plus interpretation of the unknowns.
struct CandidateSystem {
  std::set<Value> universe;
  std::map<std::string, Value> objects;
  std::map<std::string, FiniteTable> relations;

  bool operator==(const CandidateSystem&) const = default;
  std::strong_ordering operator<=>(const CandidateSystem& other) const;
};

/// Candidate whose universe is exactly the values it interprets, plus `extra`.
CandidateSystem make_candidate(std::map<std::string, Value> objects,
                               std::map<std::string, FiniteTable> relations = {},
                               const std::set<Value>& extra = {});

struct Situation {
  enum class Expectation { Adequate, Violating };
  std::string name;
  CandidateSystem system;
  Expectation expected = Expectation::Adequate;

  bool operator==(const Situation&) const = default;
};

std::string_view to_string(Situation::Expectation e);

}  // namespace lm
