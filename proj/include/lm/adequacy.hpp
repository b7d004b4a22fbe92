#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lm/model.hpp"
#include "lm/semantics.hpp"

namespace lm {

struct SituationVerdict {
  std::string name;
  Situation::Expectation expected = Situation::Expectation::Adequate;
  bool consistent = true;
  std::vector<FormulaFailure> failures;  // every failing formula with its first witness

  /// Verdict matches the corpus label.
  bool as_expected() const { return consistent == (expected == Situation::Expectation::Adequate); }
};

/// Exactly is_solution on the situation's system. Errors: NotRelevant.
SituationVerdict check_situation(const LogicalModel& model, const Situation& situation);

struct AdequacyReport {
  std::vector<SituationVerdict> situations;  // sorted by name
  std::size_t consistent = 0;
  std::size_t violations = 0;
  std::size_t adequate_violations = 0;    // adequate-labelled situations that fail
  std::size_t violating_consistent = 0;   // violating-labelled situations that pass
  bool model_adequate = true;             // no adequate-labelled situation fails
};

/// Errors: EmptyCorpus, NotRelevant.
AdequacyReport validate_corpus(const LogicalModel& model, const std::vector<Situation>& corpus);

struct GeneratedTests {
  std::vector<Situation> situations;  // adequate ones, each followed by its mutant if any
  std::size_t adequate = 0;
  std::size_t mutants = 0;
  std::size_t underdetermined = 0;  // drafts discarded because a leaf stayed uncomputable
  std::size_t inconsistent = 0;     // drafts discarded because they failed the check
  std::size_t unmutated = 0;        // adequate situations for which no value change violates
};

/// Deterministic in (model, count, seed): samples fact-table rows to pin unknown fields,
/// completes directed equalities, and emits single-value mutants labelled violating.
/// `count` is the number of adequate situations requested. Errors: NoFacts.
GeneratedTests generate_tests(const LogicalModel& model, std::size_t count, std::uint64_t seed);

std::string report_text(const AdequacyReport& report);
std::string report_json(const AdequacyReport& report);

}  // namespace lm
