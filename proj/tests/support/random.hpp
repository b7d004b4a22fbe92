#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "lm/model.hpp"

namespace lmtest {

using Rng = std::mt19937_64;

struct ModelShape {
  int max_pool = 4;
  int max_objective = 2;
  int max_tables = 3;
  int max_rows = 5;
  int max_formulas = 4;
  bool structures = false;         // a `pt` structure unknown with fields a:num, c:col
  bool relation_unknowns = false;  // predicate unknown r(num)
  bool order2_variables = true;
  bool parameters = true;
};

/// A generated Ω² model. `pool` is the candidate pool for bounded equivalence checks.
struct RandomModel {
  std::string text;
  lm::LogicalModel model;
  std::vector<lm::Value> pool;
  std::vector<std::string> objective;  // unknown names
  std::vector<std::string> num_unknowns, col_unknowns;
  bool has_struct = false;
  bool has_relation = false;
};

RandomModel random_model(Rng& rng, const ModelShape& shape = {});

/// A task for a generated model whose annotations keep the candidate space small.
std::string random_task_text(Rng& rng, const RandomModel& m);

/// Random well-typed formula over the fixed AST vocabulary model (see ast_vocabulary()).
lm::FormulaPtr random_formula_ast(Rng& rng, const lm::LogicalModel& vocabulary, int depth);
lm::TermPtr random_term_ast(Rng& rng, const lm::LogicalModel& vocabulary, int depth);
/// Model with scales, structures, functions, predicates, parameters and variables of
/// both orders; used as the resolution context for AST round trips.
const lm::LogicalModel& ast_vocabulary();

std::size_t pick(Rng& rng, std::size_t n);
bool coin(Rng& rng, double p = 0.5);

}  // namespace lmtest
