#pragma once

#include <string>
#include <vector>

#include "lm/model.hpp"

namespace lm {

/// Canonical concrete syntax. Re-parsing the output yields a structurally equal node.
std::string format(const Term& term);
std::string format(const Formula& formula);
std::string format(const TermPtr& term);
std::string format(const FormulaPtr& formula);
std::string format(const LogicalModel& model);
std::string format(const TaskSpec& task);
std::string format(const Situation& situation, const LogicalModel& model);
std::string format_corpus(const std::vector<Situation>& corpus, const LogicalModel& model);
std::string format_table_literal(const FiniteTable& table);

}  // namespace lm
