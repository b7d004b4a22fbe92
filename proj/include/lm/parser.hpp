#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "lm/model.hpp"

namespace lm {

struct ParseOptions {
  std::string file_name;            // used in error positions
  std::filesystem::path base_dir;   // resolves `table NAME from "file";`
};

struct SourceText {
  std::string name;
  std::string text;
};

/// Parses and fully validates a model document. Errors carry file/line/column.
LogicalModel parse_model(std::string_view text, const ParseOptions& options = {});
/// Several files forming one logical document (e.g. scales.lm + knowledge.lm).
LogicalModel parse_model(const std::vector<SourceText>& sources,
                         const std::filesystem::path& base_dir);
/// Reads a `.lm` file; sidecar tables resolve relative to its directory.
LogicalModel load_model_file(const std::filesystem::path& path);

TaskSpec parse_task(std::string_view text, const LogicalModel& model,
                    const ParseOptions& options = {});
TaskSpec load_task_file(const std::filesystem::path& path, const LogicalModel& model);

std::vector<Situation> parse_corpus(std::string_view text, const LogicalModel& model,
                                    const ParseOptions& options = {});

/// Value in canonical textual form; composite fields are kept as written.
Value parse_value(std::string_view text);
/// Value normalised against a model's scales (composite fields reordered and checked).
Value parse_value(std::string_view text, const LogicalModel& model);
TermPtr parse_term(std::string_view text, const LogicalModel& model);
FormulaPtr parse_formula(std::string_view text, const LogicalModel& model);

std::string read_file(const std::filesystem::path& path);

}  // namespace lm
