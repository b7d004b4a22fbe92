#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace lmtest {

/// One TSV row read without the library: key cells as text, the result as numbers.
struct RawRow {
  std::vector<std::string> key;
  double lo = 0, hi = 0;  // equal for scalar factors
};

/// Plain reader for the pack's `key... -> result` tables; `pi` is the only symbolic number.
std::vector<RawRow> read_tsv(const std::filesystem::path& file);

double parse_number(const std::string& text);

/// Every b1 row with its b3 factor, every b2/b4/b5 row: one task per combination.
struct RowCombination {
  RawRow b1, b2, b3, b4, b5;
};

std::vector<RowCombination> all_row_combinations(const std::filesystem::path& pack_dir);

/// Speeds offered to the solver: the interval endpoints, its midpoint and one value just outside.
std::vector<double> speed_probes(const RawRow& b1);

/// Task text pinning every operation field except speed and feed.
std::string combination_task(const RowCombination& c, const std::vector<double>& speeds);

std::string number_text(double v);

}  // namespace lmtest
