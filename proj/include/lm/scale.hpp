#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "lm/value.hpp"

namespace lm {

/// Mathematical model of a magnitude. Builtin scales: `number`, `integer`, `symbol`.
struct Scale {
  enum class Kind { Dimensional, Integer, Scalar, Structural, IntervalOf, Symbol };

  std::string name;
  Kind kind = Kind::Dimensional;
  std::string unit;                                         // dimensional
  std::vector<std::string> scalars;                         // scalar, declaration order
  std::vector<std::pair<std::string, std::string>> fields;  // structural: field -> scale
  std::string base;                                         // interval-of: dimensional scale
  bool builtin = false;

  bool operator==(const Scale&) const = default;
};

using FieldPath = std::vector<std::string>;

class ScaleSystem {
 public:
  ScaleSystem();

  /// Throws DuplicateSymbol when the name is taken.
  void add(Scale scale);
  const Scale* find(const std::string& name) const;
  const Scale& get(const std::string& name) const;  // throws UnknownScale
  bool contains(const std::string& name) const { return find(name) != nullptr; }

  /// Checks references, non-empty scalar scales, unique field names and acyclicity.
  void validate() const;

  bool conforms(const Value& value, const std::string& scale) const;
  /// Member of the universe of A0: every non-symbol value that some scale admits.
  bool in_base_universe(const Value& value) const;
  bool is_scalar_name(const std::string& name) const;
  /// Name of an interval-of scale's unit (via its dimensional base).
  std::string interval_unit(const Scale& scale) const;

  /// Leaf field paths of a scale; a non-structural scale has the single empty path.
  std::vector<FieldPath> leaf_paths(const std::string& scale) const;
  /// Scale reached by following a field path from `scale`; nullptr if the path is invalid.
  const Scale* scale_at(const std::string& scale, const FieldPath& path) const;

  /// User-declared scales in declaration order.
  std::vector<const Scale*> declared() const;

  bool operator==(const ScaleSystem& other) const;

 private:
  std::map<std::string, Scale> scales_;
  std::vector<std::string> order_;
};

/// Reads `value` along `path`; nullptr when a step is not a composite field.
const Value* value_at(const Value& value, const FieldPath& path);
/// Copy of `value` with the field at `path` replaced.
Value with_value_at(const Value& value, const FieldPath& path, Value replacement);

}  // namespace lm
