#include "lm/scale.hpp"

#include <algorithm>
#include <set>

#include "lm/error.hpp"

namespace lm {

ScaleSystem::ScaleSystem() {
  auto builtin = [this](std::string name, Scale::Kind kind) {
    Scale s;
    s.name = std::move(name);
    s.kind = kind;
    s.builtin = true;
    scales_.emplace(s.name, s);
  };
  builtin("number", Scale::Kind::Dimensional);
  builtin("integer", Scale::Kind::Integer);
  builtin("symbol", Scale::Kind::Symbol);
}

void ScaleSystem::add(Scale scale) {
  if (scales_.count(scale.name))
    throw Error(ErrorCode::DuplicateSymbol, "scale '" + scale.name + "' declared twice");
  order_.push_back(scale.name);
  auto name = scale.name;
  scales_.emplace(std::move(name), std::move(scale));
}

const Scale* ScaleSystem::find(const std::string& name) const {
  auto it = scales_.find(name);
  return it == scales_.end() ? nullptr : &it->second;
}

const Scale& ScaleSystem::get(const std::string& name) const {
  if (const Scale* s = find(name)) return *s;
  throw Error(ErrorCode::UnknownScale, "unknown scale '" + name + "'");
}

void ScaleSystem::validate() const {
  for (const auto& name : order_) {
    const Scale& s = scales_.at(name);
    switch (s.kind) {
      case Scale::Kind::Scalar: {
        if (s.scalars.empty())
          throw Error(ErrorCode::ScaleMismatch, "scalar scale '" + name + "' is empty");
        std::set<std::string> seen(s.scalars.begin(), s.scalars.end());
        if (seen.size() != s.scalars.size())
          throw Error(ErrorCode::DuplicateSymbol, "scalar scale '" + name + "' repeats a name");
        break;
      }
      case Scale::Kind::IntervalOf: {
        const Scale& base = get(s.base);
        if (base.kind != Scale::Kind::Dimensional && base.kind != Scale::Kind::Integer)
          throw Error(ErrorCode::ScaleMismatch,
                      "interval scale '" + name + "' must be based on a dimensional scale");
        break;
      }
      case Scale::Kind::Structural: {
        std::set<std::string> seen;
        for (const auto& [field, scale] : s.fields) {
          if (!seen.insert(field).second)
            throw Error(ErrorCode::DuplicateSymbol,
                        "structure '" + name + "' repeats field '" + field + "'");
          get(scale);
        }
        break;
      }
      default:
        break;
    }
  }
  // Cycle detection over structural references.
  std::map<std::string, int> state;  // 1 = on stack, 2 = done
  auto visit = [&](auto&& self, const std::string& name) -> void {
    int& st = state[name];
    if (st == 2) return;
    if (st == 1)
      throw Error(ErrorCode::CyclicStructure, "structure '" + name + "' refers to itself");
    st = 1;
    const Scale& s = get(name);
    if (s.kind == Scale::Kind::Structural)
      for (const auto& f : s.fields) self(self, f.second);
    state[name] = 2;
  };
  for (const auto& name : order_) visit(visit, name);
}

std::string ScaleSystem::interval_unit(const Scale& scale) const {
  if (scale.kind != Scale::Kind::IntervalOf) return {};
  const Scale* base = find(scale.base);
  return base ? base->unit : std::string();
}

bool ScaleSystem::conforms(const Value& value, const std::string& scale_name) const {
  const Scale* s = find(scale_name);
  if (!s) return false;
  switch (s->kind) {
    case Scale::Kind::Dimensional:
      return value.is_number();
    case Scale::Kind::Integer:
      return value.is_number() && value.as_number().is_integer();
    case Scale::Kind::Scalar:
      return value.is_scalar() &&
             std::find(s->scalars.begin(), s->scalars.end(), value.as_scalar()) !=
                 s->scalars.end();
    case Scale::Kind::IntervalOf:
      return value.is_interval() && value.as_interval().unit == interval_unit(*s);
    case Scale::Kind::Symbol:
      return value.is_symbol();
    case Scale::Kind::Structural: {
      if (!value.is_composite()) return false;
      const auto& c = value.as_composite();
      if (c.structure != s->name || c.names.size() != s->fields.size()) return false;
      for (std::size_t i = 0; i < s->fields.size(); ++i) {
        if (c.names[i] != s->fields[i].first) return false;
        if (!conforms(c.values[i], s->fields[i].second)) return false;
      }
      return true;
    }
  }
  return false;
}

bool ScaleSystem::in_base_universe(const Value& value) const {
  switch (value.kind()) {
    case Value::Kind::Number:
    case Value::Kind::Interval:
      return true;
    case Value::Kind::Scalar:
      return is_scalar_name(value.as_scalar());
    case Value::Kind::Composite:
      return conforms(value, value.as_composite().structure);
    case Value::Kind::Symbol:
      return false;
  }
  return false;
}

bool ScaleSystem::is_scalar_name(const std::string& name) const {
  for (const auto& [_, s] : scales_)
    if (s.kind == Scale::Kind::Scalar &&
        std::find(s.scalars.begin(), s.scalars.end(), name) != s.scalars.end())
      return true;
  return false;
}

std::vector<FieldPath> ScaleSystem::leaf_paths(const std::string& scale) const {
  const Scale& s = get(scale);
  if (s.kind != Scale::Kind::Structural) return {FieldPath{}};
  std::vector<FieldPath> out;
  for (const auto& [field, sub] : s.fields)
    for (auto& tail : leaf_paths(sub)) {
      FieldPath p{field};
      p.insert(p.end(), tail.begin(), tail.end());
      out.push_back(std::move(p));
    }
  return out;
}

const Scale* ScaleSystem::scale_at(const std::string& scale, const FieldPath& path) const {
  const Scale* s = find(scale);
  for (const auto& step : path) {
    if (!s || s->kind != Scale::Kind::Structural) return nullptr;
    const Scale* next = nullptr;
    for (const auto& [field, sub] : s->fields)
      if (field == step) next = find(sub);
    s = next;
  }
  return s;
}

std::vector<const Scale*> ScaleSystem::declared() const {
  std::vector<const Scale*> out;
  for (const auto& name : order_) out.push_back(&scales_.at(name));
  return out;
}

bool ScaleSystem::operator==(const ScaleSystem& other) const {
  return order_ == other.order_ && scales_ == other.scales_;
}

const Value* value_at(const Value& value, const FieldPath& path) {
  const Value* v = &value;
  for (const auto& step : path) {
    if (!v->is_composite()) return nullptr;
    v = v->as_composite().field(step);
    if (!v) return nullptr;
  }
  return v;
}

Value with_value_at(const Value& value, const FieldPath& path, Value replacement) {
  if (path.empty()) return replacement;
  const auto& c = value.as_composite();
  std::vector<Value> values = c.values;
  for (std::size_t i = 0; i < c.names.size(); ++i)
    if (c.names[i] == path.front())
      values[i] = with_value_at(values[i], FieldPath(path.begin() + 1, path.end()),
                                std::move(replacement));
  return Value::composite(c.structure, c.names, std::move(values));
}

}  // namespace lm
