#include "lm/signature.hpp"

#include "lm/error.hpp"

namespace lm {

std::string_view to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::Objective: return "objective";
    case SymbolKind::Functional: return "functional";
    case SymbolKind::Predicate: return "predicate";
  }
  return "?";
}

const Symbol* Signature::find(const std::string& name) const {
  auto it = index_.find(name);
  if (it == index_.end()) return nullptr;
  return &levels_[it->second.first][it->second.second];
}

const std::vector<Symbol>& Signature::level(int level) const {
  static const std::vector<Symbol> empty;
  if (level < 0 || level >= static_cast<int>(levels_.size())) return empty;
  return levels_[level];
}

std::vector<Symbol> Signature::declarations() const {
  std::vector<Symbol> out;
  for (const auto& lvl : levels_) out.insert(out.end(), lvl.begin(), lvl.end());
  return out;
}

Signature build_signature(std::vector<Symbol> declarations) {
  Signature sig;
  for (auto& sym : declarations) {
    if (sym.level < 0)
      throw Error(ErrorCode::LevelViolation, "symbol '" + sym.name + "' has a negative level");
    if (sym.kind == SymbolKind::Objective) {
      sym.arity.reset();
    } else if (!sym.arity || *sym.arity < 1) {
      throw Error(ErrorCode::BadArity, "symbol '" + sym.name + "' needs an arity of at least 1");
    }
    if (auto it = sig.index_.find(sym.name); it != sig.index_.end()) {
      throw Error(ErrorCode::DuplicateSymbol,
                  "symbol '" + sym.name + "' declared at level " +
                      std::to_string(it->second.first) + " and level " +
                      std::to_string(sym.level));
    }
    if (static_cast<int>(sig.levels_.size()) <= sym.level) sig.levels_.resize(sym.level + 1);
    auto& bucket = sig.levels_[sym.level];
    sig.index_[sym.name] = {sym.level, bucket.size()};
    bucket.push_back(std::move(sym));
  }
  if (sig.levels_.empty() || sig.levels_[0].empty())
    throw Error(ErrorCode::EmptyLevelZero, "level 0 must contain the builtin core");
  while (sig.levels_.size() > 2 && sig.levels_.back().empty()) sig.levels_.pop_back();
  int top = 1;
  for (int i = 2; i < static_cast<int>(sig.levels_.size()); ++i)
    if (!sig.levels_[i].empty()) top = i;
  sig.order_ = top;
  return sig;
}

const std::vector<Symbol>& builtin_symbols() {
  static const std::vector<Symbol> core = [] {
    std::vector<Symbol> out;
    auto add = [&](const char* name, SymbolKind kind, int arity) {
      Symbol s;
      s.name = name;
      s.kind = kind;
      if (kind != SymbolKind::Objective) s.arity = arity;
      s.builtin = true;
      if (kind == SymbolKind::Objective) s.result_scale = "number";
      out.push_back(std::move(s));
    };
    add("pi", SymbolKind::Objective, 0);
    for (const char* f : {"plus", "minus", "times", "div", "min", "max"})
      add(f, SymbolKind::Functional, 2);
    for (const char* f : {"neg", "abs", "lower", "upper", "midpoint"})
      add(f, SymbolKind::Functional, 1);
    for (const char* p : {"eq", "lt", "le", "gt", "ge", "member"})
      add(p, SymbolKind::Predicate, 2);
    return out;
  }();
  return core;
}

std::string_view infix_spelling(const std::string& builtin) {
  static const std::map<std::string, std::string_view> table = {
      {"plus", "+"}, {"minus", "-"}, {"times", "*"}, {"div", "/"},
      {"eq", "="},   {"lt", "<"},    {"le", "<="},   {"gt", ">"},
      {"ge", ">="},  {"member", "in"},
  };
  auto it = table.find(builtin);
  return it == table.end() ? std::string_view{} : it->second;
}

}  // namespace lm
