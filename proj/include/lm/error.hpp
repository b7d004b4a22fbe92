#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace lm {

enum class ErrorCode {
  // signature / tables
  DuplicateSymbol,
  BadArity,
  EmptyLevelZero,
  FunctionalConflict,
  ScaleMismatch,
  ArityMismatch,
  CyclicStructure,
  // language
  SyntaxError,
  UnknownSymbol,
  UnknownScale,
  UnknownField,
  LevelViolation,
  QuantifierRejected,
  DeltaWithoutUnknown,
  SecondOrderInDelta,
  EmptyOutput,
  // semantics
  UnboundVariable,
  NotRelevant,
  // solving
  UnboundedUnknown,
  LimitExceeded,
  BoundExceeded,
  PsiNotNumeric,
  // reduction
  OrderTooLow,
  NonTableInterpretation,
  SignatureMismatch,
  // adequacy / packs
  NoFacts,
  EmptyCorpus,
  ManifestMissing,
  ZeroDiameter,
  Io,
};

std::string_view to_string(ErrorCode code);

struct SourcePos {
  std::string file;
  std::uint32_t line = 0;
  std::uint32_t column = 0;

  bool valid() const { return line != 0; }
  std::string str() const;
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, SourcePos pos = {});

  ErrorCode code() const { return code_; }
  const SourcePos& pos() const { return pos_; }
  const std::string& detail() const { return detail_; }

 private:
  ErrorCode code_;
  SourcePos pos_;
  std::string detail_;
};

}  // namespace lm
