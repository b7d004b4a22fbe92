#include "lm/error.hpp"

namespace lm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DuplicateSymbol: return "DuplicateSymbol";
    case ErrorCode::BadArity: return "BadArity";
    case ErrorCode::EmptyLevelZero: return "EmptyLevelZero";
    case ErrorCode::FunctionalConflict: return "FunctionalConflict";
    case ErrorCode::ScaleMismatch: return "ScaleMismatch";
    case ErrorCode::ArityMismatch: return "ArityMismatch";
    case ErrorCode::CyclicStructure: return "CyclicStructure";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownSymbol: return "UnknownSymbol";
    case ErrorCode::UnknownScale: return "UnknownScale";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::LevelViolation: return "LevelViolation";
    case ErrorCode::QuantifierRejected: return "QuantifierRejected";
    case ErrorCode::DeltaWithoutUnknown: return "DeltaWithoutUnknown";
    case ErrorCode::SecondOrderInDelta: return "SecondOrderInDelta";
    case ErrorCode::EmptyOutput: return "EmptyOutput";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::NotRelevant: return "NotRelevant";
    case ErrorCode::UnboundedUnknown: return "UnboundedUnknown";
    case ErrorCode::LimitExceeded: return "LimitExceeded";
    case ErrorCode::BoundExceeded: return "BoundExceeded";
    case ErrorCode::PsiNotNumeric: return "PsiNotNumeric";
    case ErrorCode::OrderTooLow: return "OrderTooLow";
    case ErrorCode::NonTableInterpretation: return "NonTableInterpretation";
    case ErrorCode::SignatureMismatch: return "SignatureMismatch";
    case ErrorCode::NoFacts: return "NoFacts";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::ManifestMissing: return "ManifestMissing";
    case ErrorCode::ZeroDiameter: return "ZeroDiameter";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

std::string SourcePos::str() const {
  std::string out = file.empty() ? std::string("<input>") : file;
  out += ':' + std::to_string(line) + ':' + std::to_string(column);
  return out;
}

namespace {

std::string compose(ErrorCode code, const std::string& message, const SourcePos& pos) {
  std::string out;
  if (pos.valid()) out += pos.str() + ": ";
  out += std::string(to_string(code)) + ": " + message;
  return out;
}

}  // namespace

Error::Error(ErrorCode code, const std::string& message, SourcePos pos)
    : std::runtime_error(compose(code, message, pos)),
      code_(code),
      pos_(std::move(pos)),
      detail_(message) {}

}  // namespace lm
