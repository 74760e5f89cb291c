#include "pbimpact/errors.hpp"

namespace pbimpact {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingSection: return "MissingSection";
    case ErrorCode::MissingKey: return "MissingKey";
    case ErrorCode::MissingColumn: return "MissingColumn";
    case ErrorCode::MalformedNumber: return "MalformedNumber";
    case ErrorCode::MalformedRow: return "MalformedRow";
    case ErrorCode::UnknownProjectRef: return "UnknownProjectRef";
    case ErrorCode::DuplicateVoterId: return "DuplicateVoterId";
    case ErrorCode::DuplicateProjectId: return "DuplicateProjectId";
    case ErrorCode::UnsupportedVoteType: return "UnsupportedVoteType";
    case ErrorCode::UnsupportedLayout: return "UnsupportedLayout";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::DirectoryUnreadable: return "DirectoryUnreadable";
    case ErrorCode::InvalidInstance: return "InvalidInstance";
    case ErrorCode::OrdinalUnsupported: return "OrdinalUnsupported";
    case ErrorCode::NonApprovalUnsupported: return "NonApprovalUnsupported";
    case ErrorCode::NoVoters: return "NoVoters";
    case ErrorCode::EmptyInstance: return "EmptyInstance";
    case ErrorCode::InstanceMismatch: return "InstanceMismatch";
    case ErrorCode::UnknownVoter: return "UnknownVoter";
    case ErrorCode::InvalidKey: return "InvalidKey";
    case ErrorCode::UndefinedOperand: return "UndefinedOperand";
    case ErrorCode::DivisionByZero: return "DivisionByZero";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::ZeroVariance: return "ZeroVariance";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::ZeroVarianceDifferences: return "ZeroVarianceDifferences";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::TooFewRows: return "TooFewRows";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::NoUsableRows: return "NoUsableRows";
    case ErrorCode::UsageError: return "UsageError";
  }
  return "Unknown";
}

std::optional<ErrorCode> error_code_from_string(std::string_view name) {
  for (int i = 0; i <= static_cast<int>(ErrorCode::UsageError); ++i) {
    const auto code = static_cast<ErrorCode>(i);
    if (to_string(code) == name) return code;
  }
  return std::nullopt;
}

}  // namespace pbimpact
