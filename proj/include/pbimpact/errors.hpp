#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pbimpact {

enum class ErrorCode {
  // ingestion
  MissingSection,
  MissingKey,
  MissingColumn,
  MalformedNumber,
  MalformedRow,
  UnknownProjectRef,
  DuplicateVoterId,
  DuplicateProjectId,
  UnsupportedVoteType,
  UnsupportedLayout,
  CountMismatch,
  EmptyInput,
  IoError,
  DirectoryUnreadable,
  // model and rules
  InvalidInstance,
  OrdinalUnsupported,
  NonApprovalUnsupported,
  NoVoters,
  EmptyInstance,
  InstanceMismatch,
  // metrics
  UnknownVoter,
  InvalidKey,
  UndefinedOperand,
  DivisionByZero,
  // statistics
  LengthMismatch,
  ZeroVariance,
  TooFewPoints,
  ZeroVarianceDifferences,
  RankDeficient,
  TooFewRows,
  // corpus
  EmptyCorpus,
  NoUsableRows,
  UsageError,
};

std::string_view to_string(ErrorCode code);
std::optional<ErrorCode> error_code_from_string(std::string_view name);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace pbimpact
