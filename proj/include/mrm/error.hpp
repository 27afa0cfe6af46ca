#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mrm {

enum class ErrorCode {
  InvalidMachine,
  ParseError,
  InvalidShape,
  MalformedRow,
  HeadOutOfBounds,
  TimeExceeded,
  SpaceExceeded,
  OutputTooLarge,
  NoHead,
  MultipleHeads,
  MalformedBlock,
  OutOfRange,
  IncompleteBundle,
  DivergesOutsideWindow,
  PreconditionViolated,
  EmptyInterval,
  InvalidChoice,
  InvalidStrategy,
  ProtocolViolation,
};

std::string_view to_string(ErrorCode code);

// Every failure surfaced by the library carries one of the codes above so
// callers (the CLI in particular) can map them onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mrm
