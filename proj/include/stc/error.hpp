#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace stc {

enum class ErrorCode {
  kMalformedPath,
  kMalformedTrace,
  kInvalidTrace,
  kPathMismatch,
  kIoFailure,
  kNotYetExisting,
  kUnknownRelationship,
  kNoPredecessor,
  kNoSuccessor,
  kInsufficientHistory,
  kStoreNotEmpty,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries one of the codes above so
/// callers (the CLI, the Python module) can map it without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace stc
