#include "stc/error.hpp"

namespace stc {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kMalformedPath: return "MalformedPath";
    case ErrorCode::kMalformedTrace: return "MalformedTrace";
    case ErrorCode::kInvalidTrace: return "InvalidTrace";
    case ErrorCode::kPathMismatch: return "PathMismatch";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kNotYetExisting: return "NotYetExisting";
    case ErrorCode::kUnknownRelationship: return "UnknownRelationship";
    case ErrorCode::kNoPredecessor: return "NoPredecessor";
    case ErrorCode::kNoSuccessor: return "NoSuccessor";
    case ErrorCode::kInsufficientHistory: return "InsufficientHistory";
    case ErrorCode::kStoreNotEmpty: return "StoreNotEmpty";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace stc
