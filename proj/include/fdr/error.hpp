#pragma once

#include <stdexcept>
#include <string>

namespace fdr {

enum class ErrorCode {
  Io,
  Schema,
  Config,
  InvalidArgument,
  EmptyGroundTruth,
  NotFound,
  MalformedTable,
};

const char* to_string(ErrorCode code) noexcept;

// All recoverable failures in the engine surface as this exception; the C API
// maps `code()` onto its status enum.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::Io: return "IoError";
    case ErrorCode::Schema: return "SchemaError";
    case ErrorCode::Config: return "ConfigError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::MalformedTable: return "MalformedTable";
  }
  return "Unknown";
}

}  // namespace fdr
