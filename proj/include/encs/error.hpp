#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace encs {

// Machine-readable error codes. The HTTP service reports these verbatim.
enum class ErrorCode {
  kInvalidInput,
  kSimplexViolation,
  kDegenerate,
  kNeverBreaksEven,
  kUnknownPreset,
  kUnknownFormat,
  kInvalidJson,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message, std::string field_path = {})
      : std::runtime_error(message), code_(code), field_path_(std::move(field_path)) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& field_path() const noexcept { return field_path_; }

 private:
  ErrorCode code_;
  std::string field_path_;
};

class InvalidInput : public Error {
 public:
  explicit InvalidInput(const std::string& message, std::string field_path = {})
      : Error(ErrorCode::kInvalidInput, message, std::move(field_path)) {}
};

class SimplexViolation : public Error {
 public:
  explicit SimplexViolation(const std::string& message, std::string field_path = {})
      : Error(ErrorCode::kSimplexViolation, message, std::move(field_path)) {}
};

// Degenerate statistical input: constant design, constant series, all-zero prediction.
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& message)
      : Error(ErrorCode::kDegenerate, message) {}
};

// ENCS does not exceed per-message maintenance; the investment is never recovered.
class NeverBreaksEven : public Error {
 public:
  explicit NeverBreaksEven(const std::string& message)
      : Error(ErrorCode::kNeverBreaksEven, message) {}
};

class UnknownPreset : public Error {
 public:
  explicit UnknownPreset(const std::string& name)
      : Error(ErrorCode::kUnknownPreset, "unknown preset: " + name) {}
};

}  // namespace encs
