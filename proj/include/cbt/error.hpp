#pragma once

#include <stdexcept>
#include <string>

namespace cbt {

enum class ErrorCode {
  invalid_argument,
  invalid_domain,
  capacity,
  model_violation,
  invalid_network,
  protocol_refused,
  parse,
};

const char* to_string(ErrorCode code) noexcept;

/// Base of every error thrown by the library. The code survives the C API
/// boundary as a status value.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what)
      : Error(ErrorCode::invalid_argument, what) {}
};

class InvalidDomain : public Error {
 public:
  explicit InvalidDomain(const std::string& what)
      : Error(ErrorCode::invalid_domain, what) {}
};

/// A resource limit (memory, state-space size, sample supply) cannot be met.
/// The message names the failing constraint.
class CapacityError : public Error {
 public:
  explicit CapacityError(const std::string& what)
      : Error(ErrorCode::capacity, what) {}
};

class ModelViolation : public Error {
 public:
  explicit ModelViolation(const std::string& what)
      : Error(ErrorCode::model_violation, what) {}
};

class InvalidNetwork : public Error {
 public:
  explicit InvalidNetwork(const std::string& what)
      : Error(ErrorCode::invalid_network, what) {}
};

class ProtocolRefused : public Error {
 public:
  explicit ProtocolRefused(const std::string& what)
      : Error(ErrorCode::protocol_refused, what) {}
};

class ParseError : public Error {
 public:
  explicit ParseError(const std::string& what) : Error(ErrorCode::parse, what) {}
};

}  // namespace cbt
