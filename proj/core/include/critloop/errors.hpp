#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace critloop {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid or inconsistent configuration / input data shape.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A documented precondition was violated by the caller.
class ContractViolation : public Error {
 public:
  using Error::Error;
};

// A remote endpoint failed after the retry budget was exhausted,
// or replied with a non-retryable status.
class EndpointError : public Error {
 public:
  EndpointError(std::string endpoint_id, int last_status, const std::string& what)
      : Error(what), endpoint_id_(std::move(endpoint_id)), last_status_(last_status) {}

  const std::string& endpoint_id() const { return endpoint_id_; }
  int last_status() const { return last_status_; }

 private:
  std::string endpoint_id_;
  int last_status_;
};

// The endpoint answered but the reply does not match the wire contract.
class WireError : public Error {
 public:
  using Error::Error;
};

// Critique text could not be parsed into the (reasoning, verdict, comment) triple.
class ParseError : public Error {
 public:
  enum class Code { no_verdict, no_comment };

  ParseError(Code code, const std::string& what) : Error(what), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

// A judge endpoint reply carried no recognizable classification label.
class JudgeParseError : public Error {
 public:
  using Error::Error;
};

// A training batch could not be exported (incomplete groups, wrong input count).
class BatchError : public Error {
 public:
  explicit BatchError(const std::string& what, std::vector<int> missing_indices = {})
      : Error(what), missing_indices_(std::move(missing_indices)) {}

  const std::vector<int>& missing_indices() const { return missing_indices_; }

 private:
  std::vector<int> missing_indices_;
};

}  // namespace critloop
