#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace jetlag {

enum class ErrorCode {
  contract_mismatch,
  singular_metric,
  raise_lower_mismatch,
  order_exceeded,
  parse,
  evaluation_domain,
  regularity_violation,
  precondition,
  vacuum_constant,
  natural_form_unavailable,
  config,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class SingularMetricError : public Error {
 public:
  SingularMetricError(const std::string& what, double det_estimate, double condition)
      : Error(ErrorCode::singular_metric, what),
        det_estimate_(det_estimate),
        condition_(condition) {}
  double det_estimate() const noexcept { return det_estimate_; }
  double condition() const noexcept { return condition_; }

 private:
  double det_estimate_;
  double condition_;
};

/// Raised by the expression parser. `offset` is a byte offset into the source.
class ParseError : public Error {
 public:
  ParseError(std::size_t offset, std::string expected, std::string excerpt);
  std::size_t offset() const noexcept { return offset_; }
  const std::string& expected() const noexcept { return expected_; }
  const std::string& excerpt() const noexcept { return excerpt_; }

 private:
  std::size_t offset_;
  std::string expected_;
  std::string excerpt_;
};

/// Raised when a numeric operation leaves the smooth real domain (log of a
/// non-positive number, division by zero, overflow, ...). `position` is the
/// source offset of the offending expression node when known, npos otherwise.
class DomainError : public Error {
 public:
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  explicit DomainError(const std::string& what, std::size_t position = npos)
      : Error(ErrorCode::evaluation_domain, what), position_(position) {}
  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace jetlag
