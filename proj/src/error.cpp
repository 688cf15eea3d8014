#include "jetlag/error.hpp"

namespace jetlag {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::contract_mismatch: return "contract-mismatch";
    case ErrorCode::singular_metric: return "singular-metric";
    case ErrorCode::raise_lower_mismatch: return "raise-lower-mismatch";
    case ErrorCode::order_exceeded: return "order-exceeded";
    case ErrorCode::parse: return "parse";
    case ErrorCode::evaluation_domain: return "evaluation-domain";
    case ErrorCode::regularity_violation: return "regularity-violation";
    case ErrorCode::precondition: return "precondition";
    case ErrorCode::vacuum_constant: return "vacuum-constant";
    case ErrorCode::natural_form_unavailable: return "natural-form-unavailable";
    case ErrorCode::config: return "config";
  }
  return "unknown";
}

ParseError::ParseError(std::size_t offset, std::string expected, std::string excerpt)
    : Error(ErrorCode::parse, "parse error at offset " + std::to_string(offset) + ": expected " +
                                  expected + " near '" + excerpt + "'"),
      offset_(offset),
      expected_(std::move(expected)),
      excerpt_(std::move(excerpt)) {}

}  // namespace jetlag
