#pragma once

#include <stdexcept>
#include <string>

namespace netobs {

enum class ErrorCode {
  invalid_argument,
  negative_rate,
  no_flows,
  duplicate_flow_id,
  zero_rate,
  zero_capacity,
  unknown_flow,
  unknown_method,
  unknown_preset,
  period_exceeds_horizon,
  no_carrier_packets,
  scale_cap_exceeded,
  config_unknown_key,
  config_missing_field,
  config_unit_parse,
  config_invalid,
  io,
};

inline const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::negative_rate: return "negative rate";
    case ErrorCode::no_flows: return "no flows";
    case ErrorCode::duplicate_flow_id: return "duplicate flow id";
    case ErrorCode::zero_rate: return "zero rate";
    case ErrorCode::zero_capacity: return "zero capacity";
    case ErrorCode::unknown_flow: return "unknown flow";
    case ErrorCode::unknown_method: return "unknown method";
    case ErrorCode::unknown_preset: return "unknown preset";
    case ErrorCode::period_exceeds_horizon: return "period exceeds horizon";
    case ErrorCode::no_carrier_packets: return "no carrier packets";
    case ErrorCode::scale_cap_exceeded: return "scale cap exceeded";
    case ErrorCode::config_unknown_key: return "unknown key";
    case ErrorCode::config_missing_field: return "missing required field";
    case ErrorCode::config_unit_parse: return "unit parse failure";
    case ErrorCode::config_invalid: return "invalid config";
    case ErrorCode::io: return "i/o failure";
  }
  return "unknown error";
}

// All library failures surface as this exception. The message always starts
// with the code's name so diagnostics can be matched on text as well.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(detail.empty() ? std::string(to_string(code))
                                          : std::string(to_string(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace netobs
