#pragma once

#include "netobs/method.hpp"
#include "netobs/units.hpp"

namespace netobs {

// Overhead bits emitted per measurement period. This is the method's
// observer factor: the lower bound of uncertainty times impact.
inline OverheadBits observer_factor(const MeasurementMethod& method) {
  return method.message_bits();
}

// Interval between two measurements. In-band sampling turns the packet
// spacing of the carrier flow into a period: s * L / R.
inline Duration effective_period(const MeasurementMethod& method, const FlowSpec& flow) {
  if (method.is_periodic()) return method.periodic_params().period;
  const auto s = static_cast<double>(method.in_band_params().sampling_ratio);
  return Duration(s * static_cast<double>(flow.packet_bits) / flow.user_rate.value());
}

// Mean overhead rate Ov. Equals observer_factor / effective_period; the
// in-band form is evaluated directly so the user rate cancels exactly.
inline BitRate overhead_rate(const MeasurementMethod& method, const FlowSpec& flow) {
  const auto theta = static_cast<double>(observer_factor(method).bits());
  if (method.is_periodic()) return BitRate(theta / method.periodic_params().period.value());
  const auto s = static_cast<double>(method.in_band_params().sampling_ratio);
  return BitRate(theta * flow.user_rate.value() / (s * static_cast<double>(flow.packet_bits)));
}

inline Uncertainty uncertainty_of(const MeasurementMethod& method, double metric_slope,
                                  const FlowSpec& flow, std::string metric_name = "metric") {
  return Uncertainty(std::move(metric_name), metric_slope, effective_period(method, flow));
}

inline Uncertainty detection_uncertainty(const MeasurementMethod& method, const FlowSpec& flow) {
  return Uncertainty::detection_time(effective_period(method, flow));
}

}  // namespace netobs
