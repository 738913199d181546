#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "netobs/error.hpp"
#include "netobs/units.hpp"

namespace netobs {

enum class MethodClass { passive_export, active_probe, in_band };

inline const char* to_string(MethodClass c) {
  switch (c) {
    case MethodClass::passive_export: return "passive_export";
    case MethodClass::active_probe: return "active_probe";
    case MethodClass::in_band: return "in_band";
  }
  return "?";
}

// Constant-bit-rate traffic source. packet_bits includes every header
// carried on the wire above layer 1.
struct FlowSpec {
  std::string id;
  BitRate user_rate;
  std::uint64_t packet_bits = 0;

  // Seconds between two consecutive packets.
  double packet_interval() const { return static_cast<double>(packet_bits) / user_rate.value(); }

  friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

struct LinkSpec {
  BitRate capacity;
  // Admission treats capacity as unbounded; capacity is kept for reporting.
  bool overprovisioned = false;

  friend bool operator==(const LinkSpec&, const LinkSpec&) = default;
};

// Export or probe messages sent every `period`.
struct PeriodicParams {
  Duration period;
  // Detection fires this many periods after the last arrival.
  double timeout_multiplier = 1.0;

  friend bool operator==(const PeriodicParams&, const PeriodicParams&) = default;
};

// One of every `sampling_ratio` data packets grows by encap + hops * per_hop.
struct InBandParams {
  std::uint64_t sampling_ratio = 1;
  std::uint64_t hops = 1;
  OverheadBits encap;
  OverheadBits per_hop;

  friend bool operator==(const InBandParams&, const InBandParams&) = default;
};

class MeasurementMethod {
 public:
  static MeasurementMethod active_probe(std::string id, OverheadBits message, Duration period) {
    return MeasurementMethod(std::move(id), MethodClass::active_probe, message,
                             PeriodicParams{period});
  }

  static MeasurementMethod passive_export(std::string id, OverheadBits message, Duration period) {
    return MeasurementMethod(std::move(id), MethodClass::passive_export, message,
                             PeriodicParams{period});
  }

  static MeasurementMethod in_band(std::string id, OverheadBits encap, std::uint64_t hops,
                                   OverheadBits per_hop, std::uint64_t sampling_ratio) {
    if (hops == 0) throw Error(ErrorCode::invalid_argument, "in-band hop count must be >= 1");
    if (sampling_ratio == 0) {
      throw Error(ErrorCode::invalid_argument, "sampling ratio must be >= 1");
    }
    const OverheadBits total = encap + per_hop * hops;
    return MeasurementMethod(std::move(id), MethodClass::in_band, total,
                             InBandParams{sampling_ratio, hops, encap, per_hop});
  }

  const std::string& id() const noexcept { return id_; }
  MethodClass method_class() const noexcept { return class_; }
  OverheadBits message_bits() const noexcept { return message_; }
  bool is_periodic() const noexcept { return class_ != MethodClass::in_band; }

  const PeriodicParams& periodic_params() const {
    if (const auto* p = std::get_if<PeriodicParams>(&params_)) return *p;
    throw Error(ErrorCode::invalid_argument, "method '" + id_ + "' is not periodic");
  }
  const InBandParams& in_band_params() const {
    if (const auto* p = std::get_if<InBandParams>(&params_)) return *p;
    throw Error(ErrorCode::invalid_argument, "method '" + id_ + "' is not in-band");
  }

  // Flow this method is attached to. Periodic methods attribute their
  // overhead to it; in-band methods only mark its packets. Empty means all
  // flows for in-band and unattributed for periodic methods.
  const std::optional<std::string>& flow() const noexcept { return flow_; }

  MeasurementMethod with_id(std::string id) const {
    MeasurementMethod m = *this;
    m.id_ = std::move(id);
    return m;
  }
  MeasurementMethod with_flow(std::string flow_id) const {
    MeasurementMethod m = *this;
    m.flow_ = std::move(flow_id);
    return m;
  }
  MeasurementMethod with_period(Duration period) const {
    MeasurementMethod m = *this;
    m.params_ = PeriodicParams{period, periodic_params().timeout_multiplier};
    return m;
  }
  MeasurementMethod with_timeout_multiplier(double k) const {
    if (!(k > 0.0)) throw Error(ErrorCode::invalid_argument, "timeout multiplier must be > 0");
    MeasurementMethod m = *this;
    m.params_ = PeriodicParams{periodic_params().period, k};
    return m;
  }
  MeasurementMethod with_sampling_ratio(std::uint64_t s) const {
    const auto& p = in_band_params();
    MeasurementMethod m = in_band(id_, p.encap, p.hops, p.per_hop, s);
    m.flow_ = flow_;
    return m;
  }

  friend bool operator==(const MeasurementMethod&, const MeasurementMethod&) = default;

 private:
  MeasurementMethod(std::string id, MethodClass cls, OverheadBits message,
                    std::variant<PeriodicParams, InBandParams> params)
      : id_(std::move(id)), class_(cls), message_(message), params_(std::move(params)) {}

  std::string id_;
  MethodClass class_;
  OverheadBits message_;
  std::variant<PeriodicParams, InBandParams> params_;
  std::optional<std::string> flow_;
};

}  // namespace netobs
