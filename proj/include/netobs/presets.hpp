#pragma once

#include <algorithm>
#include <array>
#include <span>
#include <sstream>
#include <string>
#include <string_view>

#include "netobs/error.hpp"
#include "netobs/method.hpp"
#include "netobs/overhead.hpp"

namespace netobs {

struct Preset {
  std::string_view name;
  std::string_view summary;
  // Optional itemization of the encapsulation octets, e.g. "44+4+8".
  std::string_view encap_parts;
  MeasurementMethod (*make)();
};

namespace presets {

// Ethernet OAM continuity check, one 101-byte CCM per period.
inline MeasurementMethod ccm_101() {
  return MeasurementMethod::active_probe("ccm-101", OverheadBits::from_octets(101),
                                         Duration::seconds(1.0));
}

// gNMI counter streaming, one 204-byte telemetry message per period.
inline MeasurementMethod gnmi_204() {
  return MeasurementMethod::passive_export("gnmi-204", OverheadBits::from_octets(204),
                                           Duration::seconds(1.0));
}

inline constexpr std::uint64_t ioam_tunnel_octets = 44;
inline constexpr std::uint64_t ioam_option_octets = 4;
inline constexpr std::uint64_t ioam_header_octets = 8;
inline constexpr std::uint64_t ioam_hops = 3;
inline constexpr std::uint64_t ioam_per_hop_octets = 8;

// IOAM over IPv6 encapsulation across three hops, every packet sampled.
inline MeasurementMethod ioam_3hop() {
  return MeasurementMethod::in_band(
      "ioam-3hop",
      OverheadBits::from_octets(ioam_tunnel_octets + ioam_option_octets + ioam_header_octets),
      ioam_hops, OverheadBits::from_octets(ioam_per_hop_octets), 1);
}

}  // namespace presets

inline std::span<const Preset> default_presets() {
  static const std::array<Preset, 3> registry{{
      {"ccm-101", "active probe: 101-byte continuity check message per period", "",
       &presets::ccm_101},
      {"gnmi-204", "passive export: 204-byte telemetry message per period", "",
       &presets::gnmi_204},
      {"ioam-3hop",
       "in-band: IPv6 tunnel (44 B) + IPv6 option (4 B) + IOAM header (8 B), 8 B per hop",
       "44+4+8", &presets::ioam_3hop},
  }};
  return registry;
}

inline MeasurementMethod make_preset(std::string_view name,
                                     std::span<const Preset> registry = default_presets()) {
  const auto it = std::find_if(registry.begin(), registry.end(),
                               [&](const Preset& p) { return p.name == name; });
  if (it == registry.end()) throw Error(ErrorCode::unknown_preset, std::string(name));
  return it->make();
}

inline bool has_preset(std::string_view name,
                       std::span<const Preset> registry = default_presets()) {
  return std::any_of(registry.begin(), registry.end(),
                     [&](const Preset& p) { return p.name == name; });
}

// Human-readable catalog, one block per preset.
inline std::string format_catalog(std::span<const Preset> registry = default_presets()) {
  std::ostringstream out;
  for (const auto& preset : registry) {
    const MeasurementMethod m = preset.make();
    const OverheadBits hbar = observer_factor(m);
    out << preset.name << "  class=" << to_string(m.method_class()) << "  hbar=" << hbar.bits()
        << " bits (" << hbar.octets() << " bytes)\n";
    out << "    " << preset.summary << "\n";
    if (m.method_class() == MethodClass::in_band) {
      const auto& p = m.in_band_params();
      out << "    breakdown: encap ";
      if (!preset.encap_parts.empty()) out << preset.encap_parts << "=";
      out << p.encap.octets() << " bytes + " << p.hops << "x" << p.per_hop.octets()
          << " bytes per hop = " << hbar.octets() << " bytes\n";
      out << "    sampling ratio default: " << p.sampling_ratio << "\n";
    } else {
      out << "    period default: " << m.periodic_params().period.value() << " s\n";
    }
  }
  return out.str();
}

}  // namespace netobs
