#pragma once

#include <algorithm>
#include <string>

#include "netobs/overhead.hpp"
#include "netobs/scenario.hpp"
#include "netobs/sim.hpp"
#include "netobs/units.hpp"

namespace netobs {

// Closed-form rates of a scenario treated as fluid.
struct FluidReport {
  BitRate user_rate;
  BitRate overhead_rate;
  BitRate offered_rate;
  BitRate delivered_rate;
  BitRate loss_rate;
};

inline BitRate total_user_rate(const Scenario& scenario) {
  BitRate r;
  for (const auto& f : scenario.flows()) r += f.user_rate;
  return r;
}

inline BitRate total_overhead_rate(const Scenario& scenario) {
  BitRate ov;
  for (const auto& m : scenario.methods()) {
    if (m.is_periodic()) {
      ov += overhead_rate(m, scenario.flows().front());
      continue;
    }
    for (std::size_t i : scenario.carriers(m)) ov += overhead_rate(m, scenario.flows()[i]);
  }
  return ov;
}

inline FluidReport fluid_oracle(const Scenario& scenario) {
  FluidReport r;
  r.user_rate = total_user_rate(scenario);
  r.overhead_rate = total_overhead_rate(scenario);
  r.offered_rate = r.user_rate + r.overhead_rate;
  if (scenario.link().overprovisioned) {
    r.delivered_rate = r.offered_rate;
    r.loss_rate = BitRate(0.0);
  } else {
    const double c = scenario.link().capacity.value();
    r.delivered_rate = BitRate(std::min(r.offered_rate.value(), c));
    r.loss_rate = BitRate(std::max(0.0, r.offered_rate.value() - c));
  }
  return r;
}

// Which rate metric absorbs the overhead. Overprovisioned links and links
// with spare room for the measured traffic show it as added data rate; a
// link the unmeasured flows already fill shows it as added loss.
inline ImpactKind impact_regime(const Scenario& scenario) {
  if (scenario.link().overprovisioned) return ImpactKind::data_rate;
  return total_user_rate(scenario) >= scenario.link().capacity ? ImpactKind::loss_rate
                                                               : ImpactKind::data_rate;
}

namespace detail {
inline double counter_delta(const BitCounters& measured, const BitCounters& unmeasured,
                            ImpactKind kind) {
  if (kind == ImpactKind::data_rate) {
    return static_cast<double>(measured.delivered) - static_cast<double>(unmeasured.delivered);
  }
  return static_cast<double>(measured.dropped) - static_cast<double>(unmeasured.dropped);
}

inline Impact make_impact(ImpactKind kind, double delta_bits, double duration) {
  // A measured run never delivers or drops fewer bits than its twin; a tiny
  // negative delta can only come from packet phase and is reported as 0.
  return Impact{kind, BitRate(std::max(0.0, delta_bits) / duration)};
}
}  // namespace detail

inline Impact measured_impact(const Scenario& scenario, const SimReport& measured,
                              const SimReport& unmeasured) {
  const ImpactKind kind = impact_regime(scenario);
  return detail::make_impact(kind, detail::counter_delta(measured.totals(), unmeasured.totals(), kind),
                             measured.duration);
}

inline Impact measured_flow_impact(const Scenario& scenario, const SimReport& measured,
                                   const SimReport& unmeasured, const std::string& flow_id) {
  const ImpactKind kind = impact_regime(scenario);
  return detail::make_impact(kind,
                             detail::counter_delta(measured.flow_with_overhead(flow_id),
                                                   unmeasured.flow_with_overhead(flow_id), kind),
                             measured.duration);
}

struct TwinRun {
  SimReport measured;
  SimReport unmeasured;
  Impact impact;
};

// Runs the scenario with and without its methods over the same link.
inline TwinRun run_twin(const Scenario& scenario, Duration duration, std::uint64_t seed,
                        SimOptions options = {}) {
  if (!options.bucket_depth_bits) options.bucket_depth_bits = max_packet_bits(scenario);
  TwinRun twin{run_sim(scenario, duration, seed, options),
               run_sim(scenario.without_methods(), duration, seed, options), {}};
  twin.impact = measured_impact(scenario, twin.measured, twin.unmeasured);
  return twin;
}

}  // namespace netobs
