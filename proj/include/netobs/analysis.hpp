#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "netobs/error.hpp"
#include "netobs/impact.hpp"
#include "netobs/overhead.hpp"
#include "netobs/scenario.hpp"
#include "netobs/sim.hpp"
#include "netobs/units.hpp"

namespace netobs {

enum class EvalMode { packet, fluid };

inline const char* to_string(EvalMode m) { return m == EvalMode::packet ? "packet" : "fluid"; }

// One point of the uncertainty relation: uncertainty times impact against
// the observer factor.
struct RelationRecord {
  double sweep_value = 0.0;
  Uncertainty delta_m;
  Impact delta_p;
  OverheadBits hbar;
  // delta_m * delta_p, in metric units times bits per second.
  double product = 0.0;
  // hbar scaled by the metric slope.
  double bound = 0.0;
  double slack = 0.0;
  double tolerance = 0.0;
  bool holds = false;
  // Zero slope with a non-zero observer factor: the relation is vacuous.
  bool degenerate = false;
  std::uint64_t flows = 1;
  EvalMode mode = EvalMode::packet;

  double ratio() const {
    return bound > 0.0 ? product / bound : std::numeric_limits<double>::infinity();
  }
  // Impact at which the product would meet the bound exactly.
  double bound_impact() const { return delta_m.value() > 0.0 ? bound / delta_m.value() : 0.0; }
};

inline RelationRecord check_relation(const Uncertainty& delta_m, const Impact& delta_p,
                                     OverheadBits hbar, double tolerance) {
  if (!(tolerance >= 0.0) || tolerance >= 1.0) {
    throw Error(ErrorCode::invalid_argument, "relative tolerance must lie in [0, 1)");
  }
  const double bound = static_cast<double>(hbar.bits()) * delta_m.slope();
  const double product = delta_m.value() * delta_p.value.value();
  RelationRecord r{0.0, delta_m, delta_p, hbar};
  r.product = product;
  r.bound = bound;
  r.slack = product - bound;
  r.tolerance = tolerance;
  r.holds = product >= bound * (1.0 - tolerance);
  r.degenerate = delta_m.slope() == 0.0 && hbar.bits() > 0;
  return r;
}

class SweepResult {
 public:
  SweepResult(std::string variable, std::string method_id)
      : variable_(std::move(variable)), method_id_(std::move(method_id)) {}

  void add(RelationRecord record) {
    if (!records_.empty() && !(record.sweep_value > records_.back().sweep_value)) {
      throw Error(ErrorCode::invalid_argument, "sweep values must be strictly increasing");
    }
    records_.push_back(std::move(record));
  }

  const std::string& variable() const noexcept { return variable_; }
  const std::string& method_id() const noexcept { return method_id_; }
  const std::vector<RelationRecord>& records() const noexcept { return records_; }

  bool all_hold() const {
    for (const auto& r : records_)
      if (!r.holds) return false;
    return true;
  }

 private:
  std::string variable_;
  std::string method_id_;
  std::vector<RelationRecord> records_;
};

struct SweepOptions {
  // Relative tolerance of the relation check. Unset means one packet
  // quantum relative to the expected impact.
  std::optional<double> tolerance;
  // Checks against this observer factor instead of the method's own.
  std::optional<OverheadBits> hbar_override;
  SimOptions sim;
  bool parallel = true;
  // Scaling sweeps only.
  double event_cap = 1e8;
  std::optional<EvalMode> force_mode;
};

namespace detail {

// Evaluates fn(0..n-1), possibly concurrently; results keep index order.
template <class Fn>
auto ordered_map(std::size_t n, bool parallel, Fn&& fn) {
  using R = decltype(fn(std::size_t{}));
  std::vector<R> out;
  out.reserve(n);
  if (!parallel || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out.push_back(fn(i));
    return out;
  }
  std::vector<std::future<R>> futures;
  futures.reserve(n);
  for (std::size_t i = 0; i < n; ++i) futures.push_back(std::async(std::launch::async, fn, i));
  for (auto& f : futures) out.push_back(f.get());
  return out;
}

inline double relative_quantum(double quantum, double expected_impact) {
  if (!(expected_impact > 0.0)) return 0.0;
  return std::min(0.5, quantum / expected_impact);
}

inline void require_increasing(std::span<const double> grid) {
  if (grid.empty()) throw Error(ErrorCode::invalid_argument, "sweep grid is empty");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1])) {
      throw Error(ErrorCode::invalid_argument, "sweep grid must be strictly increasing");
    }
  }
}

}  // namespace detail

// Impact versus uncertainty for one method: the grid holds periods in
// seconds for periodic methods and sampling ratios for in-band methods.
inline SweepResult impact_vs_uncertainty_sweep(const MeasurementMethod& method, const FlowSpec& flow,
                                               const LinkSpec& link, std::span<const double> grid,
                                               Duration duration, std::uint64_t seed,
                                               const SweepOptions& options = {}) {
  detail::require_increasing(grid);
  const bool periodic = method.is_periodic();
  auto point = [&](std::size_t i) {
    const double x = grid[i];
    MeasurementMethod m = method.with_flow(flow.id);
    if (periodic) {
      m = m.with_period(Duration(x));
    } else {
      if (x < 1.0 || std::floor(x) != x) {
        throw Error(ErrorCode::invalid_argument, "sampling ratio must be a positive integer");
      }
      m = m.with_sampling_ratio(static_cast<std::uint64_t>(x));
    }
    const Scenario scenario = validate_scenario({flow}, link, {m});
    const TwinRun twin = run_twin(scenario, duration, seed, options.sim);
    const OverheadBits hbar = options.hbar_override.value_or(observer_factor(m));
    const double tol = options.tolerance.value_or(detail::relative_quantum(
        packet_quantum(scenario, duration), overhead_rate(m, flow).value()));
    RelationRecord r = check_relation(detection_uncertainty(m, flow), twin.impact, hbar, tol);
    r.sweep_value = x;
    return r;
  };
  SweepResult result(periodic ? "tau_s" : "sampling_ratio", method.id());
  for (auto& r : detail::ordered_map(grid.size(), options.parallel, point)) result.add(std::move(r));
  return result;
}

// N copies of `flow`, each watched by its own instance of a periodic
// method, on an overprovisioned link.
inline Scenario replicated_scenario(const MeasurementMethod& method, std::uint64_t n,
                                    Duration period, const FlowSpec& flow) {
  if (n == 0) throw Error(ErrorCode::no_flows, "scaling point with zero flows");
  std::vector<FlowSpec> flows;
  std::vector<MeasurementMethod> methods;
  flows.reserve(n);
  methods.reserve(n);
  const MeasurementMethod base = method.with_period(period);
  for (std::uint64_t i = 0; i < n; ++i) {
    std::string id = "f" + std::to_string(i);
    flows.push_back(FlowSpec{id, flow.user_rate, flow.packet_bits});
    methods.push_back(base.with_id(method.id() + "#" + std::to_string(i)).with_flow(id));
  }
  const double per_flow = flow.user_rate.value() + overhead_rate(base, flow).value();
  return validate_scenario(std::move(flows),
                           LinkSpec{BitRate(per_flow * static_cast<double>(n)), true},
                           std::move(methods));
}

namespace detail {

inline EvalMode choose_mode(double events, const SweepOptions& options) {
  if (options.force_mode == EvalMode::fluid) return EvalMode::fluid;
  if (events <= options.event_cap) return EvalMode::packet;
  if (options.force_mode == EvalMode::packet) {
    throw Error(ErrorCode::scale_cap_exceeded,
                std::to_string(events) + " events over a cap of " +
                    std::to_string(options.event_cap) + "; use fluid mode");
  }
  return EvalMode::fluid;
}

// Impact of all methods in the scenario, from twin runs or the fluid oracle.
inline Impact scenario_impact(const Scenario& scenario, EvalMode mode, Duration duration,
                              std::uint64_t seed, const SimOptions& sim) {
  if (mode == EvalMode::fluid) {
    const FluidReport measured = fluid_oracle(scenario);
    const FluidReport unmeasured = fluid_oracle(scenario.without_methods());
    const ImpactKind kind = impact_regime(scenario);
    const double delta =
        kind == ImpactKind::data_rate
            ? measured.delivered_rate.value() - unmeasured.delivered_rate.value()
            : measured.loss_rate.value() - unmeasured.loss_rate.value();
    return Impact{kind, BitRate(std::max(0.0, delta))};
  }
  const TwinRun twin = run_twin(scenario, duration, seed, sim);
  // Overhead not bound to a flow only shows up in the aggregate.
  const bool all_bound =
      std::all_of(scenario.methods().begin(), scenario.methods().end(),
                  [](const MeasurementMethod& m) { return m.flow().has_value(); });
  if (!all_bound) return twin.impact;
  double sum = 0.0;
  for (const auto& f : scenario.flows()) {
    sum += measured_flow_impact(scenario, twin.measured, twin.unmeasured, f.id).value.value();
  }
  return Impact{twin.impact.kind, BitRate(sum)};
}

}  // namespace detail

// Aggregate impact of N independently measured flows. Points whose
// estimated event count exceeds the cap run on the fluid oracle.
inline SweepResult scaling_sweep(const MeasurementMethod& method,
                                 std::span<const std::uint64_t> n_grid, Duration period,
                                 const FlowSpec& flow, Duration duration, std::uint64_t seed,
                                 const SweepOptions& options = {}) {
  if (!method.is_periodic()) {
    throw Error(ErrorCode::invalid_argument, "flow-count scaling needs a periodic method");
  }
  if (n_grid.empty()) throw Error(ErrorCode::invalid_argument, "sweep grid is empty");
  const MeasurementMethod base = method.with_period(period);
  const double per_flow_events = std::ceil(duration.value() / flow.packet_interval()) +
                                 std::ceil(duration.value() / period.value());
  auto point = [&](std::size_t i) {
    const std::uint64_t n = n_grid[i];
    const EvalMode mode =
        detail::choose_mode(2.0 * per_flow_events * static_cast<double>(n), options);
    if (mode == EvalMode::packet && period > duration) {
      throw Error(ErrorCode::period_exceeds_horizon, "method '" + method.id() + "'");
    }
    const Scenario scenario = replicated_scenario(method, n, period, flow);
    const Impact impact = detail::scenario_impact(scenario, mode, duration, seed, options.sim);
    const OverheadBits hbar = options.hbar_override.value_or(observer_factor(base)) * n;
    const double tol = options.tolerance.value_or(detail::relative_quantum(
        static_cast<double>(std::max<std::uint64_t>(flow.packet_bits, observer_factor(base).bits())) /
            duration.value(),
        overhead_rate(base, flow).value()));
    RelationRecord r = check_relation(Uncertainty::detection_time(period), impact, hbar, tol);
    r.sweep_value = static_cast<double>(n);
    r.flows = n;
    r.mode = mode;
    return r;
  };
  SweepResult result("flows", method.id());
  for (auto& r : detail::ordered_map(n_grid.size(), options.parallel, point)) {
    result.add(std::move(r));
  }
  return result;
}

// In-band scaling: the carrier's user rate is the scale factor.
inline SweepResult rate_scaling_sweep(const MeasurementMethod& method,
                                      std::span<const double> rates_bps, std::uint64_t packet_bits,
                                      Duration duration, std::uint64_t seed,
                                      const SweepOptions& options = {}) {
  if (method.is_periodic()) {
    throw Error(ErrorCode::invalid_argument, "rate scaling needs an in-band method");
  }
  detail::require_increasing(rates_bps);
  auto point = [&](std::size_t i) {
    const FlowSpec flow{"f0", BitRate(rates_bps[i]), packet_bits};
    const MeasurementMethod m = method.with_flow(flow.id);
    const Scenario scenario = validate_scenario(
        {flow}, LinkSpec{flow.user_rate + overhead_rate(m, flow), true}, {m});
    const EvalMode mode = detail::choose_mode(2.0 * estimate_events(scenario, duration), options);
    const Impact impact = detail::scenario_impact(scenario, mode, duration, seed, options.sim);
    const OverheadBits hbar = options.hbar_override.value_or(observer_factor(m));
    const double tol = options.tolerance.value_or(detail::relative_quantum(
        packet_quantum(scenario, duration), overhead_rate(m, flow).value()));
    RelationRecord r = check_relation(detection_uncertainty(m, flow), impact, hbar, tol);
    r.sweep_value = rates_bps[i];
    r.mode = mode;
    return r;
  };
  SweepResult result("user_rate_bps", method.id());
  for (auto& r : detail::ordered_map(rates_bps.size(), options.parallel, point)) {
    result.add(std::move(r));
  }
  return result;
}

struct LossRow {
  double user_rate = 0.0;
  double loss_observed = 0.0;
  double loss_unobserved = 0.0;
};

// Loss of the same flow with and without in-band marking over one link.
inline std::vector<LossRow> observed_vs_unobserved_curve(std::span<const double> rates_bps,
                                                         const LinkSpec& link,
                                                         const MeasurementMethod& in_band,
                                                         std::uint64_t packet_bits,
                                                         Duration duration, std::uint64_t seed,
                                                         const SweepOptions& options = {}) {
  if (in_band.is_periodic()) {
    throw Error(ErrorCode::invalid_argument, "observed flow needs an in-band method");
  }
  detail::require_increasing(rates_bps);
  auto point = [&](std::size_t i) {
    const FlowSpec flow{"f0", BitRate(rates_bps[i]), packet_bits};
    const Scenario scenario = validate_scenario({flow}, link, {in_band.with_flow(flow.id)});
    const TwinRun twin = run_twin(scenario, duration, seed, options.sim);
    return LossRow{rates_bps[i], twin.measured.loss_rate().value(),
                   twin.unmeasured.loss_rate().value()};
  };
  return detail::ordered_map(rates_bps.size(), options.parallel, point);
}

struct CurvePoint {
  double delta_m = 0.0;
  double delta_p = 0.0;
};

// The lower bound delta_p = hbar * slope / delta_m.
inline std::vector<CurvePoint> hyperbola_reference(OverheadBits hbar, double metric_slope,
                                                   std::span<const double> dm_grid) {
  std::vector<CurvePoint> out;
  out.reserve(dm_grid.size());
  for (double dm : dm_grid) {
    if (!(dm > 0.0)) throw Error(ErrorCode::invalid_argument, "uncertainty grid must be positive");
    out.push_back({dm, static_cast<double>(hbar.bits()) * metric_slope / dm});
  }
  return out;
}

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

// Ordinary least squares.
inline LinearFit fit_line(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) {
    throw Error(ErrorCode::invalid_argument, "line fit needs at least two paired points");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  if (sxx == 0.0) throw Error(ErrorCode::invalid_argument, "line fit needs distinct x values");
  const double slope = sxy / sxx;
  return {slope, my - slope * mx};
}

}  // namespace netobs
