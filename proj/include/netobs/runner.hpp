#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "netobs/analysis.hpp"
#include "netobs/config.hpp"
#include "netobs/error.hpp"
#include "netobs/impact.hpp"
#include "netobs/overhead.hpp"
#include "netobs/sim.hpp"
#include "netobs/units_text.hpp"
#include "netobs/version.hpp"

namespace netobs {

// Column layout per experiment kind. Changing one breaks downstream plots.
namespace csv_schema {
inline constexpr const char* simulate =
    "category,id,offered_bits,delivered_bits,dropped_bits,offered_bps,delivered_bps,loss_bps";
inline constexpr const char* sweep =
    "sweep_variable,delta_m,delta_p_measured,delta_p_bound,hbar,holds";
inline constexpr const char* scale =
    "sweep_variable,delta_m,delta_p_measured,delta_p_bound,hbar,holds,mode";
inline constexpr const char* detect = "trial,failure_time,detection_time,latency";
inline constexpr const char* ovu = "user_rate,loss_observed,loss_unobserved";
}  // namespace csv_schema

inline const char* csv_header(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::simulate: return csv_schema::simulate;
    case ExperimentKind::sweep: return csv_schema::sweep;
    case ExperimentKind::detect: return csv_schema::detect;
    case ExperimentKind::scale: return csv_schema::scale;
    case ExperimentKind::ovu: return csv_schema::ovu;
  }
  return "";
}

struct RunResult {
  // 0: success, 2: a relation or bound check failed.
  int exit_code = 0;
  std::string csv;
  std::vector<std::string> failures;
  std::vector<std::string> warnings;
};

inline constexpr int exit_ok = 0;
inline constexpr int exit_error = 1;
inline constexpr int exit_violation = 2;

namespace detail {

using text::format_number;

inline void write_metadata(std::ostringstream& out, const ScenarioConfig& c) {
  out << "# tool: netobs " << version << "\n";
  out << "# experiment: " << to_string(c.experiment) << "\n";
  out << "# seed: " << c.seed << "\n";
  out << "# duration_s: " << format_number(c.duration) << "\n";
  for (const auto& mc : c.methods) {
    const MeasurementMethod m = mc.resolve();
    out << "# method " << m.id() << ": class=" << to_string(m.method_class())
        << " hbar_bits=" << observer_factor(m).bits();
    if (mc.preset) out << " preset=" << *mc.preset;
    if (m.is_periodic()) {
      out << " period_s=" << format_number(m.periodic_params().period.value());
    } else {
      const auto& p = m.in_band_params();
      out << " encap_bits=" << p.encap.bits() << " hops=" << p.hops
          << " per_hop_bits=" << p.per_hop.bits() << " sampling_ratio=" << p.sampling_ratio;
    }
    out << "\n";
  }
}

inline std::string describe(const RelationRecord& r, const std::string& variable) {
  std::ostringstream s;
  s << variable << "=" << format_number(r.sweep_value) << " delta_m=" << format_number(r.delta_m.value())
    << " delta_p=" << format_number(r.delta_p.value.value()) << " product=" << format_number(r.product)
    << " bound=" << format_number(r.bound) << " hbar_bits=" << r.hbar.bits();
  return s.str();
}

inline void write_records(std::ostringstream& out, const SweepResult& result, bool with_mode,
                          RunResult& run) {
  out << "# sweep_variable: " << result.variable() << "\n";
  out << (with_mode ? csv_schema::scale : csv_schema::sweep) << "\n";
  for (const auto& r : result.records()) {
    out << format_number(r.sweep_value) << "," << format_number(r.delta_m.value()) << ","
        << format_number(r.delta_p.value.value()) << "," << format_number(r.bound_impact()) << ","
        << r.hbar.bits() << "," << (r.holds ? "true" : "false");
    if (with_mode) out << "," << to_string(r.mode);
    out << "\n";
    if (!r.holds) run.failures.push_back("relation violated: " + describe(r, result.variable()));
  }
}

inline SweepOptions sweep_options(const ScenarioConfig& c) {
  SweepOptions o;
  o.tolerance = c.tolerance;
  if (c.event_cap) o.event_cap = *c.event_cap;
  if (c.fluid) o.force_mode = EvalMode::fluid;
  return o;
}

inline void run_simulate(const ScenarioConfig& c, std::ostringstream& out, RunResult& run) {
  const Scenario scenario = c.scenario();
  const SimReport report = run_sim(scenario, Duration(c.duration), c.seed);
  run.warnings = report.warnings;
  const FluidReport fluid = fluid_oracle(scenario);
  out << "# fluid_delivered_bps: " << format_number(fluid.delivered_rate.value()) << "\n";
  out << "# fluid_loss_bps: " << format_number(fluid.loss_rate.value()) << "\n";
  out << csv_schema::simulate << "\n";
  auto row = [&](const char* category, const std::string& id, const BitCounters& b) {
    out << category << "," << id << "," << b.offered << "," << b.delivered << "," << b.dropped
        << "," << format_number(report.rate(b.offered).value()) << ","
        << format_number(report.rate(b.delivered).value()) << ","
        << format_number(report.rate(b.dropped).value()) << "\n";
  };
  for (const auto& [id, counters] : report.per_flow) row("flow", id, counters);
  row("overhead", "all", report.overhead);
  row("total", "all", report.totals());
  if (!report.conserved()) run.failures.push_back("bit conservation violated");
}

inline void run_sweep(const ScenarioConfig& c, std::ostringstream& out, RunResult& run) {
  const SweepSection& s = *c.sweep;
  const MeasurementMethod method = c.method_named(s.method).resolve();
  SweepOptions o = sweep_options(c);
  if (s.hbar_override_bits) o.hbar_override = OverheadBits::from_bits(*s.hbar_override_bits);
  std::vector<double> grid;
  if (method.is_periodic()) {
    if (s.periods.empty()) throw Error(ErrorCode::config_missing_field, "sweep.periods");
    grid = s.periods;
  } else {
    if (s.sampling_ratios.empty()) {
      throw Error(ErrorCode::config_missing_field, "sweep.sampling_ratios");
    }
    for (auto v : s.sampling_ratios) grid.push_back(static_cast<double>(v));
  }
  const auto result = impact_vs_uncertainty_sweep(method, c.flows.front(), *c.link, grid,
                                                  Duration(c.duration), c.seed, o);
  write_records(out, result, false, run);
}

inline void run_scale(const ScenarioConfig& c, std::ostringstream& out, RunResult& run) {
  const ScaleSection& s = *c.scale;
  const MeasurementMethod method = c.method_named(s.method).resolve();
  SweepOptions o = sweep_options(c);
  if (s.hbar_override_bits) o.hbar_override = OverheadBits::from_bits(*s.hbar_override_bits);
  const FlowSpec& flow = c.flows.front();
  if (method.is_periodic()) {
    if (s.flows.empty()) throw Error(ErrorCode::config_missing_field, "scale.flows");
    const Duration period(s.period.value_or(method.periodic_params().period.value()));
    const auto result = scaling_sweep(method, s.flows, period, flow, Duration(c.duration), c.seed, o);
    write_records(out, result, true, run);
  } else {
    if (s.rates.empty()) throw Error(ErrorCode::config_missing_field, "scale.rates");
    const auto result =
        rate_scaling_sweep(method, s.rates, flow.packet_bits, Duration(c.duration), c.seed, o);
    write_records(out, result, true, run);
  }
}

inline void run_detect(const ScenarioConfig& c, std::ostringstream& out, RunResult& run) {
  const Scenario scenario = c.scenario();
  const DetectSection s = c.detect.value_or(DetectSection{});
  const MeasurementMethod& method = scenario.method(c.method_named(s.method).id);
  const Duration horizon(c.duration);
  std::vector<DetectionReport> reports;
  if (s.failure_time) {
    reports.push_back(run_detection(scenario, method.id(), *s.failure_time, horizon));
  } else {
    reports = run_detection_trials(scenario, method.id(), horizon, s.trials.value_or(1000), c.seed);
  }
  double bound = 0.0;
  if (method.is_periodic()) {
    bound = method.periodic_params().period.value() * method.periodic_params().timeout_multiplier;
  } else {
    for (std::size_t i : scenario.carriers(method))
      bound = std::max(bound, effective_period(method, scenario.flows()[i]).value());
  }
  out << "# latency_bound_s: " << format_number(bound) << "\n";
  out << csv_schema::detect << "\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& d = reports[i];
    out << i << "," << format_number(d.failure_time) << "," << format_number(d.detection_time) << ","
        << format_number(d.latency) << "\n";
    if (!(d.latency > 0.0) || d.latency > bound * (1.0 + 1e-12)) {
      run.failures.push_back("detection latency " + format_number(d.latency) +
                             " outside (0, " + format_number(bound) + "]");
    }
  }
}

inline void run_ovu(const ScenarioConfig& c, std::ostringstream& out, RunResult& run) {
  const MeasurementMethod method = c.method_named(c.ovu->method).resolve();
  const auto rows = observed_vs_unobserved_curve(c.ovu->rates, *c.link, method,
                                                 c.flows.front().packet_bits, Duration(c.duration),
                                                 c.seed, sweep_options(c));
  out << csv_schema::ovu << "\n";
  for (const auto& r : rows) {
    out << format_number(r.user_rate) << "," << format_number(r.loss_observed) << ","
        << format_number(r.loss_unobserved) << "\n";
    if (r.loss_observed < r.loss_unobserved) {
      run.failures.push_back("observed loss below unobserved loss at " +
                             format_number(r.user_rate) + " bps");
    }
  }
}

}  // namespace detail

// Runs the configured experiment in memory.
inline RunResult execute(const ScenarioConfig& config) {
  RunResult run;
  std::ostringstream out;
  detail::write_metadata(out, config);
  switch (config.experiment) {
    case ExperimentKind::simulate: detail::run_simulate(config, out, run); break;
    case ExperimentKind::sweep: detail::run_sweep(config, out, run); break;
    case ExperimentKind::scale: detail::run_scale(config, out, run); break;
    case ExperimentKind::detect: detail::run_detect(config, out, run); break;
    case ExperimentKind::ovu: detail::run_ovu(config, out, run); break;
  }
  run.csv = out.str();
  run.exit_code = run.failures.empty() ? exit_ok : exit_violation;
  return run;
}

// Writes through a sibling temporary so readers never see a partial file.
inline void write_file_atomically(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::io, "cannot open " + tmp.string());
    f << content;
    f.flush();
    if (!f) throw Error(ErrorCode::io, "cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::io, "cannot rename onto " + path.string());
  }
}

}  // namespace netobs
