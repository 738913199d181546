#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "netobs/error.hpp"
#include "netobs/overhead.hpp"
#include "netobs/scenario.hpp"
#include "netobs/units.hpp"

namespace netobs {

// Declaration order is the tie-break priority at equal timestamps.
enum class EventKind { data_packet, probe_packet, export_packet, failure_start, sim_end };

struct Event {
  double time = 0.0;
  EventKind kind = EventKind::data_packet;
  std::size_t source = 0;
  std::uint64_t size_bits = 0;
  // Part of size_bits that is measurement overhead.
  std::uint64_t overhead_bits = 0;
  std::uint64_t seq = 0;
};

struct BitCounters {
  std::uint64_t offered = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;

  bool conserved() const noexcept { return offered == delivered + dropped; }
  void record(std::uint64_t bits, bool admitted) {
    offered += bits;
    (admitted ? delivered : dropped) += bits;
  }
  BitCounters& operator+=(const BitCounters& o) {
    offered += o.offered;
    delivered += o.delivered;
    dropped += o.dropped;
    return *this;
  }
  friend bool operator==(const BitCounters&, const BitCounters&) = default;
};

struct SimReport {
  std::map<std::string, BitCounters> per_flow;
  BitCounters overhead;
  // Overhead attributed to the flow a method is attached to (in-band
  // carriers, or periodic methods bound to a flow).
  std::map<std::string, BitCounters> overhead_by_flow;
  double duration = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t events = 0;
  std::vector<std::string> warnings;

  BitCounters data_totals() const {
    BitCounters t;
    for (const auto& [id, c] : per_flow) t += c;
    return t;
  }
  BitCounters totals() const {
    BitCounters t = data_totals();
    t += overhead;
    return t;
  }
  bool conserved() const {
    if (!overhead.conserved()) return false;
    for (const auto& [id, c] : per_flow)
      if (!c.conserved()) return false;
    for (const auto& [id, c] : overhead_by_flow)
      if (!c.conserved()) return false;
    return true;
  }

  BitRate delivered_rate() const { return rate(totals().delivered); }
  BitRate loss_rate() const { return rate(totals().dropped); }
  BitRate overhead_rate() const { return rate(overhead.offered); }
  BitRate offered_rate() const { return rate(totals().offered); }

  // Flow bits plus the overhead attributed to that flow.
  BitCounters flow_with_overhead(const std::string& id) const {
    BitCounters c;
    if (auto it = per_flow.find(id); it != per_flow.end()) c += it->second;
    if (auto it = overhead_by_flow.find(id); it != overhead_by_flow.end()) c += it->second;
    return c;
  }

  BitRate rate(std::uint64_t bits) const {
    return BitRate(static_cast<double>(bits) / duration);
  }

  friend bool operator==(const SimReport&, const SimReport&) = default;
};

struct DetectionReport {
  double failure_time = 0.0;
  double detection_time = 0.0;
  double latency = 0.0;
};

struct SimOptions {
  // Token bucket depth in bits. Unset means one maximum packet of the scenario.
  std::optional<double> bucket_depth_bits;
  // Runs shorter than this many effective periods of a method get a warning.
  double min_periods = 10.0;
};

namespace detail {

inline constexpr std::size_t npos = std::numeric_limits<std::size_t>::max();

// A deterministic periodic packet generator: packet k leaves at
// phase + k * interval.
struct Source {
  EventKind kind = EventKind::data_packet;
  double phase = 0.0;
  double interval = 0.0;
  std::uint64_t next_index = 0;
  std::uint64_t limit = std::numeric_limits<std::uint64_t>::max();
  std::uint64_t base_bits = 0;
  std::size_t flow = npos;
  std::size_t method = npos;
  // In-band marks applied to packet k when k % sampling_ratio == 0.
  struct Mark {
    std::size_t method;
    std::uint64_t sampling_ratio;
    std::uint64_t bits;
  };
  std::vector<Mark> marks;

  double time_of(std::uint64_t k) const { return phase + static_cast<double>(k) * interval; }
  double next_time() const { return time_of(next_index); }
  bool exhausted() const { return next_index >= limit; }

  std::uint64_t overhead_of(std::uint64_t k) const {
    std::uint64_t bits = 0;
    for (const auto& m : marks)
      if (k % m.sampling_ratio == 0) bits += m.bits;
    return bits;
  }
};

// Flows are spread evenly across one packet interval so that independent
// flows do not arrive as a synchronized burst. Periodic methods start at 0.
inline std::vector<Source> build_sources(const Scenario& scenario) {
  std::vector<Source> sources;
  const auto& flows = scenario.flows();
  const auto n = static_cast<double>(flows.size());
  for (std::size_t i = 0; i < flows.size(); ++i) {
    Source s;
    s.kind = EventKind::data_packet;
    s.interval = flows[i].packet_interval();
    s.phase = s.interval * static_cast<double>(i) / n;
    s.base_bits = flows[i].packet_bits;
    s.flow = i;
    sources.push_back(std::move(s));
  }
  const auto& methods = scenario.methods();
  for (std::size_t j = 0; j < methods.size(); ++j) {
    const auto& m = methods[j];
    if (m.method_class() == MethodClass::in_band) {
      for (std::size_t i : scenario.carriers(m)) {
        sources[i].marks.push_back(
            {j, m.in_band_params().sampling_ratio, observer_factor(m).bits()});
      }
      continue;
    }
    Source s;
    s.kind = m.method_class() == MethodClass::active_probe ? EventKind::probe_packet
                                                           : EventKind::export_packet;
    s.interval = m.periodic_params().period.value();
    s.base_bits = observer_factor(m).bits();
    s.method = j;
    if (m.flow()) s.flow = *scenario.flow_index(*m.flow());
    sources.push_back(std::move(s));
  }
  return sources;
}

// Pops events from all sources in (time, kind, seq) order until `horizon`
// or until the visitor returns false.
template <class Visitor>
std::uint64_t run_schedule(std::vector<Source>& sources, double horizon, Visitor&& visit) {
  using Key = std::tuple<double, int, std::uint64_t, std::size_t>;
  std::priority_queue<Key, std::vector<Key>, std::greater<>> queue;
  std::uint64_t seq = 0;
  auto schedule = [&](std::size_t i) {
    const Source& s = sources[i];
    if (s.exhausted()) return;
    const double t = s.next_time();
    if (!(t < horizon)) return;
    queue.emplace(t, static_cast<int>(s.kind), seq++, i);
  };
  for (std::size_t i = 0; i < sources.size(); ++i) schedule(i);

  std::uint64_t processed = 0;
  while (!queue.empty()) {
    const auto [t, kind, id, i] = queue.top();
    queue.pop();
    Source& s = sources[i];
    const std::uint64_t k = s.next_index++;
    Event ev;
    ev.time = t;
    ev.kind = s.kind;
    ev.source = i;
    ev.overhead_bits = s.kind == EventKind::data_packet ? s.overhead_of(k) : s.base_bits;
    ev.size_bits = s.kind == EventKind::data_packet ? s.base_bits + ev.overhead_bits : s.base_bits;
    ev.seq = id;
    ++processed;
    if (!visit(ev, s, k)) break;
    schedule(i);
  }
  return processed;
}

// Token bucket filled at link capacity. A packet is admitted whenever the
// bucket is not in deficit; admission may overdraw by at most one packet.
class TokenBucket {
 public:
  TokenBucket(const LinkSpec& link, double depth)
      : unbounded_(link.overprovisioned), rate_(link.capacity.value()), depth_(depth),
        tokens_(depth), epsilon_(1e-9 * std::max(1.0, depth)) {}

  bool admit(double now, std::uint64_t bits) {
    if (unbounded_) return true;
    tokens_ = std::min(depth_, tokens_ + rate_ * (now - last_));
    last_ = now;
    if (tokens_ < -epsilon_) return false;
    tokens_ -= static_cast<double>(bits);
    return true;
  }

 private:
  bool unbounded_;
  double rate_;
  double depth_;
  double tokens_;
  double last_ = 0.0;
  double epsilon_;
};

inline double max_packet_bits(const std::vector<Source>& sources) {
  double max_bits = 0.0;
  for (const auto& s : sources) {
    std::uint64_t marks = 0;
    for (const auto& m : s.marks) marks += m.bits;
    max_bits = std::max(max_bits, static_cast<double>(s.base_bits + marks));
  }
  return max_bits;
}

}  // namespace detail

// Largest packet on the wire, the default bucket depth.
inline double max_packet_bits(const Scenario& scenario) {
  return detail::max_packet_bits(detail::build_sources(scenario));
}

// One packet worth of bits over the horizon: the rate resolution of a run.
inline double packet_quantum(const Scenario& scenario, Duration duration) {
  return max_packet_bits(scenario) / duration.value();
}

// Upper bound on the number of events a run over `duration` processes.
inline double estimate_events(const Scenario& scenario, Duration duration) {
  double events = 0.0;
  for (const auto& s : detail::build_sources(scenario)) {
    events += std::ceil(duration.value() / s.interval);
  }
  return events;
}

inline void check_horizon(const Scenario& scenario, Duration duration) {
  for (const auto& m : scenario.methods()) {
    if (m.is_periodic()) {
      if (m.periodic_params().period > duration) {
        throw Error(ErrorCode::period_exceeds_horizon, "method '" + m.id() + "'");
      }
      continue;
    }
    for (std::size_t i : scenario.carriers(m)) {
      if (effective_period(m, scenario.flows()[i]) > duration) {
        throw Error(ErrorCode::period_exceeds_horizon,
                    "method '" + m.id() + "' on flow '" + scenario.flows()[i].id + "'");
      }
    }
  }
}

inline SimReport run_sim(const Scenario& scenario, Duration duration, std::uint64_t seed,
                         const SimOptions& options = {}) {
  check_horizon(scenario, duration);

  SimReport report;
  report.duration = duration.value();
  report.seed = seed;
  for (const auto& m : scenario.methods()) {
    double longest = 0.0;
    if (m.is_periodic()) {
      longest = m.periodic_params().period.value();
    } else {
      for (std::size_t i : scenario.carriers(m))
        longest = std::max(longest, effective_period(m, scenario.flows()[i]).value());
    }
    if (longest > 0.0 && duration.value() / longest < options.min_periods) {
      report.warnings.push_back("method '" + m.id() + "' covers only " +
                                std::to_string(duration.value() / longest) + " periods");
    }
  }
  auto sources = detail::build_sources(scenario);
  const double depth = options.bucket_depth_bits.value_or(detail::max_packet_bits(sources));
  detail::TokenBucket bucket(scenario.link(), depth);
  const auto& flows = scenario.flows();
  const auto& methods = scenario.methods();

  // Indexed by flow; copied into the id-keyed maps once the run is over.
  std::vector<BitCounters> data(flows.size()), attributed(flows.size());
  std::vector<bool> has_attributed(flows.size(), false);
  for (const auto& m : methods) {
    if (m.flow()) has_attributed[*scenario.flow_index(*m.flow())] = true;
  }

  report.events = detail::run_schedule(
      sources, duration.value(), [&](const Event& ev, const detail::Source& s, std::uint64_t k) {
        const bool admitted = bucket.admit(ev.time, ev.size_bits);
        if (ev.kind == EventKind::data_packet) {
          data[s.flow].record(s.base_bits, admitted);
          if (ev.overhead_bits > 0) {
            report.overhead.record(ev.overhead_bits, admitted);
            for (const auto& mark : s.marks) {
              if (k % mark.sampling_ratio != 0) continue;
              if (methods[mark.method].flow()) attributed[s.flow].record(mark.bits, admitted);
            }
          }
        } else {
          report.overhead.record(ev.size_bits, admitted);
          if (s.flow != detail::npos) attributed[s.flow].record(ev.size_bits, admitted);
        }
        return true;
      });
  for (std::size_t i = 0; i < flows.size(); ++i) {
    report.per_flow[flows[i].id] = data[i];
    if (has_attributed[i]) report.overhead_by_flow[flows[i].id] = attributed[i];
  }
  return report;
}

namespace detail {

inline DetectionReport detect(const Scenario& scenario, std::size_t index, double failure_time,
                              Duration horizon) {
  const MeasurementMethod& method = scenario.methods().at(index);
  if (!std::isfinite(failure_time) || failure_time < 0.0 || failure_time >= horizon.value()) {
    throw Error(ErrorCode::invalid_argument, "failure time outside the horizon");
  }
  auto all = build_sources(scenario);
  std::vector<Source> sources;
  for (auto& s : all) {
    if (s.method == index) sources.push_back(std::move(s));
    else if (s.kind == EventKind::data_packet) {
      std::erase_if(s.marks, [&](const Source::Mark& m) { return m.method != index; });
      if (!s.marks.empty()) sources.push_back(std::move(s));
    }
  }
  if (sources.empty()) {
    throw Error(ErrorCode::no_carrier_packets, "method '" + method.id() + "'");
  }
  Source failure;
  failure.kind = EventKind::failure_start;
  failure.phase = failure_time;
  failure.limit = 1;
  sources.push_back(failure);
  const std::size_t failure_source = sources.size() - 1;

  // Last measurement arrival before the failure, as (source, packet index).
  std::optional<std::pair<std::size_t, std::uint64_t>> last;
  run_schedule(sources, horizon.value(), [&](const Event& ev, const Source& s, std::uint64_t k) {
    if (ev.source == failure_source) return false;
    const bool measured =
        s.kind != EventKind::data_packet ||
        std::any_of(s.marks.begin(), s.marks.end(),
                    [k](const Source::Mark& m) { return k % m.sampling_ratio == 0; });
    if (measured) last = {ev.source, k};
    return true;
  });
  if (!last) {
    throw Error(ErrorCode::no_carrier_packets,
                "method '" + method.id() + "' has no marked packet before the failure");
  }

  const Source& s = sources[last->first];
  double timeout_periods = 1.0;
  std::uint64_t stride = 1;
  if (method.is_periodic()) {
    timeout_periods = method.periodic_params().timeout_multiplier;
  } else {
    stride = method.in_band_params().sampling_ratio;
  }
  const double deadline =
      s.phase + (static_cast<double>(last->second) + timeout_periods * static_cast<double>(stride)) *
                    s.interval;
  if (!(deadline < horizon.value())) {
    throw Error(ErrorCode::period_exceeds_horizon,
                "no measurement of '" + method.id() + "' remains after the failure");
  }
  return DetectionReport{failure_time, deadline, deadline - failure_time};
}

}  // namespace detail

inline std::size_t method_index(const Scenario& scenario, const std::string& id) {
  const auto& ms = scenario.methods();
  for (std::size_t i = 0; i < ms.size(); ++i)
    if (ms[i].id() == id) return i;
  throw Error(ErrorCode::unknown_method, id);
}

// Failure is declared when the next expected measurement does not arrive.
inline DetectionReport run_detection(const Scenario& scenario, const std::string& method_id,
                                     double failure_time, Duration horizon) {
  return detail::detect(scenario, method_index(scenario, method_id), failure_time, horizon);
}

// `trials` failures drawn uniformly from the part of the horizon where a
// detection can still complete.
inline std::vector<DetectionReport> run_detection_trials(const Scenario& scenario,
                                                         const std::string& method_id,
                                                         Duration horizon, std::size_t trials,
                                                         std::uint64_t seed) {
  const std::size_t index = method_index(scenario, method_id);
  const auto& method = scenario.methods()[index];
  double worst = 0.0;
  if (method.is_periodic()) {
    worst = method.periodic_params().period.value() * method.periodic_params().timeout_multiplier;
  } else {
    for (std::size_t i : scenario.carriers(method)) {
      worst = std::max(worst, effective_period(method, scenario.flows()[i]).value() +
                                  scenario.flows()[i].packet_interval());
    }
  }
  if (!(worst < horizon.value())) {
    throw Error(ErrorCode::period_exceeds_horizon, "method '" + method_id + "'");
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> when(0.0, horizon.value() - worst);
  std::vector<DetectionReport> out;
  out.reserve(trials);
  for (std::size_t i = 0; i < trials; ++i) {
    out.push_back(detail::detect(scenario, index, when(rng), horizon));
  }
  return out;
}

}  // namespace netobs
