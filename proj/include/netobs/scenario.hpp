#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "netobs/error.hpp"
#include "netobs/method.hpp"

namespace netobs {

// A set of flows and measurement methods sharing one link. Only
// validate_scenario() builds one, so every instance satisfies its checks.
class Scenario {
 public:
  const std::vector<FlowSpec>& flows() const noexcept { return flows_; }
  const LinkSpec& link() const noexcept { return link_; }
  const std::vector<MeasurementMethod>& methods() const noexcept { return methods_; }

  const FlowSpec* find_flow(const std::string& id) const {
    auto it = std::find_if(flows_.begin(), flows_.end(), [&](const auto& f) { return f.id == id; });
    return it == flows_.end() ? nullptr : &*it;
  }
  std::optional<std::size_t> flow_index(const std::string& id) const {
    auto it = std::find_if(flows_.begin(), flows_.end(), [&](const auto& f) { return f.id == id; });
    if (it == flows_.end()) return std::nullopt;
    return static_cast<std::size_t>(it - flows_.begin());
  }
  const MeasurementMethod& method(const std::string& id) const {
    auto it =
        std::find_if(methods_.begin(), methods_.end(), [&](const auto& m) { return m.id() == id; });
    if (it == methods_.end()) throw Error(ErrorCode::unknown_method, id);
    return *it;
  }

  // Flows whose packets an in-band method marks.
  std::vector<std::size_t> carriers(const MeasurementMethod& m) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < flows_.size(); ++i) {
      if (!m.flow() || *m.flow() == flows_[i].id) out.push_back(i);
    }
    return out;
  }

  // Same flows and link, measurement removed.
  Scenario without_methods() const {
    Scenario s = *this;
    s.methods_.clear();
    return s;
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;

 private:
  friend Scenario validate_scenario(std::vector<FlowSpec>, LinkSpec,
                                    std::vector<MeasurementMethod>);
  Scenario() = default;

  std::vector<FlowSpec> flows_;
  LinkSpec link_;
  std::vector<MeasurementMethod> methods_;
};

// An empty method list is accepted: it describes the unmeasured twin.
inline Scenario validate_scenario(std::vector<FlowSpec> flows, LinkSpec link,
                                  std::vector<MeasurementMethod> methods) {
  if (flows.empty()) throw Error(ErrorCode::no_flows, "");
  std::set<std::string> ids;
  for (const auto& f : flows) {
    if (!ids.insert(f.id).second) throw Error(ErrorCode::duplicate_flow_id, "'" + f.id + "'");
    if (f.user_rate.value() <= 0.0) throw Error(ErrorCode::zero_rate, "flow '" + f.id + "'");
    if (f.packet_bits == 0) {
      throw Error(ErrorCode::invalid_argument, "flow '" + f.id + "' has zero packet size");
    }
  }
  if (link.capacity.value() <= 0.0) throw Error(ErrorCode::zero_capacity, "");

  std::set<std::string> method_ids;
  for (const auto& m : methods) {
    if (!method_ids.insert(m.id()).second) {
      throw Error(ErrorCode::invalid_argument, "duplicate method id '" + m.id() + "'");
    }
    if (m.flow() && !ids.count(*m.flow())) {
      throw Error(ErrorCode::unknown_flow,
                  "method '" + m.id() + "' references flow '" + *m.flow() + "'");
    }
  }

  Scenario s;
  s.flows_ = std::move(flows);
  s.link_ = link;
  s.methods_ = std::move(methods);
  return s;
}

inline Scenario validate_scenario(const Scenario& s) {
  return validate_scenario(s.flows(), s.link(), s.methods());
}

}  // namespace netobs
