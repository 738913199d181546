#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "netobs/error.hpp"
#include "netobs/method.hpp"
#include "netobs/presets.hpp"
#include "netobs/scenario.hpp"
#include "netobs/units_text.hpp"

namespace netobs {

enum class ExperimentKind { simulate, sweep, detect, scale, ovu };

inline const char* to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::simulate: return "simulate";
    case ExperimentKind::sweep: return "sweep";
    case ExperimentKind::detect: return "detect";
    case ExperimentKind::scale: return "scale";
    case ExperimentKind::ovu: return "ovu";
  }
  return "?";
}

inline ExperimentKind parse_experiment(std::string_view name) {
  for (auto k : {ExperimentKind::simulate, ExperimentKind::sweep, ExperimentKind::detect,
                 ExperimentKind::scale, ExperimentKind::ovu}) {
    if (name == to_string(k)) return k;
  }
  throw Error(ErrorCode::config_invalid, "experiment: unknown kind '" + std::string(name) + "'");
}

// Declarative method entry: a preset with optional overrides, or a fully
// explicit description.
struct MethodConfig {
  std::string id;
  std::optional<std::string> preset;
  std::optional<MethodClass> method_class;
  std::optional<std::uint64_t> message_bits;
  std::optional<double> period;
  std::optional<double> timeout_multiplier;
  std::optional<std::uint64_t> encap_bits;
  std::optional<std::uint64_t> hops;
  std::optional<std::uint64_t> per_hop_bits;
  std::optional<std::uint64_t> sampling_ratio;
  std::optional<std::string> flow;

  MeasurementMethod resolve() const;

  friend bool operator==(const MethodConfig&, const MethodConfig&) = default;
};

struct SweepSection {
  std::optional<std::string> method;
  std::vector<double> periods;
  std::vector<std::uint64_t> sampling_ratios;
  std::optional<std::uint64_t> hbar_override_bits;
  friend bool operator==(const SweepSection&, const SweepSection&) = default;
};

struct ScaleSection {
  std::optional<std::string> method;
  std::vector<std::uint64_t> flows;
  std::optional<double> period;
  std::vector<double> rates;
  std::optional<std::uint64_t> hbar_override_bits;
  friend bool operator==(const ScaleSection&, const ScaleSection&) = default;
};

struct DetectSection {
  std::optional<std::string> method;
  std::optional<double> failure_time;
  std::optional<std::uint64_t> trials;
  friend bool operator==(const DetectSection&, const DetectSection&) = default;
};

struct OvuSection {
  std::optional<std::string> method;
  std::vector<double> rates;
  friend bool operator==(const OvuSection&, const OvuSection&) = default;
};

struct ScenarioConfig {
  ExperimentKind experiment = ExperimentKind::simulate;
  std::vector<FlowSpec> flows;
  std::optional<LinkSpec> link;
  std::vector<MethodConfig> methods;
  double duration = 0.0;
  std::uint64_t seed = 0;
  std::optional<std::string> output;
  std::optional<double> tolerance;
  bool fluid = false;
  std::optional<double> event_cap;
  std::optional<SweepSection> sweep;
  std::optional<ScaleSection> scale;
  std::optional<DetectSection> detect;
  std::optional<OvuSection> ovu;

  std::vector<MeasurementMethod> resolved_methods() const {
    std::vector<MeasurementMethod> out;
    for (const auto& m : methods) out.push_back(m.resolve());
    return out;
  }

  const MethodConfig& method_named(const std::optional<std::string>& id) const {
    if (methods.empty()) throw Error(ErrorCode::config_missing_field, "methods");
    if (!id) return methods.front();
    for (const auto& m : methods)
      if (m.id == *id) return m;
    throw Error(ErrorCode::unknown_method, *id);
  }

  // Scenario over every configured flow, link and method.
  Scenario scenario() const {
    if (!link) throw Error(ErrorCode::config_missing_field, "link");
    return validate_scenario(flows, *link, resolved_methods());
  }

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

inline MeasurementMethod MethodConfig::resolve() const {
  std::optional<MeasurementMethod> m;
  if (preset) {
    m = make_preset(*preset).with_id(id);
  } else {
    if (!method_class) {
      throw Error(ErrorCode::config_missing_field, "methods[" + id + "].class or preset");
    }
    auto need = [&](const auto& field, const char* key) {
      if (!field) throw Error(ErrorCode::config_missing_field, "methods[" + id + "]." + key);
      return *field;
    };
    if (*method_class == MethodClass::in_band) {
      m = MeasurementMethod::in_band(id, OverheadBits::from_bits(need(encap_bits, "encap")),
                                     need(hops, "hops"),
                                     OverheadBits::from_bits(need(per_hop_bits, "per_hop")),
                                     sampling_ratio.value_or(1));
    } else {
      const auto message = OverheadBits::from_bits(need(message_bits, "message"));
      const auto p = Duration(need(period, "period"));
      m = *method_class == MethodClass::active_probe
              ? MeasurementMethod::active_probe(id, message, p)
              : MeasurementMethod::passive_export(id, message, p);
    }
  }
  if (m->is_periodic()) {
    if (sampling_ratio || hops || encap_bits || per_hop_bits) {
      throw Error(ErrorCode::config_invalid,
                  "methods[" + id + "]: in-band fields on a periodic method");
    }
    if (period) m = m->with_period(Duration(*period));
    if (timeout_multiplier) m = m->with_timeout_multiplier(*timeout_multiplier);
  } else {
    if (period || timeout_multiplier || message_bits) {
      throw Error(ErrorCode::config_invalid,
                  "methods[" + id + "]: periodic fields on an in-band method");
    }
    if (sampling_ratio) m = m->with_sampling_ratio(*sampling_ratio);
  }
  if (flow) m = m->with_flow(*flow);
  return *m;
}

namespace detail {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw Error(ErrorCode::config_invalid, path_ + ": expected an object");
  }

  void allow(std::initializer_list<std::string_view> keys) const {
    std::set<std::string_view> ok(keys);
    for (auto it = node_.begin(); it != node_.end(); ++it) {
      if (!ok.count(it.key())) throw Error(ErrorCode::config_unknown_key, key(it.key()));
    }
  }

  bool has(const char* k) const { return node_.contains(k); }
  std::string key(std::string_view k) const {
    return path_.empty() ? std::string(k) : path_ + "." + std::string(k);
  }
  const json& at(const char* k) const {
    if (!node_.contains(k)) throw Error(ErrorCode::config_missing_field, key(k));
    return node_.at(k);
  }

  std::string string(const char* k) const {
    const json& v = at(k);
    if (!v.is_string()) throw Error(ErrorCode::config_invalid, key(k) + ": expected a string");
    return v.get<std::string>();
  }
  std::optional<std::string> opt_string(const char* k) const {
    if (!has(k)) return std::nullopt;
    return string(k);
  }
  template <class T>
  std::optional<T> opt_unsigned(const char* k) const {
    if (!has(k)) return std::nullopt;
    const json& v = at(k);
    if (!v.is_number_unsigned()) {
      throw Error(ErrorCode::config_invalid, key(k) + ": expected a non-negative integer");
    }
    return v.get<T>();
  }
  std::optional<double> opt_number(const char* k) const {
    if (!has(k)) return std::nullopt;
    const json& v = at(k);
    if (!v.is_number()) throw Error(ErrorCode::config_invalid, key(k) + ": expected a number");
    return v.get<double>();
  }
  std::optional<bool> opt_bool(const char* k) const {
    if (!has(k)) return std::nullopt;
    const json& v = at(k);
    if (!v.is_boolean()) throw Error(ErrorCode::config_invalid, key(k) + ": expected true/false");
    return v.get<bool>();
  }

  template <class Parse>
  auto unit(const char* k, Parse parse) const {
    try {
      return parse(string(k));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::config_unit_parse) throw;
      throw Error(ErrorCode::config_unit_parse, key(k) + ": " + e.what());
    }
  }
  template <class Parse>
  auto opt_unit(const char* k, Parse parse) const -> std::optional<decltype(parse(""))> {
    if (!has(k)) return std::nullopt;
    return unit(k, parse);
  }

  // Accepts "a,b,c" or ["a","b","c"]; each item parsed with `parse`.
  template <class Parse>
  auto list(const char* k, Parse parse) const {
    std::vector<decltype(parse(std::string()))> out;
    if (!has(k)) return out;
    const json& v = at(k);
    std::vector<std::string> items;
    if (v.is_string()) {
      const std::string s = v.get<std::string>();
      std::size_t start = 0;
      while (start <= s.size()) {
        const std::size_t comma = s.find(',', start);
        std::string item = s.substr(start, comma == std::string::npos ? std::string::npos
                                                                      : comma - start);
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        items.push_back(item);
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (e.is_string()) items.push_back(e.get<std::string>());
        else if (e.is_number_unsigned()) items.push_back(std::to_string(e.get<std::uint64_t>()));
        else throw Error(ErrorCode::config_invalid, key(k) + ": list items must be strings");
      }
    } else {
      throw Error(ErrorCode::config_invalid, key(k) + ": expected a list");
    }
    for (const auto& item : items) {
      try {
        out.push_back(parse(item));
      } catch (const Error& e) {
        throw Error(e.code(), key(k) + ": " + e.what());
      }
    }
    return out;
  }

  Reader child(const char* k) const { return Reader(at(k), key(k)); }

 private:
  const json& node_;
  std::string path_;
};

inline std::uint64_t parse_count(const std::string& s) {
  std::uint64_t v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) {
    throw Error(ErrorCode::config_unit_parse, "'" + s + "' is not a whole number");
  }
  return v;
}

inline MethodClass parse_method_class(const std::string& s, const std::string& where) {
  for (auto c : {MethodClass::passive_export, MethodClass::active_probe, MethodClass::in_band}) {
    if (s == to_string(c)) return c;
  }
  throw Error(ErrorCode::config_invalid, where + ": unknown class '" + s + "'");
}

}  // namespace detail

// Parses the JSON scenario format. Quantities carry unit suffixes:
// rates "1Mbps", times "100ms", sizes "360B" or "2880b".
inline ScenarioConfig parse_config(std::string_view text) {
  using detail::Reader;
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::config_invalid, std::string("malformed JSON: ") + e.what());
  }
  const Reader r(root, "");
  r.allow({"experiment", "flows", "link", "methods", "duration", "seed", "output", "tolerance",
           "fluid", "event_cap", "sweep", "scale", "detect", "ovu"});

  ScenarioConfig c;
  c.experiment = parse_experiment(r.string("experiment"));
  c.duration = r.unit("duration", text::parse_duration);
  c.seed = r.opt_unsigned<std::uint64_t>("seed").value_or(0);
  c.output = r.opt_string("output");
  c.tolerance = r.opt_number("tolerance");
  c.fluid = r.opt_bool("fluid").value_or(false);
  c.event_cap = r.opt_number("event_cap");

  const auto& flows = r.at("flows");
  if (!flows.is_array()) throw Error(ErrorCode::config_invalid, "flows: expected a list");
  for (std::size_t i = 0; i < flows.size(); ++i) {
    const Reader f(flows[i], "flows[" + std::to_string(i) + "]");
    f.allow({"id", "rate", "packet_size"});
    c.flows.push_back(FlowSpec{f.string("id"), BitRate(f.unit("rate", text::parse_rate)),
                               f.unit("packet_size", text::parse_size)});
  }

  if (r.has("link")) {
    const Reader l = r.child("link");
    l.allow({"capacity", "overprovisioned"});
    c.link = LinkSpec{BitRate(l.unit("capacity", text::parse_rate)),
                      l.opt_bool("overprovisioned").value_or(false)};
  }

  if (r.has("methods")) {
    const auto& methods = r.at("methods");
    if (!methods.is_array()) throw Error(ErrorCode::config_invalid, "methods: expected a list");
    for (std::size_t i = 0; i < methods.size(); ++i) {
      const Reader m(methods[i], "methods[" + std::to_string(i) + "]");
      m.allow({"id", "preset", "class", "message", "period", "timeout_multiplier", "encap", "hops",
               "per_hop", "sampling_ratio", "flow"});
      MethodConfig mc;
      mc.preset = m.opt_string("preset");
      mc.id = m.opt_string("id").value_or(mc.preset.value_or(""));
      if (mc.id.empty()) throw Error(ErrorCode::config_missing_field, m.key("id"));
      if (mc.preset && !has_preset(*mc.preset)) {
        throw Error(ErrorCode::unknown_preset, m.key("preset") + ": '" + *mc.preset + "'");
      }
      if (auto cls = m.opt_string("class")) {
        mc.method_class = detail::parse_method_class(*cls, m.key("class"));
      }
      mc.message_bits = m.opt_unit("message", text::parse_size);
      mc.period = m.opt_unit("period", text::parse_duration);
      mc.timeout_multiplier = m.opt_number("timeout_multiplier");
      mc.encap_bits = m.opt_unit("encap", text::parse_size);
      mc.hops = m.opt_unsigned<std::uint64_t>("hops");
      mc.per_hop_bits = m.opt_unit("per_hop", text::parse_size);
      mc.sampling_ratio = m.opt_unsigned<std::uint64_t>("sampling_ratio");
      mc.flow = m.opt_string("flow");
      c.methods.push_back(std::move(mc));
    }
  }

  if (r.has("sweep")) {
    const Reader s = r.child("sweep");
    s.allow({"method", "periods", "sampling_ratios", "hbar_override"});
    c.sweep = SweepSection{s.opt_string("method"), s.list("periods", text::parse_duration),
                           s.list("sampling_ratios", detail::parse_count),
                           s.opt_unit("hbar_override", text::parse_size)};
  }
  if (r.has("scale")) {
    const Reader s = r.child("scale");
    s.allow({"method", "flows", "period", "rates", "hbar_override"});
    c.scale = ScaleSection{s.opt_string("method"), s.list("flows", detail::parse_count),
                           s.opt_unit("period", text::parse_duration),
                           s.list("rates", text::parse_rate),
                           s.opt_unit("hbar_override", text::parse_size)};
  }
  if (r.has("detect")) {
    const Reader s = r.child("detect");
    s.allow({"method", "failure_time", "trials"});
    c.detect = DetectSection{s.opt_string("method"), s.opt_unit("failure_time", text::parse_duration),
                             s.opt_unsigned<std::uint64_t>("trials")};
  }
  if (r.has("ovu")) {
    const Reader s = r.child("ovu");
    s.allow({"method", "rates"});
    c.ovu = OvuSection{s.opt_string("method"), s.list("rates", text::parse_rate)};
  }

  // Per-experiment requirements.
  if (c.flows.empty()) throw Error(ErrorCode::config_missing_field, "flows");
  auto require = [&](bool present, const char* name) {
    if (!present) throw Error(ErrorCode::config_missing_field, name);
  };
  switch (c.experiment) {
    case ExperimentKind::simulate:
      require(c.link.has_value(), "link");
      break;
    case ExperimentKind::sweep:
      require(c.link.has_value(), "link");
      require(!c.methods.empty(), "methods");
      require(c.sweep.has_value(), "sweep");
      require(!c.sweep->periods.empty() || !c.sweep->sampling_ratios.empty(),
              "sweep.periods or sweep.sampling_ratios");
      break;
    case ExperimentKind::detect:
      require(c.link.has_value(), "link");
      require(!c.methods.empty(), "methods");
      break;
    case ExperimentKind::scale:
      require(!c.methods.empty(), "methods");
      require(c.scale.has_value(), "scale");
      require(!c.scale->flows.empty() || !c.scale->rates.empty(), "scale.flows or scale.rates");
      break;
    case ExperimentKind::ovu:
      require(c.link.has_value(), "link");
      require(!c.methods.empty(), "methods");
      require(c.ovu.has_value() && !c.ovu->rates.empty(), "ovu.rates");
      break;
  }
  for (const auto& m : c.methods) m.resolve();
  return c;
}

// Inverse of parse_config: parse_config(render_config(c)) == c.
inline std::string render_config(const ScenarioConfig& c) {
  using nlohmann::json;
  using namespace text;
  auto join = [](const auto& values, auto fmt) {
    std::string s;
    for (const auto& v : values) {
      if (!s.empty()) s += ",";
      s += fmt(v);
    }
    return s;
  };
  auto count = [](std::uint64_t v) { return std::to_string(v); };

  json root = json::object();
  root["experiment"] = to_string(c.experiment);
  root["duration"] = format_duration(c.duration);
  root["seed"] = c.seed;
  if (c.output) root["output"] = *c.output;
  if (c.tolerance) root["tolerance"] = *c.tolerance;
  if (c.fluid) root["fluid"] = true;
  if (c.event_cap) root["event_cap"] = *c.event_cap;

  json flows = json::array();
  for (const auto& f : c.flows) {
    flows.push_back({{"id", f.id},
                     {"rate", format_rate(f.user_rate.value())},
                     {"packet_size", format_size(f.packet_bits)}});
  }
  root["flows"] = flows;
  if (c.link) {
    root["link"] = {{"capacity", format_rate(c.link->capacity.value())},
                    {"overprovisioned", c.link->overprovisioned}};
  }
  if (!c.methods.empty()) {
    json methods = json::array();
    for (const auto& m : c.methods) {
      json j = {{"id", m.id}};
      if (m.preset) j["preset"] = *m.preset;
      if (m.method_class) j["class"] = to_string(*m.method_class);
      if (m.message_bits) j["message"] = format_size(*m.message_bits);
      if (m.period) j["period"] = format_duration(*m.period);
      if (m.timeout_multiplier) j["timeout_multiplier"] = *m.timeout_multiplier;
      if (m.encap_bits) j["encap"] = format_size(*m.encap_bits);
      if (m.hops) j["hops"] = *m.hops;
      if (m.per_hop_bits) j["per_hop"] = format_size(*m.per_hop_bits);
      if (m.sampling_ratio) j["sampling_ratio"] = *m.sampling_ratio;
      if (m.flow) j["flow"] = *m.flow;
      methods.push_back(j);
    }
    root["methods"] = methods;
  }
  if (c.sweep) {
    json s = json::object();
    if (c.sweep->method) s["method"] = *c.sweep->method;
    if (!c.sweep->periods.empty()) s["periods"] = join(c.sweep->periods, format_duration);
    if (!c.sweep->sampling_ratios.empty()) {
      s["sampling_ratios"] = join(c.sweep->sampling_ratios, count);
    }
    if (c.sweep->hbar_override_bits) s["hbar_override"] = format_size(*c.sweep->hbar_override_bits);
    root["sweep"] = s;
  }
  if (c.scale) {
    json s = json::object();
    if (c.scale->method) s["method"] = *c.scale->method;
    if (!c.scale->flows.empty()) s["flows"] = join(c.scale->flows, count);
    if (c.scale->period) s["period"] = format_duration(*c.scale->period);
    if (!c.scale->rates.empty()) s["rates"] = join(c.scale->rates, format_rate);
    if (c.scale->hbar_override_bits) s["hbar_override"] = format_size(*c.scale->hbar_override_bits);
    root["scale"] = s;
  }
  if (c.detect) {
    json s = json::object();
    if (c.detect->method) s["method"] = *c.detect->method;
    if (c.detect->failure_time) s["failure_time"] = format_duration(*c.detect->failure_time);
    if (c.detect->trials) s["trials"] = *c.detect->trials;
    root["detect"] = s;
  }
  if (c.ovu) {
    json s = json::object();
    if (c.ovu->method) s["method"] = *c.ovu->method;
    s["rates"] = join(c.ovu->rates, format_rate);
    root["ovu"] = s;
  }
  return root.dump(2) + "\n";
}

}  // namespace netobs
