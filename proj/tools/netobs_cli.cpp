#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "netobs/netobs.hpp"

namespace {

#ifdef NETOBS_EMPTY_PRESET_REGISTRY
std::span<const netobs::Preset> registry() { return {}; }
#else
std::span<const netobs::Preset> registry() { return netobs::default_presets(); }
#endif

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  bool fluid = false;
  std::optional<double> tolerance;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw netobs::Error(netobs::ErrorCode::io, "cannot read " + path);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

int run_experiment(netobs::ExperimentKind kind, const Flags& flags) {
  netobs::ScenarioConfig config = netobs::parse_config(slurp(flags.config));
  if (config.experiment != kind) {
    throw netobs::Error(netobs::ErrorCode::config_invalid,
                        std::string("experiment: config is '") + to_string(config.experiment) +
                            "' but subcommand is '" + to_string(kind) + "'");
  }
  if (flags.seed) config.seed = *flags.seed;
  if (flags.fluid) config.fluid = true;
  if (flags.tolerance) config.tolerance = *flags.tolerance;
  if (!flags.out.empty()) config.output = flags.out;

  const netobs::RunResult result = netobs::execute(config);
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << "\n";
  if (config.output) {
    netobs::write_file_atomically(*config.output, result.csv);
  } else {
    std::cout << result.csv;
  }
  for (const auto& f : result.failures) std::cerr << "violation: " << f << "\n";
  return result.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Observer-effect analysis for network measurement methods"};
  app.set_version_flag("--version", netobs::version);
  app.require_subcommand(1);

  Flags flags;
  struct Kind {
    const char* name;
    const char* help;
    netobs::ExperimentKind kind;
  };
  const Kind kinds[] = {
      {"simulate", "simulate a scenario and report per-flow bits", netobs::ExperimentKind::simulate},
      {"sweep", "impact vs uncertainty over a period or sampling grid", netobs::ExperimentKind::sweep},
      {"detect", "failure detection latency", netobs::ExperimentKind::detect},
      {"scale", "overhead vs flow count or flow rate", netobs::ExperimentKind::scale},
      {"ovu", "observed vs unobserved loss over a rate grid", netobs::ExperimentKind::ovu},
  };
  std::optional<netobs::ExperimentKind> chosen;
  for (const auto& [name, help, kind] : kinds) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", flags.config, "scenario file (JSON)")->required();
    sub->add_option("--out", flags.out, "CSV output path (stdout if omitted)");
    sub->add_option("--seed", flags.seed, "RNG seed, overrides the config");
    sub->add_flag("--fluid", flags.fluid, "evaluate with the fluid oracle");
    sub->add_option("--tolerance", flags.tolerance, "relative tolerance for relation checks");
    sub->callback([&chosen, k = kind] { chosen = k; });
  }
  auto* presets = app.add_subcommand("presets", "print the preset catalog");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : netobs::exit_error;
  }

  try {
    if (presets->parsed()) {
      std::cout << netobs::format_catalog(registry());
      return netobs::exit_ok;
    }
    return run_experiment(*chosen, flags);
  } catch (const netobs::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return netobs::exit_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return netobs::exit_error;
  }
}
