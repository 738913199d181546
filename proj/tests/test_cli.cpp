#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "netobs/netobs.hpp"

namespace fs = std::filesystem;

namespace {

struct Output {
  int code = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& part) {
  const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
  fs::path dir = fs::temp_directory_path() / (std::string("netobs_cli_") + info->name()) / part;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Output run(const std::string& args, const std::string& binary = NETOBS_CLI) {
  const fs::path dir = scratch("run");
  const std::string cmd = "\"" + binary + "\" " + args + " >\"" + (dir / "stdout").string() +
                          "\" 2>\"" + (dir / "stderr").string() + "\"";
  const int status = std::system(cmd.c_str());
  return Output{WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(dir / "stdout"),
                slurp(dir / "stderr")};
}

std::string config(const char* name) { return std::string(NETOBS_CONFIG_DIR) + "/" + name; }

fs::path write_config(const std::string& text) {
  const fs::path p = scratch("config") / "config.json";
  std::ofstream(p) << text;
  return p;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    rows.push_back(line);
  }
  return rows;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) out.push_back(cell);
  return out;
}

}  // namespace

TEST(Cli, PresetCatalog) {
  const auto r = run("presets");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("ccm-101"), std::string::npos);
  EXPECT_NE(r.out.find("hbar=808 bits"), std::string::npos);
  EXPECT_NE(r.out.find("gnmi-204"), std::string::npos);
  EXPECT_NE(r.out.find("= 80 bytes"), std::string::npos);
}

TEST(Cli, EmptyRegistryBuild) {
  const auto r = run("presets", NETOBS_CLI_EMPTY);
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, "");
}

TEST(Cli, SweepWritesFourHoldingRows) {
  const auto r = run("sweep --config \"" + config("sweep_ccm.json") + "\"");
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& row : rows) EXPECT_EQ(split(row).back(), "true") << row;
  EXPECT_NE(r.out.find("# seed: 0"), std::string::npos);
  EXPECT_NE(r.out.find("hbar_bits=808"), std::string::npos);
  EXPECT_NE(r.out.find(netobs::csv_schema::sweep), std::string::npos);
}

TEST(Cli, ScaleDeltaColumn) {
  const auto r = run("scale --config \"" + config("scale_ccm.json") + "\"");
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = data_rows(r.out);
  ASSERT_EQ(rows.size(), 4u);
  const double expected[] = {8080, 80800, 808000, 8080000};
  const double n[] = {1, 10, 100, 1000};
  for (std::size_t i = 0; i < 4; ++i) {
    const auto cells = split(rows[i]);
    // Quantum: one 2880-bit packet per flow over the 10 s horizon.
    EXPECT_NEAR(std::stod(cells[2]), expected[i], n[i] * 288.0) << rows[i];
    EXPECT_EQ(cells[6], "packet");
  }
}

TEST(Cli, WrongHbarExitsNonZeroAndNamesViolation) {
  const auto p = write_config(R"({
    "experiment": "sweep", "duration": "100s",
    "flows": [{"id": "f0", "rate": "1Mbps", "packet_size": "360B"}],
    "link": {"capacity": "10Mbps", "overprovisioned": true},
    "methods": [{"preset": "ccm-101"}],
    "sweep": {"periods": "100ms,1s", "hbar_override": "1000B"}})");
  const auto r = run("sweep --config \"" + p.string() + "\"");
  EXPECT_EQ(r.code, netobs::exit_violation);
  EXPECT_NE(r.err.find("relation violated"), std::string::npos);
  EXPECT_NE(r.err.find("tau_s=0.1"), std::string::npos);
  EXPECT_NE(r.err.find("hbar_bits=8000"), std::string::npos);
}

TEST(Cli, OutputFileIsWrittenWhole) {
  const fs::path dir = scratch("out");
  const fs::path out = dir / "sweep.csv";
  const auto r = run("sweep --config \"" + config("sweep_ioam.json") + "\" --out \"" +
                     out.string() + "\" --seed 9");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "");
  const std::string csv = slurp(out);
  EXPECT_NE(csv.find("# seed: 9"), std::string::npos);
  EXPECT_EQ(data_rows(csv).size(), 3u);
  EXPECT_FALSE(fs::exists(dir / "sweep.csv.tmp"));
}

TEST(Cli, FluidFlagAndTolerance) {
  const auto r = run("sweep --config \"" + config("sweep_ccm.json") + "\" --tolerance 0.001");
  EXPECT_EQ(r.code, 0) << r.err;
  const auto s = run("scale --config \"" + config("scale_ccm.json") + "\" --fluid");
  EXPECT_EQ(s.code, 0) << s.err;
  for (const auto& row : data_rows(s.out)) EXPECT_EQ(split(row).back(), "fluid");
}

TEST(Cli, Errors) {
  EXPECT_EQ(run("sweep --config /nonexistent.json").code, netobs::exit_error);
  const auto mismatch = run("detect --config \"" + config("sweep_ccm.json") + "\"");
  EXPECT_EQ(mismatch.code, netobs::exit_error);
  EXPECT_NE(mismatch.err.find("subcommand"), std::string::npos);
  EXPECT_EQ(run("").code, netobs::exit_error);
  EXPECT_EQ(run("sweep").code, netobs::exit_error);
  const auto bad = write_config(R"({"experiment": "simulate", "flows": []})");
  const auto e = run("simulate --config \"" + bad.string() + "\"");
  EXPECT_EQ(e.code, netobs::exit_error);
  EXPECT_NE(e.err.find("duration"), std::string::npos);
}

TEST(Cli, GoldenOutputs) {
  for (const char* name : {"simulate_mixed", "sweep_ccm", "sweep_ioam", "detect_ccm", "ovu_ioam",
                           "scale_ioam"}) {
    const std::string kind = std::string(name).substr(0, std::string(name).find('_'));
    const auto r = run(kind + " --config \"" + config((std::string(name) + ".json").c_str()) + "\"");
    EXPECT_EQ(r.code, 0) << name << r.err;
    EXPECT_EQ(r.out, slurp(fs::path(NETOBS_GOLDEN_DIR) / (std::string(name) + ".csv"))) << name;
  }
}

TEST(Cli, SchemaHeaders) {
  using netobs::ExperimentKind;
  EXPECT_STREQ(netobs::csv_header(ExperimentKind::sweep),
               "sweep_variable,delta_m,delta_p_measured,delta_p_bound,hbar,holds");
  EXPECT_STREQ(netobs::csv_header(ExperimentKind::scale),
               "sweep_variable,delta_m,delta_p_measured,delta_p_bound,hbar,holds,mode");
  EXPECT_STREQ(netobs::csv_header(ExperimentKind::simulate),
               "category,id,offered_bits,delivered_bits,dropped_bits,offered_bps,delivered_bps,"
               "loss_bps");
  EXPECT_STREQ(netobs::csv_header(ExperimentKind::detect), "trial,failure_time,detection_time,latency");
  EXPECT_STREQ(netobs::csv_header(ExperimentKind::ovu), "user_rate,loss_observed,loss_unobserved");
}

TEST(Runner, ExecuteIsDeterministic) {
  const auto c = netobs::parse_config(slurp(config("simulate_mixed.json")));
  EXPECT_EQ(netobs::execute(c).csv, netobs::execute(c).csv);
}
