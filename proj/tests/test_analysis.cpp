#include <gtest/gtest.h>

#include <vector>

#include "netobs/netobs.hpp"

using namespace netobs;

namespace {

const FlowSpec kFlow{"f0", BitRate::mbps(1), 2880};
const LinkSpec kRoomy{BitRate::mbps(10), true};

Impact rate(double bps) { return Impact{ImpactKind::data_rate, BitRate(bps)}; }

}  // namespace

TEST(CheckRelation, EqualityCases) {
  auto r = check_relation(Uncertainty::detection_time(Duration(1)), rate(808),
                          OverheadBits::from_bits(808), 0.0);
  EXPECT_EQ(r.product, 808.0);
  EXPECT_EQ(r.bound, 808.0);
  EXPECT_TRUE(r.holds);
  r = check_relation(Uncertainty::detection_time(Duration(0.1)), rate(8080),
                     OverheadBits::from_bits(808), 1e-12);
  EXPECT_TRUE(r.holds);
  EXPECT_NEAR(r.ratio(), 1.0, 1e-12);
}

TEST(CheckRelation, Violation) {
  const auto r = check_relation(Uncertainty::detection_time(Duration(1)), rate(800),
                                OverheadBits::from_bits(808), 0.0);
  EXPECT_FALSE(r.holds);
  EXPECT_LT(r.slack, 0.0);
  EXPECT_THROW(check_relation(r.delta_m, rate(1), OverheadBits::from_bits(1), 1.0), Error);
  EXPECT_THROW(check_relation(r.delta_m, rate(1), OverheadBits::from_bits(1), -0.1), Error);
}

TEST(CheckRelation, SlopeScalesBound) {
  const auto r = check_relation(Uncertainty("counter", 1e6, Duration(1)), rate(808),
                                OverheadBits::from_bits(808), 0.0);
  EXPECT_EQ(r.bound, 808e6);
  EXPECT_TRUE(r.holds);
  const auto flat = check_relation(Uncertainty("m", 0.0, Duration(1)), rate(0),
                                   OverheadBits::from_bits(808), 0.0);
  EXPECT_TRUE(flat.degenerate);
}

TEST(SweepResult, RequiresIncreasingValues) {
  SweepResult s("tau_s", "m");
  auto r = check_relation(Uncertainty::detection_time(Duration(1)), rate(808),
                          OverheadBits::from_bits(808), 0.0);
  r.sweep_value = 1.0;
  s.add(r);
  EXPECT_THROW(s.add(r), Error);
  EXPECT_TRUE(s.all_hold());
}

TEST(ImpactSweep, CcmPeriods) {
  const std::vector<double> taus{0.00333, 0.1, 1.0, 10.0};
  const std::vector<double> expected{242642.64264264263, 8080.0, 808.0, 80.8};
  const auto res = impact_vs_uncertainty_sweep(presets::ccm_101(), kFlow, kRoomy, taus,
                                               Duration(100), 0);
  ASSERT_EQ(res.records().size(), 4u);
  EXPECT_EQ(res.variable(), "tau_s");
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& r = res.records()[i];
    const double q = std::max(2880.0, 808.0) / 100.0;
    EXPECT_NEAR(r.delta_p.value.value(), expected[i], q) << taus[i];
    EXPECT_EQ(r.hbar.bits(), 808u);
    EXPECT_TRUE(r.holds);
  }
}

TEST(ImpactSweep, IoamSamplingRatios) {
  const std::vector<double> grid{1, 10, 100};
  const std::vector<double> expected{222222.22222222222, 22222.222222222223, 2222.222222222222};
  const auto res = impact_vs_uncertainty_sweep(presets::ioam_3hop(), kFlow,
                                               LinkSpec{BitRate::mbps(1)}, grid, Duration(100), 0);
  EXPECT_EQ(res.variable(), "sampling_ratio");
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& r = res.records()[i];
    EXPECT_EQ(r.delta_p.kind, ImpactKind::loss_rate);
    EXPECT_NEAR(r.delta_p.value.value(), expected[i], 3520.0 / 100.0);
    EXPECT_TRUE(r.holds);
  }
}

TEST(ImpactSweep, GnmiOneSecond) {
  const std::vector<double> grid{1.0};
  const auto res = impact_vs_uncertainty_sweep(presets::gnmi_204(), kFlow, kRoomy, grid,
                                               Duration(100), 0);
  EXPECT_NEAR(res.records()[0].delta_p.value.value(), 1632.0, 28.8);
}

TEST(ImpactSweep, WrongHbarIsFlagged) {
  SweepOptions o;
  o.hbar_override = OverheadBits::from_bits(2000);
  const std::vector<double> grid{0.1, 1.0};
  const auto res = impact_vs_uncertainty_sweep(presets::ccm_101(), kFlow, kRoomy, grid,
                                               Duration(100), 0, o);
  EXPECT_FALSE(res.all_hold());
}

TEST(ImpactSweep, SequentialAndParallelAgree) {
  const std::vector<double> grid{0.01, 0.1, 1.0};
  SweepOptions seq;
  seq.parallel = false;
  const auto a = impact_vs_uncertainty_sweep(presets::ccm_101(), kFlow, kRoomy, grid, Duration(20), 0);
  const auto b =
      impact_vs_uncertainty_sweep(presets::ccm_101(), kFlow, kRoomy, grid, Duration(20), 0, seq);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(a.records()[i].delta_p, b.records()[i].delta_p);
  }
}

TEST(ScalingSweep, ThousandFlows) {
  const std::vector<std::uint64_t> n{1000};
  const auto res = scaling_sweep(presets::ccm_101(), n, Duration(0.1), kFlow, Duration(10), 0);
  const auto& r = res.records()[0];
  EXPECT_EQ(r.hbar.bits(), 808000u);
  EXPECT_EQ(r.mode, EvalMode::packet);
  EXPECT_NEAR(r.delta_p.value.value(), 8.08e6, 1000 * 2880.0 / 10.0);
  EXPECT_TRUE(r.holds);
}

TEST(ScalingSweep, SingleFlowMatchesImpactSweep) {
  const std::vector<std::uint64_t> n{1};
  const std::vector<double> tau{0.1};
  const auto scaled = scaling_sweep(presets::ccm_101(), n, Duration(0.1), kFlow, Duration(50), 0);
  const auto single = impact_vs_uncertainty_sweep(presets::ccm_101(), kFlow, kRoomy, tau,
                                                  Duration(50), 0);
  EXPECT_NEAR(scaled.records()[0].delta_p.value.value(), single.records()[0].delta_p.value.value(),
              2880.0 / 50.0);
}

TEST(ScalingSweep, ModeSwitchAndCap) {
  SweepOptions o;
  o.event_cap = 1e4;
  const std::vector<std::uint64_t> n{1, 100};
  const auto res = scaling_sweep(presets::ccm_101(), n, Duration(0.1), kFlow, Duration(10), 0, o);
  EXPECT_EQ(res.records()[0].mode, EvalMode::packet);
  EXPECT_EQ(res.records()[1].mode, EvalMode::fluid);
  EXPECT_DOUBLE_EQ(res.records()[1].delta_p.value.value(), 808000.0);
  o.force_mode = EvalMode::packet;
  try {
    scaling_sweep(presets::ccm_101(), n, Duration(0.1), kFlow, Duration(10), 0, o);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::scale_cap_exceeded);
  }
}

TEST(ScalingSweep, PacketAndFluidAgreePerFlow) {
  const std::vector<std::uint64_t> n{1, 10, 50};
  SweepOptions fluid;
  fluid.force_mode = EvalMode::fluid;
  const auto p = scaling_sweep(presets::gnmi_204(), n, Duration(0.1), kFlow, Duration(10), 0);
  const auto f = scaling_sweep(presets::gnmi_204(), n, Duration(0.1), kFlow, Duration(10), 0, fluid);
  for (std::size_t i = 0; i < n.size(); ++i) {
    const double q = static_cast<double>(n[i]) * 2880.0 / 10.0;
    EXPECT_NEAR(p.records()[i].delta_p.value.value(), f.records()[i].delta_p.value.value(), q);
  }
}

TEST(RateScaling, InBandFluid) {
  SweepOptions o;
  o.force_mode = EvalMode::fluid;
  const std::vector<double> rates{1e6, 1e9, 1e11};
  const auto res = rate_scaling_sweep(presets::ioam_3hop().with_sampling_ratio(10), rates, 2880,
                                      Duration(10), 0, o);
  for (std::size_t i = 0; i < rates.size(); ++i) {
    EXPECT_NEAR(res.records()[i].delta_p.value.value(), 640.0 / 2880.0 * rates[i] / 10.0,
                1e-9 * rates[i]);
  }
}

TEST(ObservedVsUnobserved, Examples) {
  const std::vector<double> rates{0.5e6, 0.9e6, 1.2e6};
  const auto rows = observed_vs_unobserved_curve(rates, LinkSpec{BitRate::mbps(1)},
                                                 presets::ioam_3hop(), 2880, Duration(100), 0);
  const double q = 3520.0 / 100.0;
  EXPECT_EQ(rows[0].loss_observed, 0.0);
  EXPECT_EQ(rows[0].loss_unobserved, 0.0);
  EXPECT_NEAR(rows[1].loss_observed, 100000.0, q);
  EXPECT_EQ(rows[1].loss_unobserved, 0.0);
  EXPECT_NEAR(rows[2].loss_observed, 466666.6666666667, q);
  EXPECT_NEAR(rows[2].loss_unobserved, 200000.0, q);
}

TEST(Hyperbola, Shape) {
  const std::vector<double> dm{0.5, 1.0, 2.0, 4.0};
  const auto c = hyperbola_reference(OverheadBits::from_bits(808), 1.0, dm);
  EXPECT_EQ(c[1].delta_p, 808.0);
  for (std::size_t i = 1; i < c.size(); ++i) EXPECT_DOUBLE_EQ(c[i].delta_p, c[i - 1].delta_p / 2);
  for (const auto& p : hyperbola_reference(OverheadBits::from_bits(0), 1.0, dm)) {
    EXPECT_EQ(p.delta_p, 0.0);
  }
}

TEST(Hyperbola, SweepPointsLieOnOrAbove) {
  const std::vector<double> taus{0.01, 0.1, 1.0};
  const auto res = impact_vs_uncertainty_sweep(presets::ccm_101(), kFlow, kRoomy, taus,
                                               Duration(100), 0);
  const auto curve = hyperbola_reference(OverheadBits::from_bits(808), 1.0, taus);
  for (std::size_t i = 0; i < taus.size(); ++i) {
    const auto& r = res.records()[i];
    EXPECT_GE(r.delta_p.value.value(), curve[i].delta_p * (1.0 - r.tolerance));
  }
}

TEST(FitLine, ExactLine) {
  const std::vector<double> x{1, 2, 3, 4}, y{3, 5, 7, 9};
  const auto f = fit_line(x, y);
  EXPECT_DOUBLE_EQ(f.slope, 2.0);
  EXPECT_DOUBLE_EQ(f.intercept, 1.0);
  const std::vector<double> same{1, 1};
  EXPECT_THROW(fit_line(same, same), Error);
}
