#include <gtest/gtest.h>

#include <random>

#include "netobs/netobs.hpp"

using namespace netobs;

namespace {

FlowSpec paper_flow(std::string id = "f0") { return FlowSpec{std::move(id), BitRate::mbps(1), 2880}; }

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::invalid_argument;
}

}  // namespace

TEST(Units, RatesRejectNegativeAndNonFinite) {
  EXPECT_EQ(code_of([] { BitRate(-1.0); }), ErrorCode::negative_rate);
  EXPECT_EQ(code_of([] { BitRate(std::numeric_limits<double>::infinity()); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([] { (void)(BitRate::mbps(1) - BitRate::mbps(2)); }), ErrorCode::negative_rate);
  EXPECT_DOUBLE_EQ((BitRate::kbps(500) + BitRate::kbps(500)).value(), 1e6);
}

TEST(Units, DurationMustBePositive) {
  EXPECT_THROW(Duration(0.0), Error);
  EXPECT_THROW(Duration(-0.5), Error);
  EXPECT_DOUBLE_EQ(Duration::millis(100).value(), 0.1);
}

TEST(Units, OverheadBitsAreCheckedAndOctetAware) {
  EXPECT_EQ(OverheadBits::from_octets(101).bits(), 808u);
  EXPECT_EQ(OverheadBits::from_bits(808).octets(), 101.0);
  EXPECT_THROW(OverheadBits::from_bits(1) - OverheadBits::from_bits(2), Error);
  EXPECT_THROW(OverheadBits::from_bits(~0ull) + OverheadBits::from_bits(1), Error);
  EXPECT_THROW(OverheadBits::from_bits(~0ull) * 2, Error);
  EXPECT_THROW(OverheadBits::from_octets(~0ull), Error);
  EXPECT_EQ((OverheadBits::from_octets(8) * 3).bits(), 192u);
}

TEST(Units, UncertaintyIsSlopeTimesPeriod) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> slope(0.0, 1e7), tau(1e-6, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double s = slope(rng), t = tau(rng);
    EXPECT_EQ(Uncertainty("m", s, Duration(t)).value(), s * t);
  }
  EXPECT_EQ(Uncertainty("m", 0.0, Duration(42)).value(), 0.0);
  EXPECT_THROW(Uncertainty("m", -1.0, Duration(1)), Error);
  EXPECT_EQ(Uncertainty::detection_time(Duration(0.1)).value(), 0.1);
}

TEST(Scenario, AcceptsOneFlowOneInBandMethod) {
  const auto s = validate_scenario({paper_flow()}, LinkSpec{BitRate::mbps(1)}, {presets::ioam_3hop()});
  EXPECT_EQ(s.flows().size(), 1u);
  EXPECT_EQ(s.methods().front().id(), "ioam-3hop");
}

TEST(Scenario, RejectsEmptyFlowList) {
  try {
    validate_scenario({}, LinkSpec{BitRate::mbps(1)}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::no_flows);
    EXPECT_NE(std::string(e.what()).find("no flows"), std::string::npos);
  }
}

TEST(Scenario, RejectsDuplicateFlowIds) {
  try {
    validate_scenario({paper_flow(), paper_flow()}, LinkSpec{BitRate::mbps(1)}, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::duplicate_flow_id);
    EXPECT_NE(std::string(e.what()).find("duplicate flow id"), std::string::npos);
  }
}

TEST(Scenario, RejectsDegenerateInputs) {
  const LinkSpec link{BitRate::mbps(1)};
  EXPECT_EQ(code_of([&] { validate_scenario({FlowSpec{"f", BitRate(0.0), 8}}, link, {}); }),
            ErrorCode::zero_rate);
  EXPECT_EQ(code_of([&] { validate_scenario({FlowSpec{"f", BitRate::mbps(1), 0}}, link, {}); }),
            ErrorCode::invalid_argument);
  EXPECT_EQ(code_of([&] { validate_scenario({paper_flow()}, LinkSpec{BitRate(0.0)}, {}); }),
            ErrorCode::zero_capacity);
  EXPECT_EQ(code_of([&] {
              validate_scenario({paper_flow()}, link,
                                {presets::ccm_101().with_flow("nope")});
            }),
            ErrorCode::unknown_flow);
  EXPECT_EQ(code_of([&] {
              validate_scenario({paper_flow()}, link, {presets::ccm_101(), presets::ccm_101()});
            }),
            ErrorCode::invalid_argument);
}

TEST(Scenario, ValidationIsIdempotent) {
  const auto s = validate_scenario({paper_flow("a"), paper_flow("b")}, LinkSpec{BitRate::mbps(3), true},
                                   {presets::ccm_101(), presets::ioam_3hop().with_flow("b")});
  EXPECT_EQ(validate_scenario(s), s);
  EXPECT_EQ(validate_scenario(validate_scenario(s)), s);
}

TEST(Scenario, CarriersFollowFlowBinding) {
  const auto s = validate_scenario({paper_flow("a"), paper_flow("b")}, LinkSpec{BitRate::mbps(3)},
                                   {presets::ioam_3hop().with_id("all"),
                                    presets::ioam_3hop().with_id("only-b").with_flow("b")});
  EXPECT_EQ(s.carriers(s.method("all")), (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(s.carriers(s.method("only-b")), (std::vector<std::size_t>{1}));
  EXPECT_THROW(s.method("missing"), Error);
  EXPECT_TRUE(s.without_methods().methods().empty());
}
