#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "ccattest/error.hpp"
#include "ccattest/keyvalue.hpp"
#include "ccattest/timing.hpp"

using namespace ccattest;

TEST(Elapsed, PublishedReadVolumes) {
  CostCounters c;
  c.pm_bytes = 37'000'000;
  EXPECT_DOUBLE_EQ(elapsed(c, slow_node()), 37.0);
  EXPECT_DOUBLE_EQ(elapsed(c, fast_node()), 0.74);
  EXPECT_EQ(elapsed(CostCounters{}, slow_node()), 0.0);
}

TEST(Elapsed, LinearAndMonotone) {
  std::mt19937_64 rng(1);
  const auto p = slow_node();
  for (int i = 0; i < 200; ++i) {
    CostCounters a;
    a.pm_bytes = rng() % 1000000;
    a.em_bytes = rng() % 1000000;
    a.hash_bytes = rng() % 1000000;
    for (auto c : kAllCodecs) a.add_decomp(c, rng() % 1000000);
    CostCounters b = a;
    b += a;
    EXPECT_NEAR(elapsed(b, p), 2 * elapsed(a, p), 1e-9);
    CostCounters more = a;
    ++more.em_bytes;
    EXPECT_GT(elapsed(more, p), elapsed(a, p));
  }
}

TEST(Elapsed, EachTermUsesItsBandwidth) {
  DeviceProfile p = slow_node();
  p.pm_read_bw = 2;
  p.em_read_bw = 4;
  p.hash_bw = 8;
  p.decomp_bw = {16, 32, 64};
  CostCounters c;
  c.pm_bytes = 2;
  c.em_bytes = 4;
  c.hash_bytes = 8;
  c.decomp_bytes = {16, 32, 64};
  EXPECT_DOUBLE_EQ(elapsed(c, p), 6.0);
}

TEST(Calibrate, HandExample) {
  const auto t = calibrate_thresholds(0.2, 5, 37, 1.5);
  EXPECT_NEAR(t.t_em, 0.3, 1e-12);
  EXPECT_NEAR(t.t_pm, std::sqrt(0.3 * 37), 1e-12);
  EXPECT_NEAR(t.t_pm, 3.33, 0.01);
  EXPECT_DOUBLE_EQ(t.acceptance(), t.t_em);
}

TEST(Calibrate, Failures) {
  auto code = [](double h, double e, double p, double m) {
    try {
      calibrate_thresholds(h, e, p, m);
    } catch (const Error& err) {
      return err.code();
    }
    return Errc::kInvalidArgument;
  };
  EXPECT_EQ(code(5, 5, 37, 1.5), Errc::kCalibrationFailure);
  EXPECT_EQ(code(6, 5, 37, 1.5), Errc::kCalibrationFailure);
  EXPECT_EQ(code(0.2, 5, 0.1, 1.5), Errc::kCalibrationFailure);
  EXPECT_EQ(code(0.2, 5, 37, 0.5), Errc::kCalibrationFailure);
  EXPECT_EQ(code(1, 1.2, 37, 1.5), Errc::kCalibrationFailure);  // margin overshoots ext
}

TEST(Calibrate, MarginOneIsExactHonestTime) {
  const auto t = calibrate_thresholds(0.262152, 0.6, 9.0, 1.0);
  EXPECT_EQ(t.t_em, 0.262152);
}

TEST(Calibrate, PostconditionProperty) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(0.001, 10.0);
  for (int i = 0; i < 2000; ++i) {
    const double honest = u(rng);
    const double margin = 1.0 + u(rng) / 5;
    const double ext = honest * margin * (1.0 + u(rng));
    const double pm = honest * margin * (1.0 + u(rng));
    const auto t = calibrate_thresholds(honest, ext, pm, margin);
    ASSERT_LE(honest, t.acceptance());
    ASSERT_GT(t.t_pm, t.t_em);
    ASSERT_LT(t.t_em, ext);
    ASSERT_LT(t.t_pm, pm);
  }
}

TEST(Profiles, Defaults) {
  const auto s = slow_node();
  EXPECT_EQ(s.pm_read_bw, 1e6);
  EXPECT_EQ(s.em_read_bw, 0.25e6);
  EXPECT_EQ(s.hash_bw, s.pm_read_bw);
  const auto f = fast_node();
  EXPECT_EQ(f.pm_read_bw, 50e6);
  EXPECT_EQ(f.em_read_bw, 12.5e6);
  EXPECT_EQ(profile_by_name("fast-node").pm_read_bw, 50e6);
  EXPECT_THROW(profile_by_name("turbo"), Error);
}

TEST(Profiles, ConfigRoundTripAndOverrides) {
  const auto p = fast_node();
  const auto back = profile_from_config(profile_to_config(p), slow_node());
  EXPECT_EQ(back.pm_read_bw, p.pm_read_bw);
  EXPECT_EQ(back.em_read_bw, p.em_read_bw);
  EXPECT_EQ(back.decomp_bw, p.decomp_bw);
  const auto kv = KeyValues::parse("pm_read_bw = 2e6\ndecomp_bw.lz-general=5e5\n");
  const auto q = profile_from_config(kv, slow_node());
  EXPECT_EQ(q.pm_read_bw, 2e6);
  EXPECT_EQ(q.hash_bw, 2e6);  // follows pm_read_bw unless set
  EXPECT_EQ(q.decomp(CodecId::kLzGeneral), 5e5);
  EXPECT_THROW(profile_from_config(KeyValues::parse("pm_read_bw=0\n"), slow_node()), Error);
  EXPECT_THROW(profile_from_config(KeyValues::parse("speed=1\n"), slow_node()), Error);
}

TEST(SimClock, DeterministicAndJitterBounded) {
  SimClock plain;
  EXPECT_EQ(plain.advance(0.5), 0.5);
  EXPECT_EQ(plain.now(), 0.5);
  SimClock a(0.1, 7), b(0.1, 7);
  for (int i = 0; i < 100; ++i) {
    const double s = a.advance(1.0);
    EXPECT_EQ(s, b.advance(1.0));
    EXPECT_GE(s, 1.0);
    EXPECT_LE(s, 1.1);
  }
  EXPECT_THROW(SimClock(-0.1), Error);
}
