#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hedgeff/models.hpp"

using namespace hedgeff;

namespace {

ModelSpec bm(real dt = 1e-2) {
  ModelSpec m;
  m.dt = dt;
  return m;
}

ModelSpec bs(real dt = 1e-3) {
  ModelSpec m;
  m.kind = BlackScholesDelta{1.0, 1.0, 0.2, 0.0, 2.0};
  m.dt = dt;
  return m;
}

// Undiscounted call price with rate r, used as a finite-difference oracle.
real call_price(real s, real k, real vol, real r, real tau) {
  const real vs = vol * std::sqrt(tau);
  const real d1 = (std::log(s / k) + (r + 0.5 * vol * vol) * tau) / vs;
  const real d2 = d1 - vs;
  auto n = [](real x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); };
  return s * n(d1) - k * std::exp(-r * tau) * n(d2);
}

std::string error_of(const ModelSpec& m) {
  try {
    validate(m);
  } catch (const std::invalid_argument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(ModelSpec, GridSizeAndStep) {
  const auto m = bm(1e-3);
  EXPECT_EQ(m.grid_size(), 1001u);
  EXPECT_DOUBLE_EQ(m.step(), 1e-3);
}

TEST(ModelSpec, ValidationNamesTheKey) {
  auto m = bm();
  m.dt = 0.05;
  EXPECT_EQ(error_of(m).rfind("dt:", 0), 0u);
  m = bm();
  m.horizon = -1;
  EXPECT_EQ(error_of(m).rfind("T:", 0), 0u);
  m = bs();
  std::get<BlackScholesDelta>(m.kind).maturity = 1.0;
  EXPECT_EQ(error_of(m).rfind("maturity:", 0), 0u);
  m = bs();
  std::get<BlackScholesDelta>(m.kind).vol = 0.0;
  EXPECT_EQ(error_of(m).rfind("vol:", 0), 0u);
  m = bm();
  m.s_mode = CostWeight::LinearCost;
  EXPECT_EQ(error_of(m).rfind("s_mode:", 0), 0u);
  EXPECT_EQ(error_of(bs()), "");
}

TEST(Brownian, TerminalVarianceIsHorizon) {
  const auto m = bm();
  const int n = 4000;
  double s2 = 0;
  for (int p = 0; p < n; ++p) {
    const auto path = simulate(m, StreamId{1, static_cast<std::uint64_t>(p)});
    s2 += path.x(path.size() - 1) * path.x(path.size() - 1);
  }
  EXPECT_NEAR(s2 / n, 1.0, 5 * std::sqrt(2.0 / n));
}

TEST(Brownian, QuadraticVariationIsTimeExactly) {
  const auto path = simulate(bm(1e-3), StreamId{2, 0});
  for (std::size_t i = 0; i < path.size(); ++i) {
    ASSERT_EQ(path.qv_x(i), path.t(i));
    ASSERT_EQ(path.x(i), path.y(i));
    ASSERT_EQ(path.k(i), 1.0);
    ASSERT_EQ(path.s(i), 1.0);
  }
  EXPECT_EQ(path.x(0), 0.0);
  EXPECT_DOUBLE_EQ(path.t(path.size() - 1), 1.0);
}

TEST(Drifted, TerminalMeanIsDrift) {
  auto m = bm();
  m.kind = DriftedBrownian{0.5};
  const int n = 4000;
  double s = 0;
  for (int p = 0; p < n; ++p) {
    const auto path = simulate(m, StreamId{3, static_cast<std::uint64_t>(p)});
    s += path.x(path.size() - 1);
    ASSERT_EQ(path.h(0), 0.5);
  }
  EXPECT_NEAR(s / n, 0.5, 5 / std::sqrt(double(n)));
}

TEST(Simulate, ReproducibleAndSeedSensitive) {
  const auto a = simulate(bm(), StreamId{4, 1});
  const auto b = simulate(bm(), StreamId{4, 1});
  const auto c = simulate(bm(), StreamId{4, 2});
  EXPECT_EQ(a.x, b.x);
  EXPECT_NE(a.x, c.x);
}

TEST(Simulate, StreamingMatchesStored) {
  for (const auto& m : {bm(1e-3), bs(1e-3)}) {
    const auto path = simulate(m, StreamId{5, 9});
    PathGenerator gen(m, StreamId{5, 9});
    std::size_t i = 0;
    do {
      const Sample s = gen.current();
      const Sample t = path.sample(i);
      ASSERT_EQ(s.x, t.x);
      ASSERT_EQ(s.y, t.y);
      ASSERT_EQ(s.qv_x, t.qv_x);
      ASSERT_EQ(s.k, t.k);
      ++i;
    } while (gen.advance());
    EXPECT_EQ(i, path.size());
  }
}

TEST(BlackScholes, DeltaStateConsistent) {
  auto m = bs();
  m.s_mode = CostWeight::LinearCost;
  const auto path = simulate(m, StreamId{6, 0});
  EXPECT_FALSE(path.k_capped);
  EXPECT_EQ(path.y(0), 1.0);
  for (std::size_t i = 0; i < path.size(); ++i) {
    ASSERT_GT(path.x(i), 0.0);
    ASSERT_LT(path.x(i), 1.0);
    ASSERT_GT(path.y(i), 0.0);
    const auto gr = call_greeks(path.y(i), 1.0, 0.2, 0.0, 2.0 - path.t(i));
    ASSERT_DOUBLE_EQ(path.k(i), 1.0 / (gr.gamma * gr.gamma));
    ASSERT_DOUBLE_EQ(path.h(i), -1.0 / (path.y(i) * gr.gamma));
    ASSERT_DOUBLE_EQ(path.s(i), path.y(i) / path.k(i));
    if (i > 0) ASSERT_GT(path.qv_x(i), path.qv_x(i - 1));
  }
}

// d<X> = (vol y gamma)^2 dt, so E[<X>_T] matches the mean of the left-point sum.
TEST(BlackScholes, QuadraticVariationMatchesRealizedSquares) {
  const auto m = bs(1e-3);
  double qv = 0, realized = 0;
  const int n = 400;
  for (int p = 0; p < n; ++p) {
    const auto path = simulate(m, StreamId{7, static_cast<std::uint64_t>(p)});
    qv += path.qv_x(path.size() - 1);
    for (std::size_t i = 1; i < path.size(); ++i) {
      const real d = path.x(i) - path.x(i - 1);
      realized += d * d;
    }
  }
  EXPECT_NEAR(realized / qv, 1.0, 0.02);
}

TEST(BlackScholes, KCapIsFlagged) {
  auto m = bs();
  std::get<BlackScholesDelta>(m.kind).strike = 3.0;  // deep out of the money: tiny gamma
  m.k_cap = 10.0;
  const auto path = simulate(m, StreamId{8, 0});
  EXPECT_TRUE(path.k_capped);
  for (std::size_t i = 0; i < path.size(); ++i) ASSERT_LE(path.k(i), 10.0 * (1 + 1e-12));
}

TEST(CallGreeks, MatchFiniteDifferences) {
  for (const real s : {0.7, 1.0, 1.4}) {
    const real h = 1e-4;
    const auto gr = call_greeks(s, 1.0, 0.3, 0.02, 1.5);
    const real up = call_price(s + h, 1.0, 0.3, 0.02, 1.5);
    const real mid = call_price(s, 1.0, 0.3, 0.02, 1.5);
    const real dn = call_price(s - h, 1.0, 0.3, 0.02, 1.5);
    EXPECT_NEAR(gr.delta, (up - dn) / (2 * h), 1e-8);
    EXPECT_NEAR(gr.gamma, (up - 2 * mid + dn) / (h * h), 1e-5);
  }
}

TEST(RefineBridge, SharesGridPointsAndHalvesStep) {
  const auto m = bm(1e-2);
  const auto coarse = simulate(m, StreamId{9, 0});
  const auto fine = refine_bridge(coarse, m, StreamId{99, 0});
  ASSERT_EQ(fine.size(), 2 * coarse.size() - 1);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    ASSERT_EQ(fine.x(2 * i), coarse.x(i));
    ASSERT_EQ(fine.t(2 * i), coarse.t(i));
  }
  EXPECT_NEAR(fine.t(1), 0.005, 1e-15);
  EXPECT_THROW(refine_bridge(simulate(bs(), StreamId{1, 0}), bs(), StreamId{1, 1}),
               std::invalid_argument);
}

TEST(RefineBridge, MidpointVarianceIsQuarterStep) {
  const auto m = bm(1e-2);
  double s = 0, s2 = 0;
  int n = 0;
  for (int p = 0; p < 50; ++p) {
    const auto coarse = simulate(m, StreamId{10, static_cast<std::uint64_t>(p)});
    const auto fine = refine_bridge(coarse, m, StreamId{11, static_cast<std::uint64_t>(p)});
    for (std::size_t i = 0; i + 1 < coarse.size(); ++i) {
      const real d = fine.x(2 * i + 1) - 0.5 * (coarse.x(i) + coarse.x(i + 1));
      s += d;
      s2 += d * d;
      ++n;
    }
  }
  EXPECT_NEAR(s2 / n, 0.01 / 4, 5 * 0.0025 * std::sqrt(2.0 / n));
  EXPECT_NEAR(s / n, 0.0, 5 * 0.05 / std::sqrt(double(n)));
}

TEST(PathCsv, HeaderAndRows) {
  std::ostringstream out;
  write_path_csv(out, simulate(bm(1e-2), StreamId{1, 0}));
  const std::string text = out.str();
  EXPECT_EQ(text.rfind("t,x,y,qv_x,k,s,h\n", 0), 0u);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 102);
  EXPECT_EQ(model_name(bs()), "bs");
}
