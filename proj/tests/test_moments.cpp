#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "hedgeff/moments.hpp"
#include "hedgeff/rng.hpp"

using namespace hedgeff;

namespace {

MomentSet<> gaussian(real beta = 1.0) {
  // m2 = 1, m3 = 0, m4 = 3, E|X| = sqrt(2/pi); E|X|^beta only matters via beta here.
  const real absb = std::pow(2.0, beta / 2.0) * std::tgamma((beta + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
  return {1.0, 0.0, 3.0, std::sqrt(2.0 / std::numbers::pi), absb, beta};
}

// Direct power sums from the atoms; independent of exact_moments.
real raw_moment(const DiscreteDistribution<>& d, real p, bool absolute) {
  real s = 0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    const real v = d.values()(i);
    s += d.weights()(i) * (absolute ? (p == 0 ? 1.0 : std::pow(std::abs(v), p)) : std::pow(v, p));
  }
  return s;
}

DiscreteDistribution<> random_law(RandomStream& rng) {
  const int n = 2 + static_cast<int>(rng.uniform() * 7.0);
  VectorXr v(n), w(n);
  for (int i = 0; i < n; ++i) {
    v(i) = -5.0 + 10.0 * rng.uniform();
    w(i) = 0.05 + rng.uniform();
  }
  w /= w.sum();
  return center(DiscreteDistribution<>(v, w));
}

const DiscreteDistribution<> kThreeAtom{{-1.0, 0.25}, {0.0, 0.5}, {1.0, 0.25}};

}  // namespace

TEST(Distribution, RejectsBadWeights) {
  EXPECT_THROW((DiscreteDistribution<>{{1.0, 0.5}, {2.0, 0.4}}), std::invalid_argument);
  EXPECT_THROW((DiscreteDistribution<>{{1.0, -0.5}, {2.0, 1.5}}), std::invalid_argument);
}

TEST(Center, SymmetricPair) {
  const auto c = center(DiscreteDistribution<>{{0.0, 0.5}, {2.0, 0.5}});
  EXPECT_DOUBLE_EQ(c.values()(0), -1.0);
  EXPECT_DOUBLE_EQ(c.values()(1), 1.0);
}

TEST(Center, SubtractsMean) {
  const auto c = center(DiscreteDistribution<>{{1.0, 1.0 / 3.0}, {4.0, 2.0 / 3.0}});
  EXPECT_NEAR(c.values()(0), -2.0, 1e-14);
  EXPECT_NEAR(c.values()(1), 1.0, 1e-14);
  EXPECT_DOUBLE_EQ(c.weights()(0), 1.0 / 3.0);
  EXPECT_NEAR(c.mean(), 0.0, 1e-12);
}

TEST(Center, CenteredInputUnchanged) {
  const DiscreteDistribution<> d{{-1.0, 0.5}, {1.0, 0.5}};
  const auto c = center(d);
  EXPECT_EQ(c.values(), d.values());
  EXPECT_EQ(c.weights(), d.weights());
}

TEST(Center, DegenerateLawRejected) {
  EXPECT_THROW(center(DiscreteDistribution<>{{2.0, 0.5}, {2.0, 0.5}}), std::invalid_argument);
}

TEST(ExactMoments, FairCoin) {
  const auto m = exact_moments(DiscreteDistribution<>{{-1.0, 0.5}, {1.0, 0.5}}, 1.0);
  EXPECT_EQ(m.m2, 1.0);
  EXPECT_EQ(m.m3, 0.0);
  EXPECT_EQ(m.m4, 1.0);
  EXPECT_EQ(m.abs1, 1.0);
  EXPECT_EQ(m.abs_beta, 1.0);
}

TEST(ExactMoments, ScaledCoin) {
  const auto m = exact_moments(DiscreteDistribution<>{{-1.0, 0.5}, {1.0, 0.5}}.scaled(2.0), 1.0);
  EXPECT_DOUBLE_EQ(m.m2, 4.0);
  EXPECT_DOUBLE_EQ(m.m4, 16.0);
}

TEST(ExactMoments, UncenteredOrBadBetaRejected) {
  const DiscreteDistribution<> d{{0.0, 0.5}, {2.0, 0.5}};
  EXPECT_THROW(exact_moments(d, 1.0), std::domain_error);
  const DiscreteDistribution<> c{{-1.0, 0.5}, {1.0, 0.5}};
  EXPECT_THROW(exact_moments(c, 2.0), std::invalid_argument);
  EXPECT_THROW(exact_moments(c, -0.1), std::invalid_argument);
}

TEST(ExactMoments, ZeroToTheZeroIsOne) {
  const auto m = exact_moments(kThreeAtom, 0.0);
  EXPECT_DOUBLE_EQ(m.abs_beta, 1.0);
}

TEST(ExactMoments, MatchesDirectPowerSums) {
  RandomStream rng(StreamId{3, 0});
  for (int t = 0; t < 50; ++t) {
    const auto d = random_law(rng);
    const real b = 1.9 * rng.uniform();
    const auto m = exact_moments(d, b);
    EXPECT_NEAR(m.m2, raw_moment(d, 2, false), 1e-12 * m.m2);
    EXPECT_NEAR(m.m3, raw_moment(d, 3, false), 1e-11 * std::pow(m.m2, 1.5));
    EXPECT_NEAR(m.m4, raw_moment(d, 4, false), 1e-12 * m.m4);
    EXPECT_NEAR(m.abs1, raw_moment(d, 1, true), 1e-12 * m.abs1);
    EXPECT_NEAR(m.abs_beta, raw_moment(d, b, true), 1e-12 * m.abs_beta);
    EXPECT_LE(m.abs1, std::sqrt(m.m2) * (1 + 1e-12));
    EXPECT_GE(m.m4, m.m2 * m.m2 * (1 - 1e-12));
  }
}

TEST(Bernoulli, ZeroIsFairCoin) {
  const auto d = bernoulli_distribution(0.0);
  EXPECT_DOUBLE_EQ(d.values()(0), 1.0);
  EXPECT_DOUBLE_EQ(d.values()(1), -1.0);
  EXPECT_DOUBLE_EQ(d.weights()(0), 0.5);
}

TEST(Bernoulli, CenteredUnitVarianceEverywhere) {
  for (real x = -5.0; x <= 5.0; x += 0.25) {
    const auto d = bernoulli_distribution(x);
    EXPECT_NEAR(d.mean(), 0.0, 1e-12);
    EXPECT_NEAR(raw_moment(d, 2, false), 1.0, 1e-12);
  }
}

TEST(Bernoulli, ClosedFormMomentsAtOne) {
  const auto m = exact_moments(bernoulli_distribution(1.0), 0.5);
  EXPECT_NEAR(m.m3, 2.0 * std::sinh(1.0), 1e-12);
  EXPECT_NEAR(m.m3, 2.3504, 1e-4);
  EXPECT_NEAR(m.m4, 4.0 * std::sinh(1.0) * std::sinh(1.0) + 1.0, 1e-12);
  EXPECT_NEAR(pearson_gap(m), 1.0, 1e-12);
}

TEST(Pearson, KnownLaws) {
  EXPECT_NEAR(pearson_gap(exact_moments(DiscreteDistribution<>{{-1.0, 0.5}, {1.0, 0.5}}, 1.0)), 1.0,
              1e-15);
  EXPECT_DOUBLE_EQ(pearson_gap(gaussian()), 3.0);
  const MomentSet<> uniform{1.0 / 3.0, 0.0, 1.0 / 5.0, 0.5, 0.5, 1.0};
  EXPECT_NEAR(pearson_gap(uniform), 1.8, 1e-14);
  EXPECT_THROW(pearson_gap(MomentSet<>{0.0, 0.0, 1.0, 1.0, 1.0, 1.0}), std::domain_error);
}

TEST(Fukasawa, BernoulliEquality) {
  for (const real x : {0.0, 0.5, -0.5, 2.0, -2.0}) {
    EXPECT_NEAR(fukasawa_gap(exact_moments(bernoulli_distribution(x), 1.0)), 0.0, 1e-12) << x;
  }
}

TEST(Fukasawa, GaussianAndThreeAtom) {
  EXPECT_NEAR(fukasawa_gap(gaussian()), 3.0 - std::numbers::pi / 2.0, 1e-14);
  // symmetric {-1, 0, 1}: m4/m2^2 = m2/(E|X|)^2 = 2, another equality case
  EXPECT_NEAR(fukasawa_gap(exact_moments(kThreeAtom, 1.0)), 0.0, 1e-14);
  // {-2, 1/2, 1} with weights 1/4, 1/2, 1/4: m2 = 1.375, m3 = -1.6875, m4 = 4.28125, E|X| = 1
  const DiscreteDistribution<> skew{{-2.0, 0.25}, {0.5, 0.5}, {1.0, 0.25}};
  const real by_hand = 4.28125 / (1.375 * 1.375) - 0.75 * 1.6875 * 1.6875 / std::pow(1.375, 3) - 1.375;
  EXPECT_NEAR(fukasawa_gap(exact_moments(skew, 1.0)), by_hand, 1e-13);
  EXPECT_GT(by_hand, 0.05);
  EXPECT_THROW(fukasawa_gap(MomentSet<>{1.0, 0.0, 1.0, 0.0, 1.0, 1.0}), std::domain_error);
}

TEST(KS1, EqualityOnlyForSymmetricBernoulli) {
  EXPECT_NEAR(ks1_margin(exact_moments(bernoulli_distribution(0.0), 0.5)), 0.0, 1e-12);
  EXPECT_GT(ks1_margin(exact_moments(bernoulli_distribution(1.0), 0.5)), 1e-6);
  EXPECT_GT(ks1_margin(exact_moments(kThreeAtom, 0.0)), 1e-6);
  EXPECT_THROW(ks1_margin(exact_moments(kThreeAtom, 1.0)), std::invalid_argument);
}

TEST(KS20, SymmetricBernoulliIsZero) {
  const auto d = bernoulli_distribution(0.0);
  for (const real b : {0.0, 0.5, 1.0, 1.5, 1.9}) {
    for (const real a : {0.0, 0.3, 0.5, 1.0}) {
      EXPECT_NEAR(ks20_margin(exact_moments(d, b), a), 0.0, 1e-12);
    }
  }
}

TEST(KS20, AlphaZeroIsHolderStep) {
  const auto m = exact_moments(kThreeAtom, 1.5);
  const real holder = std::pow(m.m2, 1.5 / 0.5) / std::pow(m.abs_beta, 2.0 / 0.5);
  EXPECT_NEAR(ks20_margin(m, 0.0), m.m4 / (m.m2 * m.m2) - holder, 1e-14);
  EXPECT_GE(ks20_margin(m, 0.0), 0.0);
}

TEST(KS20, GaussianAlphaOne) {
  EXPECT_NEAR(ks20_margin(gaussian(1.0), 1.0), 2.0, 1e-14);
  EXPECT_THROW(ks20_margin(gaussian(1.0), 1.5), std::invalid_argument);
}

// At alpha = 1 the margin is pearson_gap - 1, zero for every two-point law,
// so asymmetric Bernoulli laws are equality cases there too.
TEST(KS20, AsymmetricBernoulliPositiveBelowAlphaOne) {
  const auto m = exact_moments(bernoulli_distribution(1.0), 1.5);
  EXPECT_GT(ks20_margin(m, 0.5), 1e-6);
  EXPECT_NEAR(ks20_margin(m, 1.0), 0.0, 1e-12);
}

TEST(Properties, RandomLawsSatisfyAllInequalities) {
  RandomStream rng(StreamId{17, 0});
  for (int t = 0; t < 1000; ++t) {
    const auto d = random_law(rng);
    const auto m1 = exact_moments(d, 0.999 * rng.uniform());
    EXPECT_GE(pearson_gap(m1), 1.0 - 1e-10);
    EXPECT_GE(fukasawa_gap(m1), -1e-10);
    EXPECT_GE(ks1_margin(m1), -1e-10);
    const auto m2 = exact_moments(d, 1.999 * rng.uniform());
    EXPECT_GE(ks20_margin(m2, rng.uniform()), -1e-10);
  }
}

// Extended precision: in double the terms near |x| = 5 cancel from ~2e4.
TEST(Properties, BernoulliGridEqualities) {
  for (int i = -50; i <= 50; ++i) {
    const long double x = 0.1L * i;
    const auto m = exact_moments(bernoulli_distribution(x), 0.5L);
    EXPECT_NEAR(static_cast<double>(pearson_gap(m)), 1.0, 1e-12) << i;
    EXPECT_NEAR(static_cast<double>(fukasawa_gap(m)), 0.0, 1e-12) << i;
    if (i == 0) {
      EXPECT_NEAR(static_cast<double>(ks1_margin(m)), 0.0, 1e-12);
    } else {
      EXPECT_GT(static_cast<double>(ks1_margin(m)), 1e-12) << i;
    }
  }
}

TEST(Properties, BernoulliGridDoubleWithinConditioning) {
  for (int i = -50; i <= 50; ++i) {
    const auto m = exact_moments(bernoulli_distribution(0.1 * i), 0.5);
    // relative to the size of the cancelling terms
    const real scale = m.m4 / (m.m2 * m.m2);
    EXPECT_NEAR(pearson_gap(m), 1.0, 1e-14 * scale) << i;
  }
}

TEST(Properties, ScaleInvariance) {
  RandomStream rng(StreamId{19, 0});
  for (int t = 0; t < 100; ++t) {
    const auto d = random_law(rng);
    const real c = 0.1 + 10.0 * rng.uniform();
    const auto a = exact_moments(d, 0.7);
    const auto b = exact_moments(d.scaled(c), 0.7);
    EXPECT_NEAR(pearson_gap(a), pearson_gap(b), 1e-10);
    EXPECT_NEAR(fukasawa_gap(a), fukasawa_gap(b), 1e-10);
    EXPECT_NEAR(ks1_margin(a), ks1_margin(b), 1e-10);
    EXPECT_NEAR(ks20_margin(a, 0.4), ks20_margin(b, 0.4), 1e-10);
  }
}

TEST(BernoulliRatio, MatchesMomentSide) {
  for (const real x : {-3.0, -1.0, 0.3, 2.0, 4.0}) {
    for (const real a : {0.1, 2.0 / 3.0, 1.0}) {
      for (const real b : {0.0, 0.5, 1.0, 1.5, 1.9}) {
        const auto d = bernoulli_distribution(x);
        const real m2 = raw_moment(d, 2, false), m3 = raw_moment(d, 3, false);
        const real m4 = raw_moment(d, 4, false), mb = raw_moment(d, b, true);
        const real lhs = std::pow(mb, 2.0 / (2.0 - b)) / std::pow(m2, b / (2.0 - b)) *
                         (m4 / (m2 * m2) - a * m3 * m3 / (m2 * m2 * m2));
        EXPECT_NEAR(bernoulli_ratio(x, a, b), lhs, 1e-10 * std::max(1.0, lhs));
        EXPECT_GT(bernoulli_ratio(x, a, b), 1.0 - a - 1e-12);
      }
    }
  }
}

TEST(BernoulliRatio, Limits) {
  for (const real a : {0.2, 1.0}) {
    for (const real b : {0.0, 1.5}) EXPECT_NEAR(bernoulli_ratio(0.0, a, b), 1.0, 1e-15);
  }
  EXPECT_NEAR(bernoulli_ratio(40.0, 0.5, 1.5), 0.5, 1e-6);
  EXPECT_THROW(bernoulli_ratio(1.0, 0.0, 1.0), std::invalid_argument);
}

TEST(GFunction, ValueAtZeroAndLimit) {
  for (const real b : {0.0, 0.5, 1.5, 1.9}) EXPECT_EQ(g(0.0, b), 1.0);
  EXPECT_NEAR(std::pow(g(30.0, 1.5), -4.0), 4.0, 1e-6);
}

TEST(GFunction, SecondDerivativeAtZero) {
  for (const real b : {0.0, 0.5, 1.5, 1.9}) {
    const real h = 1e-3;
    const real d2 = (g(h, b) - 2.0 * g(0.0, b) + g(-h, b)) / (h * h);
    EXPECT_NEAR(d2, (1.0 - b) * (2.0 - b), 1e-4) << b;
  }
}

TEST(EfficiencyFactor, Values) {
  EXPECT_EQ(efficiency_factor(0.0, 1.5), 1.0);
  EXPECT_NEAR(efficiency_factor(20.0, 1.5), 1.0 / 3.0, 1e-6);
  EXPECT_NEAR(efficiency_factor(3.0, 1.5), 0.40185, 1e-5);
  EXPECT_NEAR(efficiency_factor(1e4, 1.5), 1.0 / 3.0, 1e-12);
  EXPECT_THROW(efficiency_factor(1.0, 2.0), std::domain_error);
}

TEST(EfficiencyFactor, EqualsBernoulliRatioTwoThirds) {
  for (int i = 0; i < 50; ++i) {
    const real x = -6.0 + 12.0 * i / 49.0;
    for (const real b : {0.0, 0.7, 1.1, 1.5, 1.9}) {
      EXPECT_NEAR(efficiency_factor(x, b), bernoulli_ratio(x, 2.0 / 3.0, b), 1e-10);
    }
  }
}

TEST(Templates, LongDoubleInstantiation) {
  const auto d = bernoulli_distribution<long double>(1.0L);
  const auto m = exact_moments(d, 0.5L);
  EXPECT_NEAR(static_cast<double>(pearson_gap(m)), 1.0, 1e-15);
  EXPECT_NEAR(static_cast<double>(fukasawa_gap(m)), 0.0, 1e-15);
  EXPECT_NEAR(static_cast<double>(efficiency_factor(3.0L, 1.5L)), efficiency_factor(3.0, 1.5), 1e-14);
}
