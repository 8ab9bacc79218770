#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "oracles.hpp"
#include "stodom/analytic.hpp"
#include "stodom/mmpp.hpp"
#include "stodom/rng.hpp"
#include "stodom/stats.hpp"

using namespace stodom;

namespace {

const Params kRef{1, 2, 1, 0.5};

std::vector<double> gaps(const std::vector<double>& t) {
  std::vector<double> g;
  double last = 0;
  for (double x : t) {
    g.push_back(x - last);
    last = x;
  }
  return g;
}

}  // namespace

TEST(Simulate, PathInvariants) {
  const auto path = mmpp::simulate(kRef, 200.0, 3);
  ASSERT_FALSE(path.background.empty());
  EXPECT_DOUBLE_EQ(path.background.front().start, 0.0);
  EXPECT_DOUBLE_EQ(path.background.back().end, 200.0);
  for (std::size_t i = 1; i < path.background.size(); ++i) {
    EXPECT_DOUBLE_EQ(path.background[i].start, path.background[i - 1].end);
    EXPECT_NE(path.background[i].state, path.background[i - 1].state);
  }
  for (std::size_t i = 1; i < path.arrivals.size(); ++i) EXPECT_LT(path.arrivals[i - 1], path.arrivals[i]);
  EXPECT_GT(path.arrivals.front(), 0.0);
  EXPECT_LE(path.arrivals.back(), 200.0);
  EXPECT_THROW(mmpp::simulate(kRef, 0.0, 1), ValidationError);
}

TEST(Simulate, EqualRatesGivePoissonCounts) {
  const Params q{1.5, 1.5, 2.0, 0.3};
  const int reps = 100000;
  const double T = 2.0;
  double s = 0, s2 = 0;
  for (int i = 0; i < reps; ++i) {
    const double n = static_cast<double>(mmpp::simulate(q, T, derive_seed(5, i)).arrivals.size());
    s += n;
    s2 += n * n;
  }
  const double mean = s / reps;
  const double var = s2 / reps - mean * mean;
  const double mu = q.alpha0 * T;
  EXPECT_NEAR(mean, mu, 3 * std::sqrt(mu / reps));
  // Var of the sample variance of a Poisson(mu) is about (mu + 2 mu^2) / reps.
  EXPECT_NEAR(var, mu, 3 * std::sqrt((mu + 2 * mu * mu) / reps));
}

TEST(Simulate, FrozenBackgroundIsMixtureOfPoissons) {
  const Params q{0.5, 3.0, 1e-6, 0.3};
  const int reps = 20000;
  int high = 0;
  for (int i = 0; i < reps; ++i) {
    const auto path = mmpp::simulate(q, 1.0, derive_seed(7, i));
    ASSERT_EQ(path.background.size(), 1u);
    high += path.background.front().state;
  }
  EXPECT_NEAR(high / double(reps), 0.3, 3 * std::sqrt(0.21 / reps));
}

TEST(Simulate, EmptyWindowFrequencyMatchesClosedForm) {
  const int reps = 200000;
  int empty = 0;
  Rng rng(11);
  for (int i = 0; i < reps; ++i) empty += mmpp::first_arrival(kRef, rng) > 1.0;
  const double z = analytic::zero_arrival_prob(kRef, 1.0);
  EXPECT_NEAR(empty / double(reps), z, 3 * std::sqrt(z * (1 - z) / reps));
}

TEST(Simulate, FirstArrivalAgreesWithFullPath) {
  const int reps = 20000;
  std::vector<double> a, b;
  Rng rng(13);
  for (int i = 0; i < reps; ++i) {
    a.push_back(mmpp::first_arrival(kRef, rng));
    const auto path = mmpp::simulate(kRef, 50.0, derive_seed(14, i));
    b.push_back(path.arrivals.empty() ? 50.0 : path.arrivals.front());
  }
  EXPECT_GT(stats::ks_two_sample(a, b).p_value, 0.001);
}

TEST(Filter, EqualRatesRelaxAtGamma) {
  const Params q{1.0, 1.0, 2.0, 0.3};
  const auto s = mmpp::filter_evolve({0.0, 0.9}, 0.5, false, q);
  EXPECT_NEAR(s.pi, 0.3 + 0.6 * std::exp(-1.0), 1e-12);
  const auto j = mmpp::filter_evolve(s, 0.0, true, q);
  EXPECT_NEAR(j.pi, s.pi, 1e-15);
}

TEST(Filter, NoArrivalFixedPointIsLambdaBar) {
  std::mt19937_64 rng(79);
  for (int i = 0; i < 100; ++i) {
    const Params q = oracle::random_continuous(rng);
    const auto s = mmpp::filter_evolve(mmpp::initial_filter(q), 1e4, false, q);
    EXPECT_NEAR(mmpp::intensity(s, q), analytic::lambda_bar(q), 1e-10) << to_string(q);
  }
}

TEST(Filter, NoArrivalIntensityDecreasesToLambdaBar) {
  auto s = mmpp::initial_filter(kRef);
  double prev = mmpp::intensity(s, kRef);
  const double lb = analytic::lambda_bar(kRef);
  for (int k = 0; k < 400; ++k) {
    s = mmpp::filter_evolve(s, 0.05, false, kRef);
    const double v = mmpp::intensity(s, kRef);
    EXPECT_LE(v, prev + 1e-15);
    EXPECT_GE(v, lb - 1e-12);
    prev = v;
  }
}

TEST(Filter, NoArrivalIntensityMatchesExactLimit) {
  for (double T : {0.5, 1.0, 2.0}) {
    const auto s = mmpp::filter_evolve(mmpp::initial_filter(kRef), T, false, kRef);
    EXPECT_NEAR(mmpp::intensity(s, kRef), analytic::exact_mA_limit(kRef, T), 1e-12);
  }
}

TEST(Filter, ExactMatchesRk4AndStepHalving) {
  const auto path = mmpp::simulate(kRef, 30.0, 17);
  auto exact = mmpp::initial_filter(kRef);
  auto coarse = exact;
  auto fine = exact;
  const double h = mmpp::rk4_step(kRef);
  double t = 0;
  for (double a : path.arrivals) {
    exact = mmpp::filter_evolve(exact, a - t, true, kRef);
    coarse = mmpp::filter_evolve_rk4(coarse, a - t, true, kRef, h);
    fine = mmpp::filter_evolve_rk4(fine, a - t, true, kRef, h / 2);
    EXPECT_NEAR(coarse.pi, fine.pi, 1e-9);
    EXPECT_NEAR(exact.pi, fine.pi, 1e-9);
    t = a;
  }
}

TEST(Filter, IntensityNeverBelowLambdaBarAlongPaths) {
  std::mt19937_64 rng(83);
  for (int i = 0; i < 50; ++i) {
    const Params q = oracle::random_continuous(rng);
    const double lb = analytic::lambda_bar(q);
    const auto path = mmpp::simulate(q, 20.0, derive_seed(19, i));
    auto s = mmpp::initial_filter(q);
    double t = 0;
    for (double a : path.arrivals) {
      s = mmpp::filter_evolve(s, a - t, false, q);
      ASSERT_GE(mmpp::intensity(s, q), lb - 1e-9) << to_string(q);
      s = mmpp::filter_evolve(s, 0.0, true, q);
      t = a;
    }
  }
}

TEST(CoupleBelow, TrivialCases) {
  const auto z = mmpp::couple_below(kRef, 0.0, 100.0, 1);
  EXPECT_TRUE(z.lower.arrivals.empty());
  const Params q{1.2, 1.2, 1.0, 0.4};
  const auto e = mmpp::couple_below(q, 1.2, 100.0, 1);
  EXPECT_EQ(e.lower.arrivals, e.upper.arrivals);
}

TEST(CoupleBelow, RefusesRateAboveLambdaBar) {
  EXPECT_THROW(mmpp::couple_below(kRef, analytic::lambda_bar(kRef) + 0.01, 10.0, 1), ThresholdViolation);
  // Above min(alpha1, alpha0 + gamma) no p could help.
  const Params q{0.2, 3.0, 1.0, 0.99};
  EXPECT_THROW(mmpp::couple_below(q, 1.25, 10.0, 1), ThresholdViolation);
  mmpp::BelowOptions low;
  low.init = mmpp::InitialBackground::low;
  EXPECT_THROW(mmpp::couple_below(kRef, 1.0, 10.0, 1, low), ValidationError);
}

TEST(CoupleBelow, LowerIsPoissonAtLambdaBar) {
  const double lb = analytic::lambda_bar(kRef);
  const auto c = mmpp::couple_below(kRef, lb, 1e5 / lb, 23);
  ASSERT_TRUE(mmpp::is_subset(c.lower.arrivals, c.upper.arrivals));
  EXPECT_GE(c.lower.arrivals.size(), 90000u);
  EXPECT_GT(stats::ks_exponential(gaps(c.lower.arrivals), lb).p_value, 0.01);
}

TEST(CoupleBelow, UpperCountsMatchDirectSimulation) {
  const double lb = analytic::lambda_bar(kRef);
  std::vector<double> hc(12, 0), hd(12, 0);
  for (int i = 0; i < 20000; ++i) {
    const auto c = mmpp::couple_below(kRef, lb, 2.0, derive_seed(29, i));
    const auto d = mmpp::simulate(kRef, 2.0, derive_seed(31, i));
    hc[std::min<std::size_t>(c.upper.arrivals.size(), 11)] += 1;
    hd[std::min<std::size_t>(d.arrivals.size(), 11)] += 1;
  }
  EXPECT_GT(stats::chi_square_homogeneity(hc, hd).p_value, 0.001);
}

TEST(CoupleBelow, OtherMethodsKeepSubset) {
  const double lb = analytic::lambda_bar(kRef);
  mmpp::BelowOptions ogata;
  ogata.method = mmpp::BelowMethod::ogata;
  const auto a = mmpp::couple_below(kRef, lb, 2e4, 37, ogata);
  EXPECT_TRUE(mmpp::is_subset(a.lower.arrivals, a.upper.arrivals));
  EXPECT_GT(stats::ks_exponential(gaps(a.lower.arrivals), lb).p_value, 0.001);

  mmpp::BelowOptions rk4;
  rk4.filter = mmpp::FilterMethod::rk4;
  const auto b = mmpp::couple_below(kRef, lb, 2e3, 41, rk4);
  EXPECT_TRUE(mmpp::is_subset(b.lower.arrivals, b.upper.arrivals));

  mmpp::BelowOptions disc;
  disc.method = mmpp::BelowMethod::discretized;
  disc.m = 400;
  const double lam = 400 * analytic::p_max(discretized(kRef, 400.0));
  const auto d = mmpp::couple_below(kRef, lam, 100.0, 43, disc);
  EXPECT_TRUE(mmpp::is_subset(d.lower.arrivals, d.upper.arrivals));
}

TEST(CoupleBelow, HighInitialBackgroundAccepted) {
  mmpp::BelowOptions high;
  high.init = mmpp::InitialBackground::high;
  const auto c = mmpp::couple_below(kRef, analytic::lambda_bar(kRef), 100.0, 47, high);
  EXPECT_EQ(c.upper.background.front().state, 1);
  EXPECT_TRUE(mmpp::is_subset(c.lower.arrivals, c.upper.arrivals));
}

TEST(CoupleAbove, EqualRatesAddNothing) {
  const auto c = mmpp::couple_above(Params{1.0, 1.0, 1.0, 0.5}, 100.0, 3);
  EXPECT_EQ(c.upper.arrivals, c.lower.arrivals);
}

TEST(CoupleAbove, UpperIsPoissonTopRate) {
  const double T = 1000.0;
  const auto c = mmpp::couple_above(kRef, T, 53);
  EXPECT_TRUE(mmpp::is_subset(c.lower.arrivals, c.upper.arrivals));
  const double n = static_cast<double>(c.upper.arrivals.size());
  EXPECT_NEAR(n, kRef.alpha1 * T, 3 * std::sqrt(kRef.alpha1 * T));
  EXPECT_GT(stats::ks_exponential(gaps(c.upper.arrivals), kRef.alpha1).p_value, 0.001);
}

TEST(CoupleAbove, ExtraFractionVanishesWhenBackgroundStaysHigh) {
  const Params q{1.0, 2.0, 1e3, 1.0};
  const auto c = mmpp::couple_above(q, 100.0, 59);
  EXPECT_LE(c.upper.arrivals.size() - c.lower.arrivals.size(), 5u);
}

TEST(Subset, Helper) {
  EXPECT_TRUE(mmpp::is_subset({1.0, 3.0}, {1.0, 2.0, 3.0}));
  EXPECT_FALSE(mmpp::is_subset({1.5}, {1.0, 2.0}));
  mmpp::CoupledPaths bad;
  bad.lower.arrivals = {1.5};
  bad.upper.arrivals = {1.0};
  EXPECT_THROW(mmpp::check_subset(bad), AssertionFailure);
}

TEST(Bridge, EqualRatesExact) {
  EXPECT_NEAR(mmpp::discretize_bridge(Params{1.3, 1.3, 1.0, 0.5}, 100, 2.0), 1.3, 1e-12);
}

TEST(Bridge, FirstOrderConvergence) {
  const double exact = analytic::exact_mA_limit(kRef, 1.0);
  const double e200 = mmpp::discretize_bridge(kRef, 200, 1.0) - exact;
  const double e400 = mmpp::discretize_bridge(kRef, 400, 1.0) - exact;
  const double e800 = mmpp::discretize_bridge(kRef, 800, 1.0) - exact;
  EXPECT_NEAR(e200 / e400, 2.0, 0.3);
  EXPECT_NEAR(e400 / e800, 2.0, 0.3);
  // Within C / m with C fitted at m = 200.
  EXPECT_LE(std::abs(e800), std::abs(e200) * 200 / 800 * 1.1);
}

TEST(Bridge, LongHorizonReachesScaledThreshold) {
  const double v = mmpp::discretize_bridge(kRef, 400, 100.0);
  EXPECT_NEAR(v, 400 * analytic::p_max(discretized(kRef, 400.0)), 1e-3);
  EXPECT_NEAR(v, analytic::lambda_bar(kRef), 1e-3);
}

TEST(Bridge, StepCountAndPreconditions) {
  EXPECT_EQ(mmpp::bridge_steps(1.0, 400), 400);
  EXPECT_EQ(mmpp::bridge_steps(0.1, 30), 3);
  EXPECT_EQ(mmpp::bridge_steps(0.101, 30), 4);
  EXPECT_THROW(mmpp::discretize_bridge(kRef, 1, 1.0), ValidationError);
}

TEST(EmpiricalLambdaMax, BracketAndLimits) {
  const auto e = mmpp::empirical_lambda_max_T(kRef, 1.0);
  EXPECT_LE(e.lower_T, e.exact_mA_limit);
  EXPECT_LE(e.exact_mA_limit, e.upper_T);
  EXPECT_NEAR(mmpp::empirical_lambda_max_T(kRef, 1e-9).exact_mA_limit, mean_rate(kRef), 1e-6);
  EXPECT_NEAR(mmpp::empirical_lambda_max_T(kRef, 1e3).exact_mA_limit, analytic::lambda_bar(kRef), 1e-6);
}

TEST(EventsCsv, Format) {
  mmpp::ArrivalPath p;
  p.horizon = 2;
  p.arrivals = {0.5, 1.25};
  p.background = {{0, 1, 0}, {1, 2, 1}};
  std::ostringstream os;
  mmpp::write_events_csv(os, p);
  EXPECT_EQ(os.str(), "t,kind\n0.500000000,arrival\n1.000000000,bg_up\n1.250000000,arrival\n");
}
