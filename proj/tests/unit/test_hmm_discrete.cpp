#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "stodom/analytic.hpp"
#include "stodom/hmm_discrete.hpp"
#include "stodom/stats.hpp"

using namespace stodom;

namespace {

/// A_n obtained by running the forward filter on n - 1 zeros.
double a_n_filter(const Params& q, std::size_t n) {
  auto s = hmm::initial_filter(q);
  for (std::size_t k = 1; k < n; ++k) s = hmm::filter_step(s, 0, q);
  return hmm::predictive_one(s, q);
}

double mean(const hmm::Bits& b) {
  double s = 0;
  for (auto v : b) s += v;
  return s / static_cast<double>(b.size());
}

}  // namespace

TEST(SimulateChain, FrozenBackgroundWithoutUpdates) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto c = hmm::simulate_chain(Params{0.1, 0.3, 0.0, 0.5}, 500, seed);
    for (auto b : c.b) EXPECT_EQ(b, c.b.front());
  }
}

TEST(SimulateChain, FullBackgroundIsIidTopRate) {
  const auto c = hmm::simulate_chain(Params{0.1, 0.3, 0.4, 1.0}, 100000, 5);
  for (auto b : c.b) EXPECT_EQ(b, 1);
  EXPECT_NEAR(mean(c.x), 0.3, 3 * std::sqrt(0.3 * 0.7 / 1e5));
}

TEST(SimulateChain, ObservedMeanIsMeanRate) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  const auto c = hmm::simulate_chain(q, 1000000, 9);
  // X is correlated through B: Cov(X_0, X_k) = (a1 - a0)^2 p (1 - p) (1 - gamma)^k.
  const double m = mean_rate(q);
  const double cov = (q.alpha1 - q.alpha0) * (q.alpha1 - q.alpha0) * q.p * (1 - q.p);
  const double var = m * (1 - m) + 2 * cov * (1 - q.gamma) / q.gamma;
  EXPECT_NEAR(mean(c.x), m, 3 * std::sqrt(var / 1e6));
  EXPECT_NEAR(mean(c.b), q.p, 3 * std::sqrt(q.p * (1 - q.p) * (2 / q.gamma - 1) / 1e6));
}

TEST(SimulateChain, Reproducible) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  const auto a = hmm::simulate_chain(q, 1000, 42);
  const auto b = hmm::simulate_chain(q, 1000, 42);
  EXPECT_EQ(a.x, b.x);
  EXPECT_EQ(a.b, b.b);
  EXPECT_THROW(hmm::simulate_chain(q, 0, 1), ValidationError);
}

TEST(FilterStep, UninformativeObservationsConvergeToP) {
  const Params q{0.4, 0.4, 0.3, 0.7};
  hmm::FilterState s{1, 0.05};
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) s = hmm::filter_step(s, static_cast<int>(rng() & 1), q);
  EXPECT_NEAR(s.post1, 0.7, 1e-12);
}

TEST(FilterStep, PredictiveIsAffineInPosterior) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  const hmm::FilterState s{4, 0.37};
  EXPECT_DOUBLE_EQ(hmm::predictive_one(s, q), 0.1 + 0.2 * 0.37);
}

TEST(FilterStep, ZeroHistoryPosteriorMatchesRecursion) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  const auto a = hmm::a_n_recursion(q, 60);
  auto s = hmm::initial_filter(q);
  for (std::size_t n = 1; n <= 60; ++n) {
    EXPECT_NEAR(s.post1, (a[n - 1] - q.alpha0) / (q.alpha1 - q.alpha0), 1e-12);
    EXPECT_NEAR(hmm::predictive_one(s, q), a[n - 1], 1e-12);
    s = hmm::filter_step(s, 0, q);
  }
}

TEST(FilterStep, MatchesEnumerationOverAllPrefixes) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  for (std::size_t len = 0; len <= 11; ++len) {
    for (std::uint32_t mask = 0; mask < (1U << len); ++mask) {
      hmm::Bits prefix(len);
      auto s = hmm::initial_filter(q);
      for (std::size_t i = 0; i < len; ++i) {
        prefix[i] = (mask >> i) & 1U;
        s = hmm::filter_step(s, prefix[i], q);
      }
      ASSERT_NEAR(hmm::predictive_one(s, q), hmm::conditional_one_bruteforce(q, prefix), 1e-12);
    }
  }
}

TEST(FilterStep, AnyHistoryConditionalAtLeastZeroHistory) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 20; ++trial) {
    const Params q = oracle::random_discrete(rng);
    const auto a = hmm::a_n_recursion(q, 13);
    for (std::size_t len = 0; len <= 11; ++len) {
      for (std::uint32_t mask = 0; mask < (1U << len); ++mask) {
        auto s = hmm::initial_filter(q);
        for (std::size_t i = 0; i < len; ++i) s = hmm::filter_step(s, (mask >> i) & 1U, q);
        ASSERT_GE(hmm::predictive_one(s, q), a[len] - 1e-12) << to_string(q);
      }
    }
  }
}

TEST(ARecursion, TrivialCases) {
  for (double v : hmm::a_n_recursion(Params{0.25, 0.25, 0.4, 0.6}, 100)) EXPECT_NEAR(v, 0.25, 1e-15);
  for (double v : hmm::a_n_recursion(Params{0.1, 0.3, 1.0, 0.4}, 100)) EXPECT_NEAR(v, 0.18, 1e-15);
  const Params q{0.1, 0.3, 0.2, 0.5};
  EXPECT_DOUBLE_EQ(hmm::a_n_recursion(q, 1)[0], mean_rate(q));
  EXPECT_NEAR(hmm::a_n_bruteforce(q, 1), mean_rate(q), 1e-15);
  EXPECT_NEAR(hmm::a_n_bruteforce(Params{0.1, 0.3, 1.0, 0.4}, 2), 0.18, 1e-15);
}

TEST(ARecursion, MatchesEnumerationAndFilter) {
  std::mt19937_64 rng(67);
  for (int trial = 0; trial < 100; ++trial) {
    const Params q = oracle::random_discrete(rng);
    const auto a = hmm::a_n_recursion(q, 12);
    for (std::size_t n = 1; n <= 12; ++n) {
      EXPECT_NEAR(a[n - 1], hmm::a_n_bruteforce(q, n), 1e-12) << to_string(q) << " n=" << n;
      EXPECT_NEAR(a[n - 1], a_n_filter(q, n), 1e-12);
    }
  }
}

TEST(ARecursion, ReferenceValueAtTen) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  EXPECT_NEAR(hmm::a_n_recursion(q, 10).back(), hmm::a_n_bruteforce(q, 10), 1e-14);
}

TEST(ARecursion, NonincreasingOnRandomParams) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 100; ++trial) {
    const Params q = oracle::random_discrete(rng);
    const auto a = hmm::a_n_recursion(q, 1000);
    for (std::size_t k = 1; k < a.size(); ++k) ASSERT_LE(a[k], a[k - 1] + 1e-15) << to_string(q);
    EXPECT_NEAR(a.back(), analytic::p_max(q), 1e-8);
  }
}

TEST(ARecursion, StrictlyInsideUnitInterval) {
  const auto a = hmm::a_n_recursion(Params{0.1, 0.3, 0.2, 0.5}, 200);
  for (double v : a) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
}

TEST(ARecursion, GeometricConvergence) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  const auto a = hmm::a_n_recursion(q, 60);
  const double pm = analytic::p_max(q);
  const auto [c, d] = analytic::compute_cd(q);
  // Linearization of x -> (Cx + D) / (1 - x) at the fixed point.
  const double rate = (c + d) / ((1 - pm) * (1 - pm));
  EXPECT_NEAR((a[40] - pm) / (a[39] - pm), rate, 1e-6);
}

TEST(Bruteforce, RejectsLongPrefixes) {
  EXPECT_THROW(hmm::a_n_bruteforce(Params{0.1, 0.3, 0.2, 0.5}, 21), ValidationError);
}

TEST(CheckMonotone, ProductMeasureIsMonotone) {
  EXPECT_TRUE(hmm::check_monotone(Params{0.3, 0.3, 0.2, 0.5}, 5).monotone);
}

TEST(CheckMonotone, StronglyModulatedChainIsMonotone) {
  const auto r = hmm::check_monotone(Params{0.1, 0.9, 0.1, 0.5}, 4);
  EXPECT_TRUE(r.monotone);
  EXPECT_GT(r.comparisons, 0u);
}

TEST(CheckMonotone, RandomChainsAreMonotone) {
  std::mt19937_64 rng(73);
  for (int trial = 0; trial < 30; ++trial) {
    const Params q = oracle::random_discrete(rng);
    EXPECT_TRUE(hmm::check_monotone(q, 5).monotone) << to_string(q);
  }
}

TEST(CheckMonotone, RejectsXorLaw) {
  const auto r = hmm::check_monotone(oracle::xor_law(), 2);
  EXPECT_FALSE(r.monotone);
  EXPECT_GT(r.worst_violation, 0.5);
}

TEST(CheckMonotone, RejectsLargeWindow) {
  EXPECT_THROW(hmm::check_monotone(Params{0.1, 0.3, 0.2, 0.5}, 6), ValidationError);
}

TEST(CheckMonotone, SkipsZeroProbabilityConditioning) {
  // The second site is always 0, so conditioning on it being 1 has probability zero.
  const std::vector<double> law{0.5, 0.5, 0.0, 0.0};
  const auto r = hmm::check_monotone(law, 2);
  EXPECT_TRUE(r.monotone);
  EXPECT_GT(r.skipped, 0u);
}

TEST(Counterexample, PMaxPositiveWhileZeroHistoryConditionalVanishes) {
  // P(X = Y = 1) = P(X = Y = 0) = 1/2: P(X = 1 | Y = 0) = 0 yet an i.i.d.
  // law with density 1 - 1/sqrt(2) is dominated.
  const auto law = oracle::diagonal_law();
  const double conditional = law[1] / (law[0] + law[1]);
  EXPECT_EQ(conditional, 0.0);
  EXPECT_NEAR(oracle::p_max_by_upsets(law, 2), 1 - 1 / std::sqrt(2.0), 1e-12);
}

TEST(Counterexample, UpsetOracleAgreesWithClosedFormOnChain) {
  // For a two-step window the up-set bound is looser than the infinite
  // sequence threshold, never tighter.
  const Params q{0.1, 0.3, 0.2, 0.5};
  EXPECT_GE(oracle::p_max_by_upsets(hmm::joint_law_bruteforce(q, 2), 2), analytic::p_max(q) - 1e-12);
}

TEST(HmmCoupleBelow, TrivialCases) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  const auto z = hmm::couple_below(q, 0.0, 1000, 1);
  for (auto y : z.y) EXPECT_EQ(y, 0);
  const auto e = hmm::couple_below(Params{0.2, 0.2, 0.3, 0.5}, 0.2, 1000, 1);
  EXPECT_EQ(e.x, e.y);
}

TEST(HmmCoupleBelow, RefusesDensityAboveThreshold) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  EXPECT_THROW(hmm::couple_below(q, analytic::p_max(q) + 1e-6, 10, 1), ThresholdViolation);
}

TEST(HmmCoupleBelow, OrderingAndIidMarginal) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  const double pm = analytic::p_max(q);
  const std::size_t n = 100000;
  const auto c = hmm::couple_below(q, pm, n, 2024);
  double n00 = 0, n01 = 0, n10 = 0, n11 = 0;
  for (std::size_t k = 0; k < n; ++k) {
    ASSERT_LE(c.y[k], c.x[k]);
    if (k + 1 < n) {
      const int a = c.y[k], b = c.y[k + 1];
      (a ? (b ? n11 : n10) : (b ? n01 : n00)) += 1;
    }
  }
  EXPECT_NEAR(mean(c.y), pm, 3 * std::sqrt(pm * (1 - pm) / n));
  EXPECT_GT(stats::chi_square_independence_2x2(n00, n01, n10, n11).p_value, 0.01);
}

TEST(HmmCoupleBelow, HiddenSequenceHasChainLaw) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  const auto c = hmm::couple_below(q, analytic::p_max(q), 300000, 77);
  const auto d = hmm::simulate_chain(q, 300000, 78);
  // Histogram of the number of ones in disjoint blocks of 10.
  std::vector<double> hc(11, 0), hd(11, 0);
  for (std::size_t s = 0; s + 10 <= c.x.size(); s += 10) {
    int a = 0, b = 0;
    for (int i = 0; i < 10; ++i) {
      a += c.x[s + i];
      b += d.x[s + i];
    }
    hc[a] += 1;
    hd[b] += 1;
  }
  EXPECT_GT(stats::chi_square_homogeneity(hc, hd).p_value, 0.001);
}

TEST(HmmCoupleAbove, TrivialCases) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  const auto one = hmm::couple_above(q, 1.0, 1000, 1);
  for (auto y : one.y) EXPECT_EQ(y, 1);
  const auto e = hmm::couple_above(Params{0.2, 0.2, 0.3, 0.5}, 0.2, 1000, 1);
  EXPECT_EQ(e.x, e.y);
  EXPECT_THROW(hmm::couple_above(q, analytic::p_min(q) - 1e-6, 10, 1), ThresholdViolation);
}

TEST(HmmCoupleAbove, OrderingAndIidMarginal) {
  const Params q{0.1, 0.3, 0.2, 0.5};
  const double pm = analytic::p_min(q);
  const std::size_t n = 100000;
  const auto c = hmm::couple_above(q, pm, n, 99);
  for (std::size_t k = 0; k < n; ++k) ASSERT_LE(c.x[k], c.y[k]);
  EXPECT_NEAR(mean(c.y), pm, 3 * std::sqrt(pm * (1 - pm) / n));
}
