#pragma once

// Independent reference computations used only by tests. None of these call
// into the library's closed forms.

#include <boost/math/tools/roots.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "stodom/params.hpp"

namespace oracle {

using Big = boost::multiprecision::cpp_bin_float_50;

struct BigCD {
  Big c;
  Big d;
  Big p_max;
};

/// C, D and p_max re-evaluated from the printed formulas at 50 digits.
inline BigCD cd_50_digits(const stodom::Params& q) {
  const Big a0(q.alpha0), a1(q.alpha1), g(q.gamma), p(q.p);
  const Big c = (1 - a0 - a1) - g * (1 - a0 - (1 - p) * (a1 - a0));
  const Big d = a0 * a1 + g * (a1 * (1 - a0) - (1 - p) * (a1 - a0));
  Big disc = (1 - c) * (1 - c) - 4 * d;
  if (disc < 0) disc = 0;
  return {c, d, (1 - c - boost::multiprecision::sqrt(disc)) / 2};
}

/// Smaller root of x^2 - (a0 + a1 + g) x + a0 a1 + g (a0 + p (a1 - a0)) by
/// TOMS 748 on [alpha0, vertex], where the quadratic changes sign.
inline double lambda_bar_root(const stodom::Params& q) {
  const long double b = static_cast<long double>(q.alpha0) + q.alpha1 + q.gamma;
  const long double c = static_cast<long double>(q.alpha0) * q.alpha1 +
                        static_cast<long double>(q.gamma) * (q.alpha0 + q.p * (q.alpha1 - q.alpha0));
  auto f = [&](long double x) { return x * x - b * x + c; };
  const long double lo = q.alpha0;
  const long double hi = b / 2;
  if (f(lo) <= 0) return static_cast<double>(lo);
  if (f(hi) >= 0) return static_cast<double>(hi);
  std::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<long double>(60),
                                                   iters);
  return static_cast<double>((r.first + r.second) / 2);
}

/// P(no arrival on [0, T]) by RK4 on d/dt v = (Q^T - diag(a0, a1)) v with
/// v(0) = (1 - pi1, pi1).
inline double zero_arrival_rk4(const stodom::Params& q, double T, double pi1, int steps = 20000) {
  const double up = q.gamma * q.p;
  const double down = q.gamma * (1 - q.p);
  auto deriv = [&](double v0, double v1) {
    return std::pair{-(up + q.alpha0) * v0 + down * v1, up * v0 - (down + q.alpha1) * v1};
  };
  double v0 = 1 - pi1, v1 = pi1;
  const double h = T / steps;
  for (int k = 0; k < steps; ++k) {
    const auto [a0, a1] = deriv(v0, v1);
    const auto [b0, b1] = deriv(v0 + h / 2 * a0, v1 + h / 2 * a1);
    const auto [c0, c1] = deriv(v0 + h / 2 * b0, v1 + h / 2 * b1);
    const auto [d0, d1] = deriv(v0 + h * c0, v1 + h * c1);
    v0 += h / 6 * (a0 + 2 * b0 + 2 * c0 + d0);
    v1 += h / 6 * (a1 + 2 * b1 + 2 * c1 + d1);
  }
  return v0 + v1;
}

/// Conditional arrival intensity at T given no arrival on [0, T], by
/// differentiating the RK4 zero-arrival probability: -d/dT log P.
inline double conditional_intensity_rk4(const stodom::Params& q, double T) {
  const double h = 1e-5 * std::max(T, 1e-3);
  const double lp = std::log(zero_arrival_rk4(q, T + h, q.p));
  const double lm = std::log(zero_arrival_rk4(q, T - h, q.p));
  return -(lp - lm) / (2 * h);
}

/// Two-variable law with P(1,1) = P(0,0) = 1/2, indexed by bitmask.
inline std::vector<double> diagonal_law() { return {0.5, 0.0, 0.0, 0.5}; }

/// XOR-like law on two sites: P(1,0) = P(0,1) = 0.4, P(0,0) = P(1,1) = 0.1.
inline std::vector<double> xor_law() { return {0.1, 0.4, 0.4, 0.1}; }

/// Largest density of an i.i.d. law dominated by a law on {0,1}^w, by
/// bisection on the up-set inequalities pi_q(U) <= mu(U) over every up-set U.
/// Exponential in 2^w, intended for w <= 2.
inline double p_max_by_upsets(const std::vector<double>& law, std::size_t window) {
  const std::size_t states = std::size_t{1} << window;
  std::vector<std::vector<std::size_t>> upsets;
  for (std::uint64_t set = 0; set < (std::uint64_t{1} << states); ++set) {
    bool up = true;
    for (std::size_t a = 0; a < states && up; ++a) {
      if (!((set >> a) & 1)) continue;
      for (std::size_t b = 0; b < states; ++b) {
        if ((a & b) == a && !((set >> b) & 1)) up = false;
      }
    }
    if (!up) continue;
    std::vector<std::size_t> members;
    for (std::size_t a = 0; a < states; ++a) {
      if ((set >> a) & 1) members.push_back(a);
    }
    upsets.push_back(members);
  }
  auto dominated = [&](double d) {
    for (const auto& u : upsets) {
      double pq = 0.0, pm = 0.0;
      for (const std::size_t a : u) {
        const int ones = __builtin_popcountll(a);
        pq += std::pow(d, ones) * std::pow(1 - d, static_cast<double>(window) - ones);
        pm += law[a];
      }
      if (pq > pm + 1e-15) return false;
    }
    return true;
  };
  double lo = 0.0, hi = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (dominated(mid) ? lo : hi) = mid;
  }
  return lo;
}

/// Random discrete-valid parameters with 0 < alpha0 < alpha1 < 1.
inline stodom::Params random_discrete(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = u(rng), b = u(rng);
  if (a > b) std::swap(a, b);
  return {a, b, u(rng), u(rng)};
}

/// Random continuous-valid parameters with rates up to `scale`.
inline stodom::Params random_continuous(std::mt19937_64& rng, double scale = 5.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double a = scale * u(rng), b = scale * u(rng);
  if (a > b) std::swap(a, b);
  return {a, b, scale * u(rng) + 1e-3, u(rng)};
}

}  // namespace oracle
