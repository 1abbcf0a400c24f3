#pragma once

// Random piecewise-linear test paths for the rate-function cases and an exact
// continuum evaluation of the rate integrals on them.

#include <cmath>
#include <vector>

#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "wdq/paths.hpp"
#include "wdq/ratefn.hpp"
#include "wdq/rng.hpp"

namespace wdq::testing {

// Knot values at equally spaced times; the path is linear between knots.
struct KnotPath {
  double horizon = 1;
  std::vector<double> knots;

  std::size_t segments() const { return knots.size() - 1; }

  // Sample onto a grid whose cells subdivide the knot segments evenly.
  PiecewiseLinearPath on_grid(std::size_t cells_per_segment) const {
    const std::size_t m = segments() * cells_per_segment;
    std::vector<double> v(m + 1);
    for (std::size_t s = 0; s < segments(); ++s)
      for (std::size_t j = 0; j < cells_per_segment; ++j) {
        double u = static_cast<double>(j) / static_cast<double>(cells_per_segment);
        v[s * cells_per_segment + j] = knots[s] + u * (knots[s + 1] - knots[s]);
      }
    v[m] = knots.back();
    return PiecewiseLinearPath(Grid(horizon, m), std::move(v));
  }
};

inline RateParams random_params(Engine& eng, RateCase c) {
  boost::random::uniform_real_distribution<double> u(0.0, 1.0);
  RateParams p;
  p.sigma_x = 0.5 + u(eng);
  p.sigma_theta = 0.2 + u(eng);
  p.r = 2 * u(eng) - 1;
  p.center = center_of(c);
  switch (c) {
    case RateCase::w_pos:
      p.mu = 0.2 + 2 * u(eng);
      p.theta = 0.2 + 2 * u(eng);
      p.initial = u(eng);
      break;
    case RateCase::v_pos:
      p.mu = (u(eng) < 0.5 ? -1 : 1) * (0.2 + 2 * u(eng));
      p.theta = 0.2 + 2 * u(eng);
      p.initial = 2 * u(eng) - 1;
      break;
    case RateCase::w_zero:
      p.mu = 0;
      p.theta = 2 * u(eng);
      p.initial = 0;
      break;
    case RateCase::v_zero:
      p.mu = 0;
      p.theta = 0.1 + 2 * u(eng);
      p.initial = 2 * u(eng) - 1;
      break;
  }
  return p;
}

// Ten segments; reflected cases stay nonnegative, w-zero alternates positive
// excursions with exact zero stretches.
inline KnotPath random_knot_path(Engine& eng, const RateParams& p, RateCase c, double horizon = 1.0) {
  boost::random::normal_distribution<double> z;
  boost::random::uniform_real_distribution<double> u(0.0, 1.0);
  KnotPath k;
  k.horizon = horizon;
  k.knots.assign(11, 0.0);
  k.knots[0] = p.initial;
  for (std::size_t i = 1; i < k.knots.size(); ++i) {
    double v = k.knots[i - 1] + 0.5 * z(eng);
    if (c == RateCase::w_pos) v = std::fabs(v);
    if (c == RateCase::w_zero) v = u(eng) < 0.4 ? 0.0 : u(eng);
    k.knots[i] = v;
  }
  if (c == RateCase::w_zero) {
    k.knots[3] = k.knots[4] = 0.0;  // guarantee a zero segment
    k.knots[6] = 0.5 + u(eng);      // and a positive excursion
  }
  return k;
}

// Exact integral of the rate integrand over the knot path. The integrand is a
// quadratic in t on each segment, so Simpson's rule is exact there.
inline double exact_rate(const KnotPath& k, const RateParams& p, RateCase c) {
  const double h = k.horizon / static_cast<double>(k.segments());
  const double kappa = rate_kappa(p);
  double total = 0;
  for (std::size_t s = 0; s < k.segments(); ++s) {
    double a = k.knots[s], b = k.knots[s + 1];
    if (c == RateCase::w_zero && a == 0 && b == 0) {
      if (p.r > 0) total += kappa * p.r * p.r * h;
      continue;
    }
    double slope = (b - a) / h;
    auto f = [&](double x) {
      double v = slope - p.r + p.theta * x;
      return v * v;
    };
    total += kappa * h / 6 * (f(a) + 4 * f(0.5 * (a + b)) + f(b));
  }
  return total;
}

}  // namespace wdq::testing
