#include <cmath>

#include "doctest.h"
#include "wdq/diffusion.hpp"
#include "wdq/fluid.hpp"

using namespace wdq;

namespace {

ModelParams queue(double mu, double theta, double sx = 1, double st = 1) {
  ModelParams p;
  p.theta_law = DistributionSpec::normal(theta, st);
  p.x_law = DistributionSpec::normal(mu, sx);
  return p;
}

}  // namespace

TEST_CASE("stationary moments examples") {
  RateParams p{1, 1, 1, 1, 0, Center::positive, 0};
  CHECK(stationary_moments(p, 0).m == 0.0);
  auto sm = stationary_moments(p, 2);
  CHECK(sm.m == 2.0);
  CHECK(sm.s2 == 1.0);
  RateParams q{1, 2, 1.5, 0, 0, Center::positive, 0};
  CHECK(stationary_moments(q, 0).s2 == doctest::Approx(2.25 / 4));
  RateParams r{1, 2, 1, 1, 0, Center::positive, 0};
  CHECK(stationary_moments(r, 0).s2 == doctest::Approx(1.0 / 4 + 1.0 / 16));
  RateParams bad{1, 0, 1, 1, 0, Center::positive, 0};
  CHECK_THROWS_AS(stationary_moments(bad, 0), std::invalid_argument);
}

TEST_CASE("noiseless OU follows the ODE and the fluid V form") {
  DiffusionSpec s{1.5, 2.0, 1e-8, false, -1.0};
  for (std::size_t m : {100, 1000}) {
    Grid g(3.0, m);
    auto paths = simulate_ou(s, g, 1, 4);
    StepPath ode = fluid_v(s.drift_eta, s.theta, s.x0, g);
    double scale = std::fabs(s.x0 - s.drift_eta / s.theta);
    double tol = scale * s.theta * s.theta * g.horizon * g.dt() * std::exp(s.theta * g.horizon) + 1e-6;
    CHECK(sup_distance(paths[0], ode) <= tol);
  }
}

TEST_CASE("unreflected OU moments") {
  DiffusionSpec s{1.0, 0.5, 0.8, false, 2.0};
  Grid g(16.0, 1600);  // t >= 8/theta
  auto ends = simulate_ou_endpoints(s, g, 4000, 7);
  auto m = sample_moments(ends);
  CHECK(std::fabs(m.mean - 2.0) <= 4 * m.se_mean);
  CHECK(std::fabs(m.var - 0.64 / 1.0) <= 4 * m.se_var);

  // Started at the mean: the mean stays put along the path.
  auto paths = simulate_ou(s, Grid(4.0, 400), 2000, 9);
  for (double t : {0.5, 1.0, 2.0, 4.0}) {
    std::vector<double> xs;
    for (const auto& p : paths) xs.push_back(p.at(t));
    auto mm = sample_moments(xs);
    CHECK(std::fabs(mm.mean - 2.0) <= 3.5 * mm.se_mean);
  }
  CHECK(ou_mean(s, 3.0) == doctest::Approx(2.0));
  CHECK(ou_variance(s, 1e3) == doctest::Approx(0.64));
}

TEST_CASE("reflected OU") {
  DiffusionSpec s{-20.0, 0.0, 1.0, true, 1.0};
  auto paths = simulate_ou(s, Grid(2.0, 2000), 50, 3);
  double late = 0;
  for (const auto& p : paths) {
    for (std::size_t k = 0; k < p.size(); ++k) REQUIRE(p[k] >= 0);
    late += p.at(2.0);
  }
  CHECK(late / 50 < 0.1);
}

TEST_CASE("sample moments and ks") {
  auto m = sample_moments({1, 2, 3, 4});
  CHECK(m.mean == 2.5);
  CHECK(m.var == doctest::Approx(5.0 / 3));
  CHECK(m.count == 4);
  CHECK(ks_statistic({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_statistic({1, 2, 3}, {4, 5, 6}) == 1.0);
  CHECK(ks_statistic({1, 2, 3, 4}, {3, 4, 5, 6}) == doctest::Approx(0.5));
}

TEST_CASE("fclt case dispatch") {
  CHECK(fclt_case_of(1, 2) == FcltCase::i);
  CHECK(fclt_case_of(0, 0) == FcltCase::ii);
  CHECK(fclt_case_of(0, 1) == FcltCase::ii);
  CHECK(fclt_case_of(-1, 1) == FcltCase::iii);
  CHECK_THROWS_AS(fclt_case_of(1, 0), std::invalid_argument);
  CHECK_THROWS_AS(fclt_case_of(0, -1), std::invalid_argument);
}

TEST_CASE("fclt case (i) marginal variance") {
  auto rep = fclt_check(queue(1, 2), 0.0, 1000, 4.0, 2000, 11);
  const double s2 = 1.0 / 4 + 1.0 / 16;
  CHECK(rep.queue.target_var == doctest::Approx(s2));
  CHECK(std::fabs(rep.queue.z_mean) <= 4);
  CHECK(std::fabs(rep.queue.z_var) <= 4);
  REQUIRE(rep.marginal_var.has_value());
  CHECK(*rep.marginal_var == doctest::Approx(s2).epsilon(1e-3));
  CHECK(std::fabs(rep.limit.var - s2) <= 4 * rep.limit.se_var);
}

TEST_CASE("fclt case (i) regulator becomes inactive") {
  double prev = 2;
  for (double n : {1e2, 1e3, 1e4}) {
    auto rep = fclt_check(queue(0.5, 1, 1, 1), 0.0, n, 2.0, 300, 13);
    CHECK(rep.l_active_fraction <= prev);
    prev = rep.l_active_fraction;
  }
  CHECK(prev < 0.05);
}

TEST_CASE("fclt case (ii) against reflected Brownian motion") {
  auto rep = fclt_check(queue(0, 0, 1, 0.5), -1.0, 1000, 2.0, 2000, 17);
  CHECK(rep.fclt_case == FcltCase::ii);
  CHECK(std::fabs(rep.queue.z_mean) <= 4);
  CHECK(std::fabs(rep.queue.z_var) <= 4);
}

TEST_CASE("fclt case (iii) collapses") {
  double prev = INFINITY;
  for (double n : {1e2, 1e3, 1e4}) {
    auto rep = fclt_check(queue(-1, 1), 0.0, n, 1.0, 200, 19, 0.5);
    REQUIRE(rep.sup_exceed.has_value());
    CHECK(*rep.sup_exceed <= prev);
    prev = *rep.sup_exceed;
  }
  CHECK(prev < 0.01);
}
