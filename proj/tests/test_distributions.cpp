#include <cmath>

#include "doctest.h"
#include "wdq/distributions.hpp"

using namespace wdq;

namespace {

ModelParams with_theta(DistributionSpec d) {
  ModelParams p;
  p.theta_law = d;
  p.x_law = DistributionSpec::normal(0, 1);
  return p;
}

void check_moments(const DistributionSpec& d, std::uint64_t seed) {
  Engine eng = make_engine(seed, 0);
  auto xs = sample_theta(with_theta(d), eng, 1000000);
  double n = static_cast<double>(xs.size()), s = 0, s2 = 0;
  for (double x : xs) s += x;
  double mean = s / n;
  for (double x : xs) s2 += (x - mean) * (x - mean);
  double var = s2 / (n - 1);
  double se_mean = std::sqrt(d.declared_var() / n);
  CHECK(std::fabs(mean - d.declared_mean()) <= 4 * se_mean + 1e-15);
  // variance SE from the fourth central moment
  double m4 = 0;
  for (double x : xs) m4 += std::pow(x - mean, 4);
  m4 /= n;
  double se_var = std::sqrt(std::max(0.0, m4 - var * var) / n + 2 * var * var / (n * (n - 1)));
  CHECK(std::fabs(var - d.declared_var()) <= 4 * se_var + 1e-15);
}

}  // namespace

TEST_CASE("declared moments") {
  CHECK(DistributionSpec::normal(2, 3).declared_var() == 9);
  CHECK(DistributionSpec::shifted_exponential(2, 1).declared_mean() == 1.5);
  CHECK(DistributionSpec::shifted_exponential(2, 1).declared_var() == 0.25);
  CHECK(DistributionSpec::uniform(0, 6).declared_var() == 3);
  auto tp = DistributionSpec::two_point(0.5, 0, 4);
  CHECK(tp.declared_mean() == 2);
  CHECK(tp.declared_var() == 4);
  CHECK(DistributionSpec::point_mass(-1).declared_var() == 0);
}

TEST_CASE("construction errors and heavy tails") {
  CHECK_THROWS_AS(DistributionSpec::normal(0, -1), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::uniform(1, 1), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::shifted_exponential(0, 1), std::invalid_argument);
  CHECK_THROWS_AS(DistributionSpec::two_point(1.5, 0, 1), std::invalid_argument);
  std::vector<double> two{1.0, 2.0};
  for (const char* h : {"pareto", "cauchy", "lognormal", "student_t"})
    CHECK_THROWS_AS(DistributionSpec::from_name(h, two), std::invalid_argument);
  CHECK(DistributionSpec::from_name("normal", two).declared_mean() == 1.0);
  CHECK_THROWS_AS(DistributionSpec::from_name("normal", std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("sample_theta examples") {
  Engine eng = make_engine(7, 0);
  auto xs = sample_theta(with_theta(DistributionSpec::normal(2, 1)), eng, 1000000);
  double s = 0;
  for (double x : xs) s += x;
  CHECK(std::fabs(s / xs.size() - 2.0) < 5e-3);
  CHECK(sample_theta(with_theta(DistributionSpec::normal(2, 1)), eng, 0).empty());
}

TEST_CASE("every family matches its declared moments within 4 SE") {
  check_moments(DistributionSpec::normal(-1, 2), 1);
  check_moments(DistributionSpec::shifted_exponential(0.5, -2), 2);
  check_moments(DistributionSpec::uniform(-1, 3), 3);
  check_moments(DistributionSpec::two_point(0.5, 0, 4), 4);
  check_moments(DistributionSpec::two_point(0.1, -1, 2), 5);
}

TEST_CASE("sample_x drift shift") {
  ModelParams p;
  p.x_law = DistributionSpec::normal(0, 1);
  p.r = 1;
  p.beta = 0.25;
  CHECK(p.mu_n(1e4) == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(x_law_at(p, 1e4).declared_mean() == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(x_law_at(p, 1e4).declared_var() == 1.0);
  p.r = 0;
  CHECK(x_law_at(p, 1e4).declared_mean() == 0.0);

  p.r = 1;
  Engine eng = make_engine(11, 0);
  auto xs = sample_x(p, 1e4, eng, 1000000);
  double s = 0;
  for (double x : xs) s += x;
  CHECK(std::fabs(s / xs.size() - 0.1) < 3.0 / std::sqrt(1e6));

  double prev = INFINITY;
  for (double n : {1e2, 1e3, 1e4, 1e5, 1e6}) {
    double gap = std::fabs(p.mu_n(n) - p.mu());
    CHECK(gap < prev);
    prev = gap;
  }
}

TEST_CASE("sampling is deterministic in the seed") {
  ModelParams p = with_theta(DistributionSpec::shifted_exponential(1, 0));
  Engine a = make_engine(99, 3), b = make_engine(99, 3), c = make_engine(99, 4);
  auto xa = sample_theta(p, a, 100), xb = sample_theta(p, b, 100), xc = sample_theta(p, c, 100);
  CHECK(xa == xb);
  CHECK(xa != xc);
}

TEST_CASE("c coefficient") {
  CHECK(c_coefficient(0, 10) == 1);
  CHECK(c_coefficient(10, 10) == 0);
  CHECK(c_coefficient(2, 100) == doctest::Approx(0.98));
  CHECK(c_coefficient(30, 10) < 0);
}

TEST_CASE("model params validation") {
  ModelParams p;
  p.beta = 0.5;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.beta = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p.beta = 0.2;
  p.horizon = -1;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}
