#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "rate_paths.hpp"
#include "wdq/ratefn.hpp"

using namespace wdq;
using namespace wdq::testing;

namespace {

const RateCase kCases[] = {RateCase::w_pos, RateCase::w_zero, RateCase::v_pos, RateCase::v_zero};

PiecewiseLinearPath linear(double horizon, std::size_t m, double a, double b) {
  std::vector<double> v(m + 1);
  for (std::size_t k = 0; k <= m; ++k) v[k] = a + (b - a) * static_cast<double>(k) / static_cast<double>(m);
  return PiecewiseLinearPath(Grid(horizon, m), std::move(v));
}

RateParams w_pos_params() {
  RateParams p;
  p.mu = 1;
  p.theta = 2;
  p.sigma_x = 1;
  p.sigma_theta = 0.5;
  p.center = Center::positive;
  p.initial = 0.5;
  return p;
}

double sup_abs_nodes(const PiecewiseLinearPath& p) {
  double m = 0;
  for (double v : p.nodes()) m = std::max(m, std::fabs(v));
  return m;
}

}  // namespace

TEST_CASE("rate_rw examples") {
  CHECK(rate_rw(linear(2.0, 50, 0, 3), 1.5) == doctest::Approx(9.0 / (2 * 2.25 * 2)).epsilon(1e-14));
  CHECK(rate_rw(linear(1.0, 10, 0, 0), 1.0) == 0.0);
  CHECK(is_infinite_rate(rate_rw(linear(1.0, 10, 1, 2), 1.0)));
  CHECK(is_infinite_rate(rate_rw(linear(1.0, 10, 1, 2), 1.0) + 5));
}

TEST_CASE("rate_rw scales quadratically") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    Engine eng = make_engine(3, t);
    RateParams p = random_params(eng, RateCase::v_zero);
    p.initial = 0;
    auto phi = random_knot_path(eng, p, RateCase::v_zero).on_grid(5);
    std::vector<double> scaled(phi.nodes().begin(), phi.nodes().end());
    for (auto& v : scaled) v *= 2.0;
    double base = rate_rw(phi, 1.3);
    CHECK(rate_rw(PiecewiseLinearPath(phi.grid(), scaled), 1.3) == doctest::Approx(4 * base).epsilon(1e-14));
  }
}

TEST_CASE("rate_w_positive examples") {
  RateParams p = w_pos_params();
  p.r = 0.3;
  Grid g(2.0, 100);
  CHECK(rate_w_positive(zero_cost_path(p, RateCase::w_pos, g), p) <= 1e-10);

  // Continuous zero-cost curve sampled on the grid: cost is pure discretization.
  auto explicit_curve = PiecewiseLinearPath::from_function(
      g, [&](double t) { return (p.initial - p.r / p.theta) * std::exp(-p.theta * t) + p.r / p.theta; });
  CHECK(rate_w_positive(explicit_curve, p) <= 1e-6);

  p.r = 0;
  const double w0 = 0.5, horizon = 2.0;
  double expect = rate_kappa(p) * p.theta * p.theta * w0 * w0 * horizon;
  CHECK(rate_w_positive(linear(horizon, 40, w0, w0), p) == doctest::Approx(expect).epsilon(1e-14));
  CHECK(rate_kappa(p) == doctest::Approx(4.0 / (2 * (4.0 + 0.25))));
  CHECK(is_infinite_rate(rate_w_positive(linear(1.0, 10, 0.2, 1), p)));
  CHECK(is_infinite_rate(rate_w_positive(linear(1.0, 10, 0.5, -1), p)));
}

TEST_CASE("rate_w_zero examples") {
  RateParams p;
  p.sigma_x = 1.5;
  p.center = Center::zero;
  p.r = 0.7;
  auto zero = linear(2.0, 20, 0, 0);
  CHECK(rate_w_zero(zero, p) == doctest::Approx(0.49 / (2 * 2.25) * 2.0).epsilon(1e-14));
  p.r = -0.7;
  CHECK(rate_w_zero(zero, p) == 0.0);
  p.r = 0;
  CHECK(rate_w_zero(linear(2.0, 20, 0, 2 * 1.2), p) == doctest::Approx(1.44 * 2.0 / (2 * 2.25)).epsilon(1e-14));
}

TEST_CASE("rate_w_zero boundary term two ways") {
  for (std::uint64_t t = 0; t < 100; ++t) {
    Engine eng = make_engine(7, t);
    RateParams p = random_params(eng, RateCase::w_zero);
    p.r = 0.1 + std::fabs(p.r);
    auto phi = random_knot_path(eng, p, RateCase::w_zero).on_grid(20);
    const double dt = phi.grid().dt();
    double zero_measure = 0, positive_measure = 0, pos_part = 0;
    for (std::size_t k = 0; k < phi.grid().steps; ++k) {
      double mid = phi.midpoint(k);
      if (mid == 0.0) zero_measure += dt;
      else {
        positive_measure += dt;
        double f = phi.slope(k) - p.r + p.theta * mid;
        pos_part += f * f * dt;
      }
    }
    CHECK(std::fabs(zero_measure - (phi.grid().horizon - positive_measure)) <= dt);
    double boundary = rate_w_zero(phi, p) - pos_part / (2 * p.sigma_x * p.sigma_x);
    CHECK(boundary == doctest::Approx(p.r * p.r / (2 * p.sigma_x * p.sigma_x) * zero_measure).epsilon(1e-10));
  }
}

TEST_CASE("rate_v examples") {
  RateParams p = w_pos_params();
  p.mu = -1;
  p.r = 0.4;
  p.initial = -0.8;
  Grid g(1.5, 90);
  auto z = zero_cost_path(p, RateCase::v_pos, g);
  CHECK(rate_v(z, p, Center::positive) <= 1e-10);
  CHECK(is_infinite_rate(rate_v(linear(1, 10, 0, 1), p, Center::positive)));

  // theta = 0, r = 0: reduces to the random-walk rate of phi - v0.
  RateParams q;
  q.sigma_x = 0.8;
  q.center = Center::zero;
  q.initial = 0.3;
  for (std::uint64_t t = 0; t < 50; ++t) {
    Engine eng = make_engine(9, t);
    auto phi = random_knot_path(eng, q, RateCase::v_zero).on_grid(4);
    std::vector<double> shifted(phi.nodes().begin(), phi.nodes().end());
    for (auto& v : shifted) v -= q.initial;
    CHECK(rate_v(phi, q, Center::zero) ==
          doctest::Approx(rate_rw(PiecewiseLinearPath(phi.grid(), shifted), q.sigma_x)).epsilon(1e-12));
  }
}

TEST_CASE("parameter validation") {
  RateParams p = w_pos_params();
  p.center = Center::zero;
  CHECK_THROWS_AS(validate(p, RateCase::w_pos), std::invalid_argument);
  p.center = Center::positive;
  p.mu = -1;
  CHECK_THROWS_AS(validate(p, RateCase::w_pos), std::invalid_argument);
  CHECK_NOTHROW(validate(p, RateCase::v_pos));
  p.sigma_x = 0;
  CHECK_THROWS_AS(validate(p, RateCase::v_pos), std::invalid_argument);
  RateParams z;
  z.mu = 0.1;
  CHECK_THROWS_AS(validate(z, RateCase::v_zero), std::invalid_argument);
  CHECK(rate_case_from_string("w-zero") == RateCase::w_zero);
  CHECK_THROWS_AS(rate_case_from_string("w+"), std::invalid_argument);
}

TEST_CASE("optimal decomposition") {
  RateParams p = w_pos_params();
  p.r = 0.2;
  auto zc = zero_cost_path(p, RateCase::w_pos, Grid(1.0, 50));
  auto d0 = optimal_decomposition(zc, p);
  CHECK(sup_abs_nodes(d0.psi1) <= 1e-12);
  CHECK(sup_abs_nodes(d0.psi2) <= 1e-12);

  for (RateCase c : {RateCase::w_pos, RateCase::v_pos}) {
    for (std::uint64_t t = 0; t < 50; ++t) {
      Engine eng = make_engine(11, t);
      RateParams q = random_params(eng, c);
      auto phi = random_knot_path(eng, q, c).on_grid(20);
      auto d = optimal_decomposition(phi, q);
      double closed = rate(phi, q, c);
      CHECK(d.value == doctest::Approx(closed).epsilon(1e-8));
      CHECK(d.residual_sup <= d.euler_tolerance);
    }
  }
}

TEST_CASE("zero-centre decompositions") {
  for (RateCase c : {RateCase::w_zero, RateCase::v_zero}) {
    for (std::uint64_t t = 0; t < 30; ++t) {
      Engine eng = make_engine(13, t);
      RateParams q = random_params(eng, c);
      auto phi = random_knot_path(eng, q, c).on_grid(20);
      auto d = decomposition(phi, q, c);
      CHECK(d.value == doctest::Approx(rate(phi, q, c)).epsilon(1e-10));
      CHECK(d.y.has_value() == (c == RateCase::w_zero));
      if (d.y) {
        for (std::size_t k = 1; k < d.y->size(); ++k) CHECK((*d.y)[k] >= (*d.y)[k - 1]);
      }
    }
  }
}

TEST_CASE("variational oracle agrees with the closed forms") {
  for (RateCase c : kCases) {
    for (std::uint64_t t = 0; t < 20; ++t) {
      CAPTURE(to_string(c));
      CAPTURE(t);
      Engine eng = make_engine(17, t);
      RateParams q = random_params(eng, c);
      auto phi = random_knot_path(eng, q, c).on_grid(20);
      auto rep = rate_report(phi, q, c);
      REQUIRE(rep.oracle_converged);
      CHECK(rep.gap <= 0.01);
      CHECK(rep.value_closed_form <= rep.value_variational + 1e-9 * (1 + rep.value_closed_form));
      if (c == RateCase::w_zero) {
        auto o = variational_oracle(phi, q, c);
        REQUIRE(o.grid_search_value.has_value());
        CHECK(*o.grid_search_value >= o.value - 1e-12);
        CHECK(*o.grid_search_value <= o.value * 1.001 + 1e-6);
      }
    }
  }
}

TEST_CASE("discretized values approach the continuum integral under refinement") {
  for (RateCase c : kCases) {
    for (std::uint64_t t = 0; t < 10; ++t) {
      Engine eng = make_engine(19, t);
      RateParams q = random_params(eng, c);
      KnotPath k = random_knot_path(eng, q, c);
      double exact = exact_rate(k, q, c);
      double coarse = std::fabs(variational_oracle(k.on_grid(20), q, c).value - exact);
      double fine = std::fabs(variational_oracle(k.on_grid(40), q, c).value - exact);
      CHECK(fine <= coarse);
      CHECK(fine <= 0.3 * coarse + 1e-12 * exact);
    }
  }
}

TEST_CASE("zero-cost paths") {
  for (RateCase c : kCases) {
    for (std::uint64_t t = 0; t < 20; ++t) {
      Engine eng = make_engine(23, t);
      RateParams q = random_params(eng, c);
      if (c == RateCase::w_pos) q.r = std::fabs(q.r);  // with r < 0 the drift path would be clamped at 0
      auto z = zero_cost_path(q, c, Grid(2.0, 200));
      CHECK(rate(z, q, c) <= 1e-10);
      CHECK(variational_oracle(z, q, c).value <= 1e-10);
    }
  }
}

TEST_CASE("infinite rates") {
  RateParams p = w_pos_params();
  auto off = linear(1.0, 10, p.initial + 0.1, 1.0);
  for (RateCase c : {RateCase::w_pos, RateCase::v_pos}) {
    CHECK(is_infinite_rate(rate(off, p, c)));
    CHECK(is_infinite_rate(variational_oracle(off, p, c).value));
  }
}
