#include "doctest.h"
#include "wdq/config.hpp"

using namespace wdq;

TEST_CASE("parse a full config") {
  auto c = parse_config(R"({
    "theta": {"family": "two_point", "params": [0.25, 0, 4]},
    "x": {"family": "normal", "params": [0, 2]},
    "mu": 1.5, "r": -0.5, "beta": 0.3, "T": 2, "w0": 0.4, "seed": 99
  })");
  CHECK(c.seed == 99);
  CHECK(c.params.mu() == 1.5);
  CHECK(c.params.sigma_x() == 2.0);
  CHECK(c.params.theta() == 1.0);
  CHECK(c.params.r == -0.5);
  CHECK(c.params.beta == 0.3);
  CHECK(c.params.horizon == 2.0);
  CHECK(c.params.w0 == 0.4);
}

TEST_CASE("defaults and errors") {
  auto c = parse_config(R"({"theta": {"family": "point_mass", "params": [0]},
                            "x": {"family": "uniform", "params": [-1, 1]}})");
  CHECK(c.seed == 1);
  CHECK(c.params.beta == 0.2);
  CHECK(c.params.horizon == 1.0);
  CHECK_THROWS_AS(parse_config("{"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"x": {"family": "normal", "params": [0, 1]}})"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"theta": {"family": "cauchy", "params": [0, 1]},
                                    "x": {"family": "normal", "params": [0, 1]}})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(parse_config(R"({"theta": {"family": "normal", "params": [0, 1]},
                                    "x": {"family": "normal", "params": [0, 1]}, "beta": 0.7})"),
                  std::invalid_argument);
  CHECK_THROWS(load_config("/nonexistent/config.json"));
}
