#include "wdq/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "wdq/recursion.hpp"
#include "wdq/rng.hpp"

namespace wdq {

namespace {

Load load_of(double mu) { return mu > 0 ? Load::overloaded : (mu < 0 ? Load::underloaded : Load::critical); }
ThetaSign sign_of(double theta) { return theta > 0 ? ThetaSign::pos : (theta < 0 ? ThetaSign::neg : ThetaSign::zero); }

// mu/theta + (x0 - mu/theta) e^{-theta t}, or x0 + mu t when theta = 0.
double linear_ode(double mu, double theta, double x0, double t) {
  if (theta == 0.0) return x0 + mu * t;
  return x0 * std::exp(-theta * t) - (mu / theta) * std::expm1(-theta * t);
}

}  // namespace

std::string to_string(Load l) {
  switch (l) {
    case Load::overloaded: return "overloaded";
    case Load::critical: return "critical";
    case Load::underloaded: return "underloaded";
  }
  return "?";
}

std::string to_string(ThetaSign s) {
  switch (s) {
    case ThetaSign::pos: return "pos";
    case ThetaSign::zero: return "zero";
    case ThetaSign::neg: return "neg";
  }
  return "?";
}

std::string describe(const RegimeClassification& c) {
  std::ostringstream os;
  os << to_string(c.load) << ", theta " << to_string(c.theta_sign) << ": ";
  if (c.stable_point) os << "stable at " << format_double(*c.stable_point);
  else os << "unstable";
  if (c.initial_condition_dependent) os << " (only for w0 < mu/theta)";
  if (c.unstable_fixed_point) os << "; unstable fixed point " << format_double(*c.unstable_fixed_point);
  return os.str();
}

RegimeClassification classify_w(double mu, double theta) {
  RegimeClassification c;
  c.load = load_of(mu);
  c.theta_sign = sign_of(theta);
  if (mu > 0) {
    if (theta > 0) c.stable_point = mu / theta;
  } else if (mu == 0) {
    if (theta >= 0) c.stable_point = 0.0;
  } else {
    c.stable_point = 0.0;
    if (theta < 0) {
      c.initial_condition_dependent = true;
      c.unstable_fixed_point = mu / theta;
    }
  }
  return c;
}

RegimeClassification classify_v(double mu, double theta) {
  RegimeClassification c;
  c.load = load_of(mu);
  c.theta_sign = sign_of(theta);
  if (theta > 0) c.stable_point = (mu == 0) ? 0.0 : mu / theta;
  else if (theta == 0 && mu == 0) c.stable_point = 0.0;
  return c;
}

std::optional<double> fluid_hitting_time(double mu, double theta, double w0) {
  if (w0 < 0) throw std::invalid_argument("fluid_hitting_time: w0 must be >= 0");
  if (w0 == 0.0 && mu <= 0) return 0.0;
  if (mu >= 0) return std::nullopt;
  if (theta == 0.0) return w0 / -mu;
  double star = mu / theta;
  if (theta < 0 && w0 >= star) return std::nullopt;
  return -std::log(star / (star - w0)) / theta;
}

double fluid_w_at(double mu, double theta, double w0, double t) {
  if (w0 < 0) throw std::invalid_argument("fluid_w: w0 must be >= 0");
  auto t0 = fluid_hitting_time(mu, theta, w0);
  if (t0 && t >= *t0) return 0.0;
  return std::max(0.0, linear_ode(mu, theta, w0, t));
}

double fluid_v_at(double mu, double theta, double v0, double t) { return linear_ode(mu, theta, v0, t); }

StepPath fluid_w(double mu, double theta, double w0, const Grid& grid) {
  return StepPath::from_function(grid, [&](double t) { return fluid_w_at(mu, theta, w0, t); });
}

StepPath fluid_v(double mu, double theta, double v0, const Grid& grid) {
  return StepPath::from_function(grid, [&](double t) { return fluid_v_at(mu, theta, v0, t); });
}

ConvergenceReport fluid_convergence_report(const ModelParams& params, const std::vector<double>& n_ladder,
                                           std::size_t reps, std::uint64_t seed, Process process) {
  if (reps == 0) throw std::invalid_argument("fluid_convergence_report: reps must be >= 1");
  for (std::size_t i = 1; i < n_ladder.size(); ++i)
    if (!(n_ladder[i] > n_ladder[i - 1])) throw std::invalid_argument("fluid_convergence_report: ladder must ascend");
  ConvergenceReport rep;
  for (std::size_t rung = 0; rung < n_ladder.size(); ++rung) {
    const double n = n_ladder[rung];
    std::vector<double> err(reps);
    parallel_for(reps, [&](std::size_t r) {
      std::uint64_t s = derive_seed(derive_seed(seed, rung), r);
      if (process == Process::w) {
        SimOutput out = simulate_w(params, n, s);
        StepPath ref = fluid_w(params.mu(), params.theta(), params.w0, out.fluid_view.grid());
        err[r] = sup_distance(out.fluid_view, ref);
      } else {
        LinearSimOutput out = simulate_v(params, n, s, params.w0);
        StepPath ref = fluid_v(params.mu(), params.theta(), params.w0, out.fluid_view.grid());
        err[r] = sup_distance(out.fluid_view, ref);
      }
    });
    ConvergenceRow row;
    row.n = n;
    row.reps = reps;
    double sum = 0, sum2 = 0;
    for (double e : err) {
      sum += e;
      sum2 += e * e;
    }
    row.mean_sup_error = sum / reps;
    double var = reps > 1 ? std::max(0.0, (sum2 - sum * sum / reps) / (reps - 1)) : 0.0;
    row.se = std::sqrt(var / reps);
    std::vector<double> sorted = err;
    std::sort(sorted.begin(), sorted.end());
    row.median = sorted[(reps - 1) / 2];
    row.q90 = sorted[std::min(reps - 1, static_cast<std::size_t>(std::ceil(0.9 * reps)) - 1)];
    if (!rep.rows.empty() && row.mean_sup_error > rep.rows.back().mean_sup_error + row.se) rep.nonincreasing = false;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace wdq
