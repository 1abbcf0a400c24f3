#include "wdq/ratefn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wdq/reflection.hpp"

namespace wdq {

namespace {

double eps_zero(const PiecewiseLinearPath& phi) {
  double m = 0.0;
  for (double v : phi.nodes()) m = std::max(m, std::fabs(v));
  return 1e-12 * (1.0 + m);
}

bool starts_at(const PiecewiseLinearPath& phi, double initial) {
  return std::fabs(phi[0] - initial) <= 1e-12 * (1.0 + std::fabs(initial));
}

bool nonnegative_within(const PiecewiseLinearPath& phi) {
  const double eps = eps_zero(phi);
  for (double v : phi.nodes())
    if (v < -eps) return false;
  return true;
}

// kappa * sum_k dt (slope - r + theta * midpoint)^2
double drift_quadratic(const PiecewiseLinearPath& phi, double kappa, double theta, double r) {
  const double dt = phi.grid().dt();
  double s = 0.0;
  for (std::size_t k = 0; k < phi.grid().steps; ++k) {
    double f = phi.slope(k) - r + theta * phi.midpoint(k);
    s += f * f;
  }
  return kappa * s * dt;
}

double sup_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::fabs(x));
  return m;
}

}  // namespace

std::string to_string(RateCase c) {
  switch (c) {
    case RateCase::w_pos: return "w-pos";
    case RateCase::w_zero: return "w-zero";
    case RateCase::v_pos: return "v-pos";
    case RateCase::v_zero: return "v-zero";
  }
  return "?";
}

RateCase rate_case_from_string(const std::string& s) {
  if (s == "w-pos") return RateCase::w_pos;
  if (s == "w-zero") return RateCase::w_zero;
  if (s == "v-pos") return RateCase::v_pos;
  if (s == "v-zero") return RateCase::v_zero;
  throw std::invalid_argument("unknown rate case: " + s);
}

bool reflected_case(RateCase c) { return c == RateCase::w_pos || c == RateCase::w_zero; }

Center center_of(RateCase c) {
  return (c == RateCase::w_pos || c == RateCase::v_pos) ? Center::positive : Center::zero;
}

void validate(const RateParams& p, RateCase c) {
  if (!(p.sigma_x > 0) || !std::isfinite(p.sigma_x)) throw std::invalid_argument("sigma_x must be > 0");
  if (!(p.sigma_theta >= 0) || !std::isfinite(p.sigma_theta)) throw std::invalid_argument("sigma_theta must be >= 0");
  for (double v : {p.mu, p.theta, p.r, p.initial})
    if (!std::isfinite(v)) throw std::invalid_argument("rate parameters must be finite");
  if (p.center != center_of(c)) throw std::invalid_argument("centre does not match case " + to_string(c));
  switch (c) {
    case RateCase::w_pos:
      if (!(p.mu > 0 && p.theta > 0)) throw std::invalid_argument("w-pos needs mu > 0 and theta > 0");
      break;
    case RateCase::v_pos:
      if (!(p.theta > 0 && p.mu != 0)) throw std::invalid_argument("v-pos needs theta > 0 and mu != 0");
      break;
    case RateCase::w_zero:
    case RateCase::v_zero:
      if (!(p.mu == 0 && p.theta >= 0)) throw std::invalid_argument("zero centre needs mu = 0 and theta >= 0");
      break;
  }
}

double rate_kappa(const RateParams& p) {
  if (p.center == Center::zero) return 1.0 / (2.0 * p.sigma_x * p.sigma_x);
  const double d = p.theta * p.theta * p.sigma_x * p.sigma_x + p.mu * p.mu * p.sigma_theta * p.sigma_theta;
  return p.theta * p.theta / (2.0 * d);
}

double rate_rw(const PiecewiseLinearPath& phi, double sigma) {
  if (!(sigma > 0)) throw std::invalid_argument("rate_rw: sigma must be > 0");
  if (std::fabs(phi[0]) > 1e-12) return kInfiniteRate;
  const double dt = phi.grid().dt();
  double s = 0.0;
  for (std::size_t k = 0; k < phi.grid().steps; ++k) s += phi.slope(k) * phi.slope(k);
  return s * dt / (2.0 * sigma * sigma);
}

double rate_w_positive(const PiecewiseLinearPath& phi, const RateParams& p) {
  validate(p, RateCase::w_pos);
  if (!starts_at(phi, p.initial) || !nonnegative_within(phi)) return kInfiniteRate;
  return drift_quadratic(phi, rate_kappa(p), p.theta, p.r);
}

double rate_w_zero(const PiecewiseLinearPath& phi, const RateParams& p) {
  validate(p, RateCase::w_zero);
  if (!starts_at(phi, p.initial) || !nonnegative_within(phi)) return kInfiniteRate;
  const double dt = phi.grid().dt();
  const double eps = eps_zero(phi);
  const double k2 = 1.0 / (2.0 * p.sigma_x * p.sigma_x);
  double pos = 0.0, zero_measure = 0.0;
  for (std::size_t k = 0; k < phi.grid().steps; ++k) {
    double mid = phi.midpoint(k);
    if (mid > eps) {
      double f = phi.slope(k) - p.r + p.theta * mid;
      pos += f * f;
    } else {
      zero_measure += dt;
    }
  }
  double boundary = p.r > 0 ? k2 * p.r * p.r * zero_measure : 0.0;
  return k2 * pos * dt + boundary;
}

double rate_v(const PiecewiseLinearPath& phi, const RateParams& p, Center c) {
  validate(p, c == Center::positive ? RateCase::v_pos : RateCase::v_zero);
  if (!starts_at(phi, p.initial)) return kInfiniteRate;
  return drift_quadratic(phi, rate_kappa(p), p.theta, p.r);
}

double rate(const PiecewiseLinearPath& phi, const RateParams& p, RateCase c) {
  switch (c) {
    case RateCase::w_pos: return rate_w_positive(phi, p);
    case RateCase::w_zero: return rate_w_zero(phi, p);
    case RateCase::v_pos: return rate_v(phi, p, Center::positive);
    case RateCase::v_zero: return rate_v(phi, p, Center::zero);
  }
  return kInfiniteRate;
}

double rate_theta_part(const PiecewiseLinearPath& psi2, double sigma_theta) {
  if (sigma_theta > 0) return rate_rw(psi2, sigma_theta);
  return sup_abs(psi2.nodes()) == 0.0 ? 0.0 : kInfiniteRate;
}

Decomposition optimal_decomposition(const PiecewiseLinearPath& phi, const RateParams& p) {
  if (p.center != Center::positive) throw std::invalid_argument("optimal_decomposition: positive centre only");
  if (!(p.theta > 0) || p.mu == 0) throw std::invalid_argument("optimal_decomposition: need theta > 0, mu != 0");
  if (!(p.sigma_x > 0) || p.sigma_theta < 0) throw std::invalid_argument("optimal_decomposition: bad sigmas");
  if (!starts_at(phi, p.initial)) throw std::invalid_argument("optimal_decomposition: phi(0) must equal the initial value");
  const Grid& g = phi.grid();
  const double dt = g.dt();
  const double sx2 = p.sigma_x * p.sigma_x, st2 = p.sigma_theta * p.sigma_theta;
  const double d = p.theta * p.theta * sx2 + p.mu * p.mu * st2;
  const double a1 = p.theta * p.theta * sx2 / d;
  const double a2 = -p.mu * p.theta * st2 / d;
  std::vector<double> q1(g.nodes(), 0.0), q2(g.nodes(), 0.0);
  for (std::size_t k = 0; k < g.steps; ++k) {
    double f = phi.slope(k) - p.r + p.theta * phi.midpoint(k);
    q1[k + 1] = q1[k] + a1 * f * dt;
    q2[k + 1] = q2[k] + a2 * f * dt;
  }
  Decomposition out{PiecewiseLinearPath(g, q1), PiecewiseLinearPath(g, q2), std::nullopt, 0, 0, 0};
  out.value = rate_rw(out.psi1, p.sigma_x) + rate_theta_part(out.psi2, p.sigma_theta);

  // Certify phi = M_theta(initial + psi1 - (mu/theta) psi2 + r t).
  std::vector<double> x(g.nodes());
  const double c = p.mu / p.theta;
  for (std::size_t k = 0; k < x.size(); ++k) x[k] = p.initial + q1[k] - c * q2[k] + p.r * g.time(k);
  StepPath u = map_m(StepPath(g, x), p.theta);
  double res = 0.0, osc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    res = std::max(res, std::fabs(u[k] - phi[k]));
    osc = std::max(osc, std::fabs(phi[k] - phi[0]));
  }
  out.residual_sup = res;
  out.euler_tolerance = 0.5 * std::fabs(p.theta) * dt * osc * std::exp(std::fabs(p.theta) * g.horizon) +
                        1e-10 * (1.0 + sup_abs(phi.nodes()));
  return out;
}

Decomposition decomposition(const PiecewiseLinearPath& phi, const RateParams& p, RateCase c) {
  validate(p, c);
  if (center_of(c) == Center::positive) return optimal_decomposition(phi, p);
  const Grid& g = phi.grid();
  const double dt = g.dt();
  const double eps = eps_zero(phi);
  std::vector<double> q1(g.nodes(), 0.0), y(g.nodes(), 0.0);
  for (std::size_t k = 0; k < g.steps; ++k) {
    double mid = phi.midpoint(k);
    double f = phi.slope(k) - p.r + p.theta * mid;
    double yd = 0.0;
    if (c == RateCase::w_zero && !(mid > eps)) yd = std::max(0.0, -p.r);
    q1[k + 1] = q1[k] + (f - yd) * dt;
    y[k + 1] = y[k] + yd * dt;
  }
  Decomposition out{PiecewiseLinearPath(g, q1), PiecewiseLinearPath(g, std::vector<double>(g.nodes(), 0.0)),
                    std::nullopt, 0, 0, 0};
  if (c == RateCase::w_zero) out.y = PiecewiseLinearPath(g, y);
  out.value = rate_rw(out.psi1, p.sigma_x);
  return out;
}

OracleResult variational_oracle(const PiecewiseLinearPath& phi, const RateParams& p, RateCase c) {
  validate(p, c);
  OracleResult res;
  res.converged = true;
  if (!starts_at(phi, p.initial) || (reflected_case(c) && !nonnegative_within(phi))) {
    res.value = kInfiniteRate;
    return res;
  }
  const Grid& g = phi.grid();
  const std::size_t m = g.steps;
  const double dt = g.dt();
  const double sx2 = p.sigma_x * p.sigma_x;

  // Constraint residual per cell with exact (trapezoid) integration of the linear phi:
  // psi1' = g_k + coupling * psi2' (+ regulator terms in the reflected case).
  std::vector<double> trap(g.nodes(), 0.0);
  for (std::size_t k = 0; k < m; ++k) trap[k + 1] = trap[k] + 0.5 * dt * (phi[k] + phi[k + 1]);
  std::vector<double> gk(m);
  for (std::size_t k = 0; k < m; ++k)
    gk[k] = ((phi[k + 1] - phi[k]) + p.theta * (trap[k + 1] - trap[k])) / dt - p.r;

  if (c == RateCase::w_zero) {
    const double eps = eps_zero(phi);
    const double ymax = 2.0 * std::fabs(p.r) + 1.0;
    const std::size_t grid_pts = 4000;
    double total = 0.0, total_grid = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      if (0.5 * (phi[k] + phi[k + 1]) > eps) {
        total += gk[k] * gk[k];
        total_grid += gk[k] * gk[k];
        continue;
      }
      // On the zero set: minimize (g - y')^2 over y' >= 0.
      double yd = std::max(0.0, gk[k]);
      double v = gk[k] - yd;
      total += v * v;
      double best = gk[k] * gk[k];
      for (std::size_t j = 1; j <= grid_pts; ++j) {
        double cand = gk[k] - ymax * static_cast<double>(j) / grid_pts;
        best = std::min(best, cand * cand);
      }
      total_grid += best;
    }
    res.value = total * dt / (2.0 * sx2);
    res.grid_search_value = total_grid * dt / (2.0 * sx2);
    return res;
  }

  // M_theta cases: unknown psi2 node values q_1..q_m (q_0 = 0); psi1 follows from the constraint.
  const bool has_theta_noise = center_of(c) == Center::positive && p.sigma_theta > 0;
  const double coupling = center_of(c) == Center::positive ? p.mu / p.theta : 0.0;
  std::vector<double> q(m + 1, 0.0);
  if (has_theta_noise) {
    const double st2 = p.sigma_theta * p.sigma_theta;
    // Gradient of J(q) = sum_k dt [ (g_k + coupling d_k)^2/(2 sx2) + d_k^2/(2 st2) ], d_k = (q_{k+1}-q_k)/dt.
    auto gradient = [&](const std::vector<double>& qq, bool with_g, std::vector<double>& out) {
      std::fill(out.begin(), out.end(), 0.0);
      for (std::size_t k = 0; k < m; ++k) {
        double d = (qq[k + 1] - qq[k]) / dt;
        double gg = with_g ? gk[k] : 0.0;
        double dj = dt * ((gg + coupling * d) * coupling / sx2 + d / st2);  // dJ/dd_k
        out[k + 1] += dj / dt;
        out[k] -= dj / dt;
      }
      out[0] = 0.0;
    };
    std::vector<double> zero(m + 1, 0.0), b(m + 1), rvec(m + 1), pvec(m + 1), hp(m + 1);
    gradient(zero, true, b);
    for (auto& v : b) v = -v;  // J = 1/2 q'Hq - b'q
    rvec = b;
    pvec = rvec;
    double rr = 0.0, bnorm = 0.0;
    for (std::size_t i = 1; i <= m; ++i) {
      rr += rvec[i] * rvec[i];
      bnorm += b[i] * b[i];
    }
    const double stop = 1e-28 * std::max(bnorm, 1e-300);
    std::size_t it = 0;
    const std::size_t max_it = 20 * (m + 1);
    while (rr > stop && it < max_it) {
      gradient(pvec, false, hp);
      double php = 0.0;
      for (std::size_t i = 1; i <= m; ++i) php += pvec[i] * hp[i];
      if (!(php > 0)) break;
      double alpha = rr / php;
      double rr_new = 0.0;
      for (std::size_t i = 1; i <= m; ++i) {
        q[i] += alpha * pvec[i];
        rvec[i] -= alpha * hp[i];
        rr_new += rvec[i] * rvec[i];
      }
      double beta = rr_new / rr;
      rr = rr_new;
      for (std::size_t i = 1; i <= m; ++i) pvec[i] = rvec[i] + beta * pvec[i];
      ++it;
    }
    // Recompute the true residual rather than trusting the recursive one.
    std::vector<double> grad(m + 1);
    gradient(q, true, grad);
    double gnorm = 0.0;
    for (std::size_t i = 1; i <= m; ++i) gnorm += grad[i] * grad[i];
    res.iterations = it;
    res.residual = std::sqrt(gnorm / std::max(bnorm, 1e-300));
    res.converged = bnorm == 0.0 || res.residual < 1e-8;
  }

  // psi1(t_k) = phi_k - initial - r t_k + theta * int_0^{t_k} phi + coupling * psi2(t_k)
  double ix = 0.0, ith = 0.0;
  double prev = 0.0;
  for (std::size_t k = 1; k <= m; ++k) {
    double psi1 = phi[k] - p.initial - p.r * g.time(k) + p.theta * trap[k] + coupling * q[k];
    double s1 = (psi1 - prev) / dt;
    ix += s1 * s1;
    prev = psi1;
    if (has_theta_noise) {
      double s2 = (q[k] - q[k - 1]) / dt;
      ith += s2 * s2;
    }
  }
  res.value = ix * dt / (2.0 * sx2);
  if (has_theta_noise) res.value += ith * dt / (2.0 * p.sigma_theta * p.sigma_theta);
  return res;
}

RateReport rate_report(const PiecewiseLinearPath& phi, const RateParams& p, RateCase c) {
  RateReport rep;
  rep.rate_case = c;
  rep.value_closed_form = rate(phi, p, c);
  OracleResult o = variational_oracle(phi, p, c);
  rep.value_variational = o.value;
  rep.oracle_converged = o.converged;
  if (!is_infinite_rate(rep.value_closed_form)) rep.decomposition = decomposition(phi, p, c);
  if (is_infinite_rate(rep.value_closed_form) && is_infinite_rate(rep.value_variational)) rep.gap = 0.0;
  else rep.gap = std::fabs(rep.value_variational - rep.value_closed_form) / std::max(rep.value_closed_form, 1e-300);
  return rep;
}

PiecewiseLinearPath zero_cost_path(const RateParams& p, RateCase c, const Grid& grid) {
  validate(p, c);
  const double dt = grid.dt();
  const double num = 1.0 - 0.5 * p.theta * dt, den = 1.0 + 0.5 * p.theta * dt;
  std::vector<double> v(grid.nodes());
  v[0] = p.initial;
  for (std::size_t k = 0; k < grid.steps; ++k) {
    double next = (v[k] * num + p.r * dt) / den;
    if (reflected_case(c) && next < 0.0) next = 0.0;
    v[k + 1] = next;
  }
  return PiecewiseLinearPath(grid, std::move(v));
}

namespace {

struct QuadSolve {
  std::vector<double> nodes;
  bool converged = true;
  bool clamped = false;
};

// Minimizes sum_k (alpha x_{k+1} - beta x_k - r dt)^2 with both ends fixed; the
// optional lower bound 0 on interior nodes is enforced by projected Gauss-Seidel.
QuadSolve solve_endpoint_quadratic(double theta, double r, double dt, std::size_t m, double left, double right,
                                   bool nonneg) {
  QuadSolve out;
  out.nodes.assign(m + 1, 0.0);
  out.nodes[0] = left;
  out.nodes[m] = right;
  if (m < 2) return out;
  const double al = 1.0 + 0.5 * theta * dt, be = 1.0 - 0.5 * theta * dt;
  const double diag = al * al + be * be, off = -al * be, rhs0 = r * dt * (al - be);
  // Thomas algorithm on interior nodes 1..m-1.
  const std::size_t n = m - 1;
  std::vector<double> cp(n), dp(n);
  for (std::size_t i = 0; i < n; ++i) {
    double rhs = rhs0;
    if (i == 0) rhs -= off * left;
    if (i == n - 1) rhs -= off * right;
    double denom = diag - (i > 0 ? off * cp[i - 1] : 0.0);
    cp[i] = off / denom;
    dp[i] = (rhs - (i > 0 ? off * dp[i - 1] : 0.0)) / denom;
  }
  for (std::size_t i = n; i-- > 0;) out.nodes[i + 1] = dp[i] - (i + 1 < n ? cp[i] * out.nodes[i + 2] : 0.0);

  if (!nonneg) return out;
  bool violated = false;
  for (std::size_t k = 1; k < m; ++k)
    if (out.nodes[k] < 0) violated = true;
  if (!violated) return out;
  out.clamped = true;
  for (std::size_t k = 1; k < m; ++k) out.nodes[k] = std::max(0.0, out.nodes[k]);
  out.converged = false;
  const double scale = 1.0 + std::max(std::fabs(left), std::fabs(right));
  for (std::size_t sweep = 0; sweep < 2000000; ++sweep) {
    double change = 0.0;
    for (std::size_t k = 1; k < m; ++k) {
      double v = std::max(0.0, (rhs0 - off * (out.nodes[k - 1] + out.nodes[k + 1])) / diag);
      change = std::max(change, std::fabs(v - out.nodes[k]));
      out.nodes[k] = v;
    }
    if (change < 1e-15 * scale) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double exact_endpoint_value(const RateParams& p, double a, double horizon) {
  const double kappa = rate_kappa(p);
  if (p.theta == 0.0) {
    double d = a - p.initial - p.r * horizon;
    return kappa * d * d / horizon;
  }
  const double s = p.r / p.theta;
  const double e = std::exp(-p.theta * horizon);
  const double d = (a - s) - (p.initial - s) * e;
  // min int h^2 subject to int_0^T e^{-theta (T-s)} h(s) ds = d
  return kappa * d * d * 2.0 * p.theta / (-std::expm1(-2.0 * p.theta * horizon));
}

}  // namespace

EndpointTarget endpoint_target(const RateParams& p, double a, RateCase c, double horizon, std::size_t steps) {
  validate(p, c);
  if (!(horizon > 0)) throw std::invalid_argument("endpoint_target: horizon must be > 0");
  if (reflected_case(c) && a < 0) return {kInfiniteRate, kInfiniteRate, true, false};
  Grid g(horizon, steps);
  const double dt = g.dt();
  EndpointTarget out;
  if (c == RateCase::w_zero && p.r < 0) {
    if (p.initial != 0.0) throw std::invalid_argument("endpoint_target: w-zero with r < 0 needs initial value 0");
    // Stay at zero for free until node j, then take the best positive arc to a.
    double best = kInfiniteRate;
    out.converged = true;
    for (std::size_t j = 0; j < steps; ++j) {
      QuadSolve arc = solve_endpoint_quadratic(p.theta, p.r, dt, steps - j, 0.0, a, true);
      std::vector<double> nodes(g.nodes(), 0.0);
      std::copy(arc.nodes.begin(), arc.nodes.end(), nodes.begin() + static_cast<std::ptrdiff_t>(j));
      double v = rate_w_zero(PiecewiseLinearPath(g, nodes), p);
      if (v < best) {
        best = v;
        out.converged = arc.converged;
        out.positivity_binding = arc.clamped;
      }
    }
    out.value = best;
    return out;
  }
  QuadSolve sol = solve_endpoint_quadratic(p.theta, p.r, dt, steps, p.initial, a, reflected_case(c));
  out.converged = sol.converged;
  out.positivity_binding = sol.clamped;
  out.value = rate(PiecewiseLinearPath(g, sol.nodes), p, c);
  if (!sol.clamped) out.exact = exact_endpoint_value(p, a, horizon);
  return out;
}

EndpointTarget endpoint_target_at_least(const RateParams& p, double a, RateCase c, double horizon,
                                        std::size_t steps) {
  validate(p, c);
  PiecewiseLinearPath z = zero_cost_path(p, c, Grid(horizon, steps));
  if (z[steps] >= a) return {0.0, 0.0, true, false};
  return endpoint_target(p, a, c, horizon, steps);
}

EndpointTarget sup_target(const RateParams& p, double a, RateCase c, double horizon, std::size_t steps) {
  validate(p, c);
  if (p.initial > a) return {0.0, 0.0, true, false};
  EndpointTarget best{kInfiniteRate, std::nullopt, true, false};
  const double dt = horizon / static_cast<double>(steps);
  for (std::size_t j = 1; j <= steps; ++j) {
    EndpointTarget t = endpoint_target_at_least(p, a, c, dt * static_cast<double>(j), j);
    if (t.value < best.value) best = t;
  }
  return best;
}

}  // namespace wdq
