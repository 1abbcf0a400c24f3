#include "wdq/recursion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "wdq/rng.hpp"

namespace wdq {

namespace {

constexpr std::size_t kGuardMask = (std::size_t{1} << 16) - 1;

void guard(double v, std::size_t k) {
  if (!std::isfinite(v))
    throw std::overflow_error("recursion produced a non-finite value at step " + std::to_string(k) +
                              " (parameters blow up at this n)");
}

void check_lengths(std::span<const double> theta, std::span<const double> x) {
  if (theta.size() != x.size()) throw std::invalid_argument("theta and x draws differ in length");
}

// Streams used for the two primitive sequences of one replication.
Engine theta_engine(std::uint64_t seed) { return Engine(derive_seed(seed, 1)); }
Engine x_engine(std::uint64_t seed) { return Engine(derive_seed(seed, 2)); }

std::vector<double> scale_view(const std::vector<double>& raw, double n, double center, double factor) {
  std::vector<double> v(raw.size());
  for (std::size_t k = 0; k < raw.size(); ++k) v[k] = factor * (raw[k] / n - center);
  return v;
}

}  // namespace

std::size_t steps_for(double n, double horizon) {
  if (!(n >= 1.0)) throw std::invalid_argument("n must be >= 1");
  double m = std::floor(n * horizon * (1.0 + 1e-12));
  if (m < 1.0) throw std::invalid_argument("n*T must be at least one step");
  return static_cast<std::size_t>(m);
}

Grid sim_grid(double n, double horizon) {
  std::size_t m = steps_for(n, horizon);
  return Grid(static_cast<double>(m) / n, m);
}

Draws draw_noise(const ModelParams& p, double n, std::size_t count, std::uint64_t seed) {
  Engine et = theta_engine(seed), ex = x_engine(seed);
  Draws d;
  d.theta = sample_theta(p, et, count);
  d.x = sample_x(p, n, ex, count);
  return d;
}

ReflectedRun run_reflected(std::span<const double> theta, std::span<const double> x, double n, double w_init) {
  check_lengths(theta, x);
  const std::size_t m = x.size();
  ReflectedRun out;
  out.w.resize(m + 1);
  out.l.resize(m + 1);
  out.psi.resize(m);
  double w = w_init, l = 0.0;
  out.w[0] = w;
  out.l[0] = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    double y = c_coefficient(theta[i], n) * w + x[i];
    double psi = 0.0;
    if (y < 0) {
      psi = -y;
      w = 0.0;
    } else {
      w = y;
    }
    l += psi;
    out.psi[i] = psi;
    out.w[i + 1] = w;
    out.l[i + 1] = l;
    if ((i & kGuardMask) == 0) guard(w, i);
  }
  guard(w, m);
  guard(l, m);
  return out;
}

std::vector<double> run_linear(std::span<const double> theta, std::span<const double> x, double n, double v_init) {
  check_lengths(theta, x);
  const std::size_t m = x.size();
  std::vector<double> v(m + 1);
  v[0] = v_init;
  for (std::size_t i = 0; i < m; ++i) {
    v[i + 1] = c_coefficient(theta[i], n) * v[i] + x[i];
    if ((i & kGuardMask) == 0) guard(v[i + 1], i);
  }
  guard(v[m], m);
  return v;
}

std::vector<double> run_upsilon(std::span<const double> theta, std::span<const double> x, double n, double w_init) {
  check_lengths(theta, x);
  const std::size_t m = x.size();
  std::vector<double> ups(m + 1);
  // hi/lo are the largest and smallest candidate terms; a negative C swaps their roles.
  double hi = w_init, lo = w_init;
  ups[0] = w_init;
  for (std::size_t i = 0; i < m; ++i) {
    double c = c_coefficient(theta[i], n);
    double a = c * hi, b = c * lo;
    double nhi = std::max(0.0, x[i] + std::max(a, b));
    double nlo = std::min(0.0, x[i] + std::min(a, b));
    hi = nhi;
    lo = nlo;
    ups[i + 1] = hi;
    if ((i & kGuardMask) == 0) {
      guard(hi, i);
      guard(lo, i);
    }
  }
  guard(hi, m);
  guard(lo, m);
  return ups;
}

double initial_raw(const ModelParams& p, double n) { return n * p.w0 + p.b(n) * std::sqrt(n) * p.md_offset; }

double center_w(const ModelParams& p, bool* stable) {
  auto c = classify_w(p.mu(), p.theta());
  if (stable) *stable = c.stable();
  return c.stable_point.value_or(0.0);
}

double center_v(const ModelParams& p, bool* stable) {
  auto c = classify_v(p.mu(), p.theta());
  if (stable) *stable = c.stable();
  return c.stable_point.value_or(0.0);
}

SimOutput simulate_w(const ModelParams& p, double n, std::uint64_t seed, bool keep_draws) {
  p.validate();
  if (p.w0 < 0) throw std::invalid_argument("simulate_w: w0 must be >= 0");
  const double w_init = initial_raw(p, n);
  if (w_init < 0) throw std::invalid_argument("simulate_w: initial waiting time must be >= 0");
  Grid g = sim_grid(n, p.horizon);
  Draws d = draw_noise(p, n, g.steps, seed);
  ReflectedRun run = run_reflected(d.theta, d.x, n, w_init);

  SimOutput out;
  out.n = n;
  out.center = center_w(p, &out.center_stable);
  const double sn = std::sqrt(n);
  out.fluid_view = StepPath(g, scale_view(run.w, n, 0.0, 1.0));
  out.diffusion_view = StepPath(g, scale_view(run.w, n, out.center, sn));
  out.md_view = StepPath(g, scale_view(run.w, n, out.center, sn / p.b(n)));
  double comp = 0.0;
  for (std::size_t i = 0; i < run.psi.size(); ++i) comp += run.w[i + 1] * run.psi[i];
  out.complementarity = comp;
  out.w_path = StepPath(g, std::move(run.w));
  out.l_path = StepPath(g, std::move(run.l));
  if (keep_draws) out.draws = std::move(d);
  return out;
}

LinearSimOutput simulate_v(const ModelParams& p, double n, std::uint64_t seed, double v0) {
  p.validate();
  Grid g = sim_grid(n, p.horizon);
  Draws d = draw_noise(p, n, g.steps, seed);
  std::vector<double> v = run_linear(d.theta, d.x, n, n * v0 + p.b(n) * std::sqrt(n) * p.md_offset);

  LinearSimOutput out;
  out.n = n;
  out.center = center_v(p, &out.center_stable);
  const double sn = std::sqrt(n);
  out.fluid_view = StepPath(g, scale_view(v, n, 0.0, 1.0));
  out.diffusion_view = StepPath(g, scale_view(v, n, out.center, sn));
  out.md_view = StepPath(g, scale_view(v, n, out.center, sn / p.b(n)));
  out.v_path = StepPath(g, std::move(v));
  return out;
}

BoundingPaths simulate_bounding_systems(const ModelParams& p, double n, std::uint64_t seed) {
  p.validate();
  if (p.w0 < 0) throw std::invalid_argument("simulate_bounding_systems: w0 must be >= 0");
  const double w_init = initial_raw(p, n);
  if (w_init < 0) throw std::invalid_argument("simulate_bounding_systems: initial waiting time must be >= 0");
  Grid g = sim_grid(n, p.horizon);
  Draws d = draw_noise(p, n, g.steps, seed);
  ReflectedRun w = run_reflected(d.theta, d.x, n, w_init);
  std::vector<double> ups = run_upsilon(d.theta, d.x, n, w_init);
  std::vector<double> v = run_linear(d.theta, d.x, n, w_init);
  std::vector<double> u = run_linear(d.theta, d.x, n, 0.0);
  std::vector<double> umax(u.size());
  umax[0] = 0.0;
  double m = u[0];
  for (std::size_t i = 1; i < u.size(); ++i) {
    umax[i] = m;
    m = std::max(m, u[i]);
  }
  return {StepPath(g, std::move(w.w)), StepPath(g, std::move(ups)), StepPath(g, std::move(v)),
          StepPath(g, std::move(umax))};
}

TailSample md_tail_sample(const ModelParams& p, double n, const TailEvent& event, std::size_t reps, std::uint64_t seed,
                          const TailOptions& opt) {
  p.validate();
  if (reps == 0) throw std::invalid_argument("md_tail_sample: reps must be >= 1");
  if (!(event.a >= 0)) throw std::invalid_argument("md_tail_sample: threshold a must be >= 0");
  const bool reflected = opt.process == Process::w;
  double w_init = initial_raw(p, n);
  if (reflected && (p.w0 < 0 || w_init < 0)) throw std::invalid_argument("md_tail_sample: initial value must be >= 0");
  if (!reflected) w_init = n * p.w0 + p.b(n) * std::sqrt(n) * p.md_offset;
  const std::size_t m = steps_for(n, p.horizon);
  const double bn = p.b(n), sn = std::sqrt(n);
  const double center = reflected ? center_w(p) : center_v(p);
  // md >= a  <=>  raw >= n*center + a*b_n*sqrt(n)
  const double level = n * center + event.a * bn * sn;
  const DistributionSpec xlaw = x_law_at(p, n);

  double tilt = 0.0, s2 = 1.0;
  if (opt.estimator == Estimator::tilted) {
    const auto* nrm = std::get_if<Normal>(&xlaw.family());
    if (!nrm || nrm->sd <= 0)
      throw std::invalid_argument("md_tail_sample: the tilted estimator needs a normal X law with sd > 0");
    s2 = nrm->sd * nrm->sd;
    tilt = opt.tilt.value_or(event.a * bn / (sn * p.horizon));
  }
  const DistributionSpec sampling_law = xlaw.shifted(tilt);

  std::vector<double> weight(reps, 0.0);
  std::vector<unsigned char> hit(reps, 0);
  parallel_for(reps, [&](std::size_t r) {
    const std::uint64_t rs = derive_seed(seed, r);
    Engine et = theta_engine(rs), ex = x_engine(rs);
    Sampler st(p.theta_law), sx(sampling_law);
    double w = w_init, top = w_init, zsum = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
      double th = st(et);
      double xi = sx(ex);
      double y = c_coefficient(th, n) * w + xi;
      w = (reflected && y < 0) ? 0.0 : y;
      if (w > top) top = w;
      zsum += xi;
    }
    guard(w, m);
    bool occurred = event.kind == TailKind::endpoint ? (w >= level) : (top > level);
    if (!occurred) return;
    hit[r] = 1;
    if (opt.estimator == Estimator::plain) {
      weight[r] = 1.0;
    } else {
      // zsum collects the sampled X; subtract the tilted mean to get the base noise.
      double z = zsum - static_cast<double>(m) * (xlaw.declared_mean() + tilt);
      weight[r] = std::exp(-tilt * z / s2 - static_cast<double>(m) * tilt * tilt / (2.0 * s2));
    }
  });

  TailSample out;
  out.n = n;
  out.reps = reps;
  out.estimator = opt.estimator;
  out.tilt = tilt;
  double sum = 0, sum2 = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    out.hits += hit[r];
    sum += weight[r];
    sum2 += weight[r] * weight[r];
  }
  const double R = static_cast<double>(reps);
  out.p_hat = sum / R;
  if (reps > 1) {
    double var = std::max(0.0, (sum2 - sum * sum / R) / (R - 1.0));
    out.se = std::sqrt(var / R);
  }
  if (out.hits == 0) out.upper95 = 1.0 - std::pow(0.05, 1.0 / R);
  else out.upper95 = out.p_hat + 1.645 * out.se.value_or(out.p_hat);
  return out;
}

}  // namespace wdq
