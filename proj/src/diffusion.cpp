#include "wdq/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>

#include "wdq/fluid.hpp"
#include "wdq/recursion.hpp"
#include "wdq/rng.hpp"

namespace wdq {

void DiffusionSpec::validate() const {
  if (!(sigma > 0) || !std::isfinite(sigma)) throw std::invalid_argument("diffusion: sigma must be > 0");
  if (!std::isfinite(drift_eta) || !std::isfinite(theta) || !std::isfinite(x0))
    throw std::invalid_argument("diffusion: parameters must be finite");
  if (reflected && x0 < 0) throw std::invalid_argument("diffusion: reflected process needs x0 >= 0");
}

namespace {

template <class Sink>
void run_em(const DiffusionSpec& spec, const Grid& grid, Engine& eng, Sink&& sink) {
  boost::random::normal_distribution<double> z(0.0, 1.0);
  const double dt = grid.dt(), sd = spec.sigma * std::sqrt(dt);
  double x = spec.x0;
  sink(0, x);
  for (std::size_t k = 0; k < grid.steps; ++k) {
    x += (spec.drift_eta - spec.theta * x) * dt + sd * z(eng);
    if (spec.reflected && x < 0) x = 0.0;
    sink(k + 1, x);
  }
}

}  // namespace

std::vector<StepPath> simulate_ou(const DiffusionSpec& spec, const Grid& grid, std::size_t reps, std::uint64_t seed) {
  spec.validate();
  std::vector<StepPath> out(reps);
  parallel_for(reps, [&](std::size_t r) {
    Engine eng = make_engine(seed, r);
    std::vector<double> v(grid.nodes());
    run_em(spec, grid, eng, [&](std::size_t k, double x) { v[k] = x; });
    out[r] = StepPath(grid, std::move(v));
  });
  return out;
}

std::vector<double> simulate_ou_endpoints(const DiffusionSpec& spec, const Grid& grid, std::size_t reps,
                                          std::uint64_t seed) {
  spec.validate();
  std::vector<double> out(reps);
  parallel_for(reps, [&](std::size_t r) {
    Engine eng = make_engine(seed, r);
    run_em(spec, grid, eng, [&](std::size_t, double x) { out[r] = x; });
  });
  return out;
}

double ou_mean(const DiffusionSpec& s, double t) {
  if (s.theta == 0.0) return s.x0 + s.drift_eta * t;
  return s.x0 * std::exp(-s.theta * t) - (s.drift_eta / s.theta) * std::expm1(-s.theta * t);
}

double ou_variance(const DiffusionSpec& s, double t) {
  if (s.theta == 0.0) return s.sigma * s.sigma * t;
  return s.sigma * s.sigma * (-std::expm1(-2.0 * s.theta * t)) / (2.0 * s.theta);
}

StationaryMoments stationary_moments(const RateParams& p, double eta) {
  if (!(p.theta > 0)) throw std::invalid_argument("stationary_moments: theta must be > 0");
  const double th = p.theta;
  return {eta / th, p.sigma_x * p.sigma_x / (2 * th) + p.mu * p.mu * p.sigma_theta * p.sigma_theta / (2 * th * th * th)};
}

SampleMoments sample_moments(const std::vector<double>& xs) {
  SampleMoments m;
  m.count = xs.size();
  if (xs.empty()) return m;
  const double n = static_cast<double>(xs.size());
  double s = 0;
  for (double x : xs) s += x;
  m.mean = s / n;
  double m2 = 0, m4 = 0;
  for (double x : xs) {
    double d = x - m.mean;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  if (xs.size() > 1) {
    m.var = m2 / (n - 1);
    m.se_mean = std::sqrt(m.var / n);
    double mu4 = m4 / n, mu2 = m2 / n;
    m.se_var = std::sqrt(std::max(0.0, mu4 - mu2 * mu2) / n);
  }
  return m;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 0.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(i / na - j / nb));
  }
  return d;
}

std::string to_string(FcltCase c) {
  switch (c) {
    case FcltCase::i: return "i";
    case FcltCase::ii: return "ii";
    case FcltCase::iii: return "iii";
  }
  return "?";
}

FcltCase fclt_case_of(double mu, double theta) {
  if (mu > 0 && theta > 0) return FcltCase::i;
  if (mu == 0 && theta >= 0) return FcltCase::ii;
  if (mu < 0) return FcltCase::iii;
  throw std::invalid_argument("fclt: regime has no stable fluid fixed point (need mu > 0 & theta > 0, mu = 0 & theta >= 0, or mu < 0)");
}

FcltReport fclt_check(const ModelParams& params, double eta, double n, double t_eval, std::size_t reps,
                      std::uint64_t seed, double delta) {
  if (reps < 2) throw std::invalid_argument("fclt_check: need at least 2 replications");
  if (!(t_eval > 0)) throw std::invalid_argument("fclt_check: t must be > 0");
  FcltReport rep;
  rep.fclt_case = fclt_case_of(params.mu(), params.theta());
  rep.n = n;
  rep.t_eval = t_eval;
  rep.reps = reps;
  rep.delta = delta;

  ModelParams q = params;
  q.r = 0.0;
  q.eta = eta;
  q.md_offset = 0.0;
  q.horizon = t_eval;
  q.w0 = classify_w(q.mu(), q.theta()).stable_point.value_or(0.0);

  std::vector<double> endpoint(reps), supabs(reps);
  std::vector<unsigned char> l_active(reps, 0);
  parallel_for(reps, [&](std::size_t r) {
    SimOutput out = simulate_w(q, n, derive_seed(seed, r));
    endpoint[r] = out.diffusion_view.at(t_eval);
    supabs[r] = sup_norm(out.diffusion_view);
    l_active[r] = out.l_path.back() > 0.0;
  });
  SampleMoments qm = sample_moments(endpoint);
  rep.queue.empirical_mean = qm.mean;
  rep.queue.empirical_var = qm.var;
  rep.queue.se_mean = qm.se_mean;
  rep.queue.se_var = qm.se_var;
  std::size_t active = 0;
  for (auto a : l_active) active += a;
  rep.l_active_fraction = static_cast<double>(active) / static_cast<double>(reps);

  const double sx = q.sigma_x(), st = q.sigma_theta(), mu = q.mu(), th = q.theta();
  Grid g = sim_grid(n, t_eval);
  std::uint64_t limit_seed = derive_seed(seed, 0xD1FFu);
  auto z = [](double a, double b, double se) { return se > 0 ? (a - b) / se : (a == b ? 0.0 : INFINITY); };

  if (rep.fclt_case == FcltCase::i) {
    DiffusionSpec spec{eta, th, std::sqrt(sx * sx + mu * mu * st * st / (th * th)), false, 0.0};
    RateParams rp{mu, th, sx, st, 0.0, Center::positive, 0.0};
    StationaryMoments sm = stationary_moments(rp, eta);
    rep.queue.target_mean = sm.m;
    rep.queue.target_var = sm.s2;
    rep.marginal_mean = ou_mean(spec, g.horizon);
    rep.marginal_var = ou_variance(spec, g.horizon);
    std::vector<double> lim = simulate_ou_endpoints(spec, g, reps, limit_seed);
    rep.limit = sample_moments(lim);
    rep.ks = ks_statistic(endpoint, lim);
    rep.limit_samples = std::move(lim);
    rep.queue.z_mean = z(qm.mean, sm.m, qm.se_mean);
    rep.queue.z_var = z(qm.var, sm.s2, qm.se_var);
  } else if (rep.fclt_case == FcltCase::ii) {
    DiffusionSpec spec{eta, th, sx, true, 0.0};
    std::vector<double> lim = simulate_ou_endpoints(spec, g, reps, limit_seed);
    rep.limit = sample_moments(lim);
    rep.ks = ks_statistic(endpoint, lim);
    rep.limit_samples = std::move(lim);
    rep.queue.target_mean = rep.limit.mean;
    rep.queue.target_var = rep.limit.var;
    rep.queue.z_mean = z(qm.mean, rep.limit.mean, std::hypot(qm.se_mean, rep.limit.se_mean));
    rep.queue.z_var = z(qm.var, rep.limit.var, std::hypot(qm.se_var, rep.limit.se_var));
  } else {
    rep.queue.target_mean = 0.0;
    rep.queue.target_var = 0.0;
    rep.queue.z_mean = z(qm.mean, 0.0, qm.se_mean);
    rep.queue.z_var = z(qm.var, 0.0, qm.se_var);
    std::size_t hits = 0;
    for (double s : supabs) hits += s > delta;
    rep.sup_exceed = static_cast<double>(hits) / static_cast<double>(reps);
  }
  rep.queue_samples = std::move(endpoint);
  return rep;
}

}  // namespace wdq
