#include "wdq/tailprob.hpp"

#include <cmath>
#include <stdexcept>

#include "wdq/rng.hpp"

namespace wdq {

std::optional<RateCase> rate_case_for(const ModelParams& p, Process process) {
  const double mu = p.mu(), th = p.theta();
  if (process == Process::w) {
    if (mu > 0 && th > 0) return RateCase::w_pos;
    if (mu == 0 && th >= 0) return RateCase::w_zero;
    return std::nullopt;
  }
  if (th > 0 && mu != 0) return RateCase::v_pos;
  if (mu == 0 && th >= 0) return RateCase::v_zero;
  return std::nullopt;
}

RateParams rate_params_for(const ModelParams& p, Process process) {
  auto c = rate_case_for(p, process);
  if (!c) throw std::invalid_argument("regime has no moderate-deviation rate function");
  RateParams rp;
  rp.mu = p.mu();
  rp.theta = p.theta();
  rp.sigma_x = p.sigma_x();
  rp.sigma_theta = p.sigma_theta();
  rp.r = p.r;
  rp.center = center_of(*c);
  rp.initial = p.md_offset;
  return rp;
}

EndpointTarget event_target(const ModelParams& p, Process process, const TailEvent& event, std::size_t steps) {
  auto c = rate_case_for(p, process);
  if (!c) throw std::invalid_argument("regime has no moderate-deviation rate function");
  RateParams rp = rate_params_for(p, process);
  if (event.kind == TailKind::endpoint) return endpoint_target_at_least(rp, event.a, *c, p.horizon, steps);
  return sup_target(rp, event.a, *c, p.horizon, steps);
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::toward: return "toward";
    case Trend::away: return "away";
    case Trend::mixed: return "mixed";
    case Trend::insufficient: return "insufficient";
  }
  return "?";
}

Trend rate_trend(const std::vector<DecayRung>& rungs, double target) {
  std::vector<double> dist;
  for (const auto& r : rungs)
    if (r.rate) dist.push_back(std::fabs(*r.rate - target));
  if (dist.size() < 2) return Trend::insufficient;
  bool all_down = true, all_up = true;
  for (std::size_t i = 1; i < dist.size(); ++i) {
    if (!(dist[i] < dist[i - 1])) all_down = false;
    if (!(dist[i] > dist[i - 1])) all_up = false;
  }
  if (all_down) return Trend::toward;
  if (all_up) return Trend::away;
  return Trend::mixed;
}

DecayEstimate estimate_decay(const ModelParams& p, const TailEvent& event, const std::vector<double>& n_ladder,
                             std::size_t reps, std::uint64_t seed, const DecayOptions& opt) {
  DecayEstimate est;
  if (rate_case_for(p, opt.process)) {
    EndpointTarget t = event_target(p, opt.process, event, opt.target_steps);
    est.target = t.value;
    est.target_exact = t.exact;
  }
  TailOptions topt;
  topt.process = opt.process;
  topt.estimator = opt.estimator;
  for (std::size_t k = 0; k < n_ladder.size(); ++k) {
    DecayRung r;
    r.n = n_ladder[k];
    r.b_n = p.b(r.n);
    r.sample = md_tail_sample(p, r.n, event, reps, derive_seed(seed, k), topt);
    const double b2 = r.b_n * r.b_n;
    if (r.sample.p_hat > 0) {
      r.rate = -std::log(r.sample.p_hat) / b2;
    } else {
      r.censored = true;
      r.rate_lower_bound = -std::log(r.sample.upper95) / b2;
    }
    est.rungs.push_back(r);
  }
  if (est.target) {
    est.trend = rate_trend(est.rungs, *est.target);
    const auto& last = est.rungs.back();
    est.last_within_band = last.rate && std::fabs(*last.rate - *est.target) <= est.band * *est.target;
  }
  return est;
}

}  // namespace wdq
