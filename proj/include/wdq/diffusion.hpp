#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wdq/distributions.hpp"
#include "wdq/paths.hpp"
#include "wdq/ratefn.hpp"

namespace wdq {

// dX = (eta - theta X) dt + sigma dB, optionally reflected at 0.
struct DiffusionSpec {
  double drift_eta = 0;
  double theta = 0;
  double sigma = 1;
  bool reflected = false;
  double x0 = 0;
  void validate() const;
};

// Euler-Maruyama; with reflection the positive part is taken after every step.
std::vector<StepPath> simulate_ou(const DiffusionSpec& spec, const Grid& grid, std::size_t reps, std::uint64_t seed);
// Same scheme, keeping only the value at the final grid node.
std::vector<double> simulate_ou_endpoints(const DiffusionSpec& spec, const Grid& grid, std::size_t reps,
                                          std::uint64_t seed);

// Exact time-t mean and variance of the unreflected process.
double ou_mean(const DiffusionSpec& spec, double t);
double ou_variance(const DiffusionSpec& spec, double t);

struct StationaryMoments {
  double m = 0, s2 = 0;
};
// m = eta/theta, s2 = sigma_x^2/(2 theta) + mu^2 sigma_theta^2/(2 theta^3).
StationaryMoments stationary_moments(const RateParams& p, double eta);

struct SampleMoments {
  double mean = 0, var = 0, se_mean = 0, se_var = 0;
  std::size_t count = 0;
};
SampleMoments sample_moments(const std::vector<double>& xs);
double ks_statistic(std::vector<double> a, std::vector<double> b);

enum class FcltCase { i, ii, iii };  // mu > 0 & theta > 0;  mu = 0 & theta >= 0;  mu < 0
std::string to_string(FcltCase c);
FcltCase fclt_case_of(double mu, double theta);

struct MomentReport {
  double empirical_mean = 0, empirical_var = 0;
  double se_mean = 0, se_var = 0;
  double target_mean = 0, target_var = 0;
  double z_mean = 0, z_var = 0;
};

struct FcltReport {
  FcltCase fclt_case = FcltCase::i;
  double n = 0, t_eval = 0;
  std::size_t reps = 0;
  // Queue diffusion view at t_eval against the limit's stationary moments (case i),
  // against a simulated limit (case ii), or against 0 (case iii).
  MomentReport queue;
  // Exact time-t moments of the limit (case i only).
  std::optional<double> marginal_mean, marginal_var;
  // Simulated limit diffusion at the same t with step 1/n.
  SampleMoments limit;
  double ks = 0;                   // descriptive only
  double l_active_fraction = 0;    // replications with a positive regulator by t_eval
  std::optional<double> sup_exceed;  // case iii: P(sup |W_hat| > delta)
  double delta = 0;
  std::vector<double> queue_samples, limit_samples;
};

// Starts the queue at its fluid fixed point, sets r = 0 and uses mu_n = mu + eta/sqrt(n).
FcltReport fclt_check(const ModelParams& params, double eta, double n, double t_eval, std::size_t reps,
                      std::uint64_t seed, double delta = 0.5);

}  // namespace wdq
