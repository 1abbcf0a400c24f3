#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wdq/distributions.hpp"
#include "wdq/ratefn.hpp"
#include "wdq/recursion.hpp"

namespace wdq {

// Rate-function case governing the MD-scaled process, if the regime has one.
std::optional<RateCase> rate_case_for(const ModelParams& p, Process process);
RateParams rate_params_for(const ModelParams& p, Process process);

// inf of the rate function over the event's path set.
EndpointTarget event_target(const ModelParams& p, Process process, const TailEvent& event, std::size_t steps = 200);

struct DecayRung {
  double n = 0;
  double b_n = 0;
  TailSample sample;
  std::optional<double> rate;  // -log(p_hat) / b_n^2 when p_hat > 0
  bool censored = false;       // zero count: only a lower bound on the rate is known
  double rate_lower_bound = 0;
};

enum class Trend { toward, away, mixed, insufficient };
std::string to_string(Trend t);

struct DecayEstimate {
  std::vector<DecayRung> rungs;
  std::optional<double> target;
  std::optional<double> target_exact;
  Trend trend = Trend::insufficient;
  // Last-rung rate within +-30% of the target.
  bool last_within_band = false;
  double band = 0.3;
};

struct DecayOptions {
  Process process = Process::w;
  Estimator estimator = Estimator::plain;
  std::size_t target_steps = 200;
};

// Rung k uses seed derive_seed(seed, k).
DecayEstimate estimate_decay(const ModelParams& p, const TailEvent& event, const std::vector<double>& n_ladder,
                             std::size_t reps, std::uint64_t seed, const DecayOptions& opt = {});

// Trend of |rate - target| along the rungs that have a rate.
Trend rate_trend(const std::vector<DecayRung>& rungs, double target);

}  // namespace wdq
