#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "wdq/distributions.hpp"
#include "wdq/rng.hpp"

namespace wdq {

// Short explicit noise sequence, small enough to expand symbolically.
struct SmallInstance {
  std::vector<double> theta, x;
  double n = 1;
  double initial = 0;
  std::size_t length() const { return x.size(); }
};

inline constexpr std::size_t kMaxInstanceLength = 12;

// Random instance with length in [1, max_len]; `allow_negative_c` draws n small enough
// that some coefficients C = 1 - theta/n fall below zero.
SmallInstance random_small_instance(Engine& eng, bool allow_negative_c, std::size_t max_len = kMaxInstanceLength);

// V_i = X_{i-1} + C_{i-1} X_{i-2} + ... + C_{i-1}...C_1 X_0 + C_{i-1}...C_0 V_0.
double expand_v(const SmallInstance& inst, std::size_t i);
// Sum of absolute values of the terms in expand_v, for relative tolerances.
double expand_v_scale(const SmallInstance& inst, std::size_t i);
// Upsilon_i as the explicit maximum over 0, the suffix product-sums and the full V_i.
double expand_upsilon(const SmallInstance& inst, std::size_t i);

struct GronwallResult {
  bool holds = true;
  double max_ratio = 0;  // max_k u_k / bound_k
  std::vector<double> u, bound;
};
// Builds u_{k+1} = (1 + alpha) u_k + b_k with equality and checks u_k <= e^{k alpha}(u0 + sum_{j<k} b_j).
GronwallResult gronwall_check(double u0, double alpha, std::span<const double> b);

struct FwllnRow {
  double n = 0;
  double median_sup_error = 0;
  double mean_sup_error = 0;
};
struct FwllnReport {
  std::vector<FwllnRow> rows;
  bool decreasing = true;  // median error strictly decreasing along the ladder
};
// sup_t |(1/n) sum_{i < floor(nt)} X_{n,i} - mu t| on [0, T] for X_{n,i} ~ base shifted by c/sqrt(n).
FwllnReport fwlln_check(const DistributionSpec& base, double drift_c, const std::vector<double>& n_ladder,
                        std::size_t reps, std::uint64_t seed, double horizon = 1.0);

struct SuiteRow {
  std::string name;
  std::size_t instances = 0;
  std::size_t failures = 0;
  double worst = 0;  // largest normalized discrepancy seen
  bool pass() const { return failures == 0; }
};

// Runs every oracle cross-check against the main modules.
std::vector<SuiteRow> run_oracle_suite(std::size_t instances, std::uint64_t seed);

}  // namespace wdq
