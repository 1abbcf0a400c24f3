#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wdq/distributions.hpp"
#include "wdq/paths.hpp"

namespace wdq {

enum class Load { overloaded, critical, underloaded };  // mu > 0, mu = 0, mu < 0
enum class ThetaSign { pos, zero, neg };

struct RegimeClassification {
  Load load = Load::critical;
  ThetaSign theta_sign = ThetaSign::zero;
  std::optional<double> stable_point;
  // Set for W with mu < 0, theta < 0: 0 attracts only when w0 < mu/theta.
  bool initial_condition_dependent = false;
  // Non-attracting fixed point reported alongside the table cell (mu/theta there).
  std::optional<double> unstable_fixed_point;

  bool stable() const { return stable_point.has_value(); }
};

std::string to_string(Load l);
std::string to_string(ThetaSign s);
std::string describe(const RegimeClassification& c);

RegimeClassification classify_w(double mu, double theta);
RegimeClassification classify_v(double mu, double theta);

// First time the reflected fluid path reaches zero; empty when it never does.
std::optional<double> fluid_hitting_time(double mu, double theta, double w0);
double fluid_w_at(double mu, double theta, double w0, double t);
double fluid_v_at(double mu, double theta, double v0, double t);
StepPath fluid_w(double mu, double theta, double w0, const Grid& grid);
StepPath fluid_v(double mu, double theta, double v0, const Grid& grid);

enum class Process { w, v };

struct ConvergenceRow {
  double n = 0;
  std::size_t reps = 0;
  double mean_sup_error = 0;
  double se = 0;
  double median = 0;
  double q90 = 0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;
  // Mean error nonincreasing along the ladder up to one standard error of the larger rung.
  bool nonincreasing = true;
};

ConvergenceReport fluid_convergence_report(const ModelParams& params, const std::vector<double>& n_ladder,
                                           std::size_t reps, std::uint64_t seed, Process process = Process::w);

}  // namespace wdq
