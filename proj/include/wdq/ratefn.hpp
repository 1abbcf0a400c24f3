#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>

#include "wdq/paths.hpp"

namespace wdq {

inline constexpr double kInfiniteRate = std::numeric_limits<double>::infinity();
inline bool is_infinite_rate(double v) { return v == kInfiniteRate; }

enum class Center { positive, zero };
enum class RateCase { w_pos, w_zero, v_pos, v_zero };

std::string to_string(RateCase c);
RateCase rate_case_from_string(const std::string& s);  // w-pos, w-zero, v-pos, v-zero
bool reflected_case(RateCase c);
Center center_of(RateCase c);

struct RateParams {
  double mu = 0, theta = 0, sigma_x = 1, sigma_theta = 0, r = 0;
  Center center = Center::zero;
  double initial = 0;  // w0 or v0 at moderate-deviation scale
};

// Throws std::invalid_argument when the parameters do not fit the case.
void validate(const RateParams& p, RateCase c);
// Coefficient in front of the integral of (phi' - r + theta phi)^2.
double rate_kappa(const RateParams& p);

double rate_rw(const PiecewiseLinearPath& phi, double sigma);
double rate_w_positive(const PiecewiseLinearPath& phi, const RateParams& p);
double rate_w_zero(const PiecewiseLinearPath& phi, const RateParams& p);
double rate_v(const PiecewiseLinearPath& phi, const RateParams& p, Center c);
double rate(const PiecewiseLinearPath& phi, const RateParams& p, RateCase c);

// I_Theta for sigma_theta >= 0: with sigma_theta = 0 only psi2 = 0 has finite cost.
double rate_theta_part(const PiecewiseLinearPath& psi2, double sigma_theta);

struct Decomposition {
  PiecewiseLinearPath psi1, psi2;
  std::optional<PiecewiseLinearPath> y;  // regulator, reflected case only
  double value = 0;                      // I_X(psi1) + I_Theta(psi2)
  double residual_sup = 0;               // constraint residual through map_m
  double euler_tolerance = 0;
};

// Minimizing (psi1, psi2) for the positive-centre cases.
Decomposition optimal_decomposition(const PiecewiseLinearPath& phi, const RateParams& p);
// Decomposition for any case (zero-centre cases: psi2 = 0, plus y when reflected).
Decomposition decomposition(const PiecewiseLinearPath& phi, const RateParams& p, RateCase c);

struct OracleResult {
  double value = 0;
  bool converged = false;
  std::size_t iterations = 0;
  double residual = 0;
  // Reflected case only: the zero-set program solved by grid search over y' >= 0.
  std::optional<double> grid_search_value;
};

// Minimizes I_X(psi1) + I_Theta(psi2) over piecewise-linear perturbations subject to
// the discretized constraint; independent of the closed-form evaluators.
OracleResult variational_oracle(const PiecewiseLinearPath& phi, const RateParams& p, RateCase c);

struct RateReport {
  RateCase rate_case = RateCase::v_zero;
  double value_closed_form = 0;
  double value_variational = 0;
  bool oracle_converged = false;
  Decomposition decomposition;
  double gap = 0;  // |variational - closed| / max(closed, 1e-300)
};

RateReport rate_report(const PiecewiseLinearPath& phi, const RateParams& p, RateCase c);

// Path whose cell integrand vanishes exactly; clamped at 0 for the reflected cases.
PiecewiseLinearPath zero_cost_path(const RateParams& p, RateCase c, const Grid& grid);

struct EndpointTarget {
  double value = 0;                // numerical minimum over piecewise-linear paths
  std::optional<double> exact;     // closed-form minimum where it applies
  bool converged = true;
  bool positivity_binding = false;
};

// inf { I(phi) : phi(0) = initial, phi(T) = a } on a grid with `steps` cells.
EndpointTarget endpoint_target(const RateParams& p, double a, RateCase c, double horizon, std::size_t steps = 200);
// inf over phi(T) >= a: zero when the zero-cost path already ends above a.
EndpointTarget endpoint_target_at_least(const RateParams& p, double a, RateCase c, double horizon,
                                        std::size_t steps = 200);
// inf over paths exceeding a at some time in (0, T].
EndpointTarget sup_target(const RateParams& p, double a, RateCase c, double horizon, std::size_t steps = 200);

}  // namespace wdq
