#pragma once

#include <cstddef>
#include <string>

#include "wdq/paths.hpp"

namespace wdq {

struct ReflectionPair {
  StepPath z;  // regulated path
  StepPath l;  // regulator
};

// l = running sup of (-x)^+, z = x + l.
ReflectionPair reflect(const StepPath& x);
// u_k = x_k - theta dt sum_{j<k} u_j.
StepPath map_m(const StepPath& x, double theta);
// z_{k+1} = (z_k + dx_{k+1} - theta dt z_k)^+, l collects the clipped amounts.
ReflectionPair reflect_theta(const StepPath& x, double theta);

// True when |theta| dt >= 1, where the explicit scheme stops being contractive.
bool theta_step_unstable(double theta, const Grid& grid);

struct PicardResult {
  StepPath u;
  std::size_t iterations = 0;
  bool converged = false;
  double last_change = 0;
};
// Iterates u <- x - theta * integrate(reflect(u).z) until the sup change drops below tol.
PicardResult map_m_reflected(const StepPath& x, double theta, std::size_t max_iter = 10000, double tol = 1e-12);

// sum_k z(t_k) * (l(t_k) - l(t_{k-1})).
double complementarity(const ReflectionPair& p);
// 1e-8 * sup|z| * l(T), the default tolerance for `complementarity`.
double complementarity_tolerance(const ReflectionPair& p, double rel = 1e-8);
// z >= 0, l nondecreasing, l(0) = 0 and complementarity within tolerance.
bool valid_reflection_pair(const ReflectionPair& p, std::string* why = nullptr);

// reflect(x + y).z >= reflect(x).z pointwise, for y >= 0 nondecreasing.
bool comparison_holds(const StepPath& x, const StepPath& y, double slack = 1e-12);

}  // namespace wdq
