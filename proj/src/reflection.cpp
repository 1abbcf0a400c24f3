#include "wdq/reflection.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace wdq {

namespace {

void require_start(const StepPath& x, const char* who) {
  if (x.size() == 0 || x[0] < 0.0) throw std::invalid_argument(std::string(who) + ": x(0) must be >= 0");
}

}  // namespace

ReflectionPair reflect(const StepPath& x) {
  require_start(x, "reflect");
  std::vector<double> z(x.size()), l(x.size());
  double sup = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sup = std::max(sup, -x[k]);
    l[k] = sup;
    z[k] = x[k] + sup;
  }
  return {StepPath(x.grid(), std::move(z)), StepPath(x.grid(), std::move(l))};
}

StepPath map_m(const StepPath& x, double theta) {
  const double h = theta * x.grid().dt();
  std::vector<double> u(x.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    u[k] = x[k] - h * acc;
    acc += u[k];
  }
  return StepPath(x.grid(), std::move(u));
}

ReflectionPair reflect_theta(const StepPath& x, double theta) {
  require_start(x, "reflect_theta");
  if (theta == 0.0) return reflect(x);
  const double h = theta * x.grid().dt();
  std::vector<double> z(x.size()), l(x.size());
  z[0] = x[0];
  l[0] = 0.0;
  for (std::size_t k = 0; k + 1 < x.size(); ++k) {
    double y = z[k] + (x[k + 1] - x[k]) - h * z[k];
    if (y < 0.0) {
      l[k + 1] = l[k] - y;
      z[k + 1] = 0.0;
    } else {
      l[k + 1] = l[k];
      z[k + 1] = y;
    }
  }
  return {StepPath(x.grid(), std::move(z)), StepPath(x.grid(), std::move(l))};
}

bool theta_step_unstable(double theta, const Grid& grid) { return std::fabs(theta) * grid.dt() >= 1.0; }

PicardResult map_m_reflected(const StepPath& x, double theta, std::size_t max_iter, double tol) {
  require_start(x, "map_m_reflected");
  PicardResult res{x, 0, false, 0.0};
  for (std::size_t it = 1; it <= max_iter; ++it) {
    StepPath next = x - theta * integrate(reflect(res.u).z);
    res.last_change = sup_distance(next, res.u);
    res.u = std::move(next);
    res.iterations = it;
    if (res.last_change < tol) {
      res.converged = true;
      break;
    }
  }
  return res;
}

double complementarity(const ReflectionPair& p) {
  double s = 0.0;
  for (std::size_t k = 1; k < p.z.size(); ++k) s += p.z[k] * (p.l[k] - p.l[k - 1]);
  return s;
}

double complementarity_tolerance(const ReflectionPair& p, double rel) { return rel * sup_norm(p.z) * p.l.back(); }

bool valid_reflection_pair(const ReflectionPair& p, std::string* why) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (!p.z.nonnegative()) return fail("z has a negative value");
  if (p.l[0] != 0.0) return fail("l(0) != 0");
  for (std::size_t k = 1; k < p.l.size(); ++k)
    if (p.l[k] < p.l[k - 1]) return fail("l decreases");
  if (std::fabs(complementarity(p)) > complementarity_tolerance(p)) return fail("complementarity violated");
  return true;
}

bool comparison_holds(const StepPath& x, const StepPath& y, double slack) {
  if (!y.nonnegative()) throw std::invalid_argument("comparison_holds: y must be nonnegative");
  for (std::size_t k = 1; k < y.size(); ++k)
    if (y[k] < y[k - 1]) throw std::invalid_argument("comparison_holds: y must be nondecreasing");
  require_start(x, "comparison_holds");
  StepPath zx = reflect(x).z;
  StepPath zxy = reflect(x + y).z;
  for (std::size_t k = 0; k < zx.size(); ++k)
    if (zxy[k] < zx[k] - slack) return false;
  return true;
}

}  // namespace wdq
