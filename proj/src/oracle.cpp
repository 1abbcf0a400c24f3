#include "wdq/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_int_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include "wdq/recursion.hpp"

namespace wdq {

SmallInstance random_small_instance(Engine& eng, bool allow_negative_c, std::size_t max_len) {
  boost::random::uniform_int_distribution<std::size_t> len(1, max_len);
  boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
  boost::random::normal_distribution<double> z(0.0, 1.0);
  SmallInstance s;
  const std::size_t m = len(eng);
  s.n = allow_negative_c ? 1.0 + std::floor(4.0 * unit(eng)) : 10.0 + std::floor(1000.0 * unit(eng));
  s.initial = 3.0 * unit(eng);
  s.theta.resize(m);
  s.x.resize(m);
  for (std::size_t i = 0; i < m; ++i) {
    s.theta[i] = allow_negative_c ? 4.0 * z(eng) : 2.0 * z(eng);
    s.x[i] = z(eng) - 0.2;
  }
  if (!allow_negative_c)
    for (double& t : s.theta) t = std::min(t, s.n);
  return s;
}

namespace {

double coef(const SmallInstance& s, std::size_t l) { return 1.0 - s.theta[l] / s.n; }

// prod_{l=from}^{to-1} C_l (empty product = 1)
double product(const SmallInstance& s, std::size_t from, std::size_t to) {
  double p = 1.0;
  for (std::size_t l = from; l < to; ++l) p *= coef(s, l);
  return p;
}

}  // namespace

double expand_v(const SmallInstance& s, std::size_t i) {
  if (i > s.length()) throw std::out_of_range("expand_v: index beyond instance");
  double v = product(s, 0, i) * s.initial;
  for (std::size_t j = 0; j < i; ++j) v += product(s, j + 1, i) * s.x[j];
  return v;
}

double expand_v_scale(const SmallInstance& s, std::size_t i) {
  double v = std::fabs(product(s, 0, i) * s.initial);
  for (std::size_t j = 0; j < i; ++j) v += std::fabs(product(s, j + 1, i) * s.x[j]);
  return v;
}

double expand_upsilon(const SmallInstance& s, std::size_t i) {
  if (i > s.length()) throw std::out_of_range("expand_upsilon: index beyond instance");
  if (i == 0) return s.initial;
  // Terms of Upsilon_i: 0, X_{i-1}, X_{i-1} + C_{i-1} X_{i-2}, ... down to X_1, then the full V_i.
  double best = 0.0;
  for (std::size_t k = 1; k < i; ++k) {
    double term = 0.0;
    for (std::size_t j = i - k; j < i; ++j) term += product(s, j + 1, i) * s.x[j];
    best = std::max(best, term);
  }
  return std::max(best, expand_v(s, i));
}

GronwallResult gronwall_check(double u0, double alpha, std::span<const double> b) {
  if (!(u0 >= 0)) throw std::invalid_argument("gronwall_check: u0 must be >= 0");
  if (!(alpha >= 0)) throw std::invalid_argument("gronwall_check: alpha must be >= 0");
  for (double v : b)
    if (!(v >= 0)) throw std::invalid_argument("gronwall_check: b must be nonnegative");
  GronwallResult r;
  r.u.push_back(u0);
  r.bound.push_back(u0);
  double sum_b = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    r.u.push_back((1.0 + alpha) * r.u.back() + b[k]);
    sum_b += b[k];
    r.bound.push_back(std::exp(static_cast<double>(k + 1) * alpha) * (u0 + sum_b));
  }
  for (std::size_t k = 0; k < r.u.size(); ++k) {
    double slack = 1e-12 * std::max(1.0, r.bound[k]);
    if (r.u[k] > r.bound[k] + slack) r.holds = false;
    if (r.bound[k] > 0) r.max_ratio = std::max(r.max_ratio, r.u[k] / r.bound[k]);
  }
  return r;
}

FwllnReport fwlln_check(const DistributionSpec& base, double drift_c, const std::vector<double>& n_ladder,
                        std::size_t reps, std::uint64_t seed, double horizon) {
  if (reps == 0) throw std::invalid_argument("fwlln_check: reps must be >= 1");
  const double mu = base.declared_mean();
  FwllnReport rep;
  for (std::size_t rung = 0; rung < n_ladder.size(); ++rung) {
    const double n = n_ladder[rung];
    const std::size_t m = static_cast<std::size_t>(std::floor(n * horizon * (1.0 + 1e-12)));
    DistributionSpec law = base.shifted(drift_c / std::sqrt(n));
    std::vector<double> err(reps);
    parallel_for(reps, [&](std::size_t r) {
      Engine eng = make_engine(derive_seed(seed, rung), r);
      Sampler s(law);
      double sum = 0.0, e = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        // S is constant on [k/n, (k+1)/n): compare against mu t at both ends.
        double sk = sum / n;
        e = std::max({e, std::fabs(sk - mu * k / n), std::fabs(sk - mu * (k + 1) / n)});
        sum += s(eng);
      }
      e = std::max(e, std::fabs(sum / n - mu * m / n));
      err[r] = e;
    });
    FwllnRow row;
    row.n = n;
    double tot = 0;
    for (double e : err) tot += e;
    row.mean_sup_error = tot / reps;
    std::vector<double> sorted = err;
    std::sort(sorted.begin(), sorted.end());
    row.median_sup_error = sorted[(reps - 1) / 2];
    if (!rep.rows.empty() && !(row.median_sup_error < rep.rows.back().median_sup_error)) rep.decreasing = false;
    rep.rows.push_back(row);
  }
  return rep;
}

std::vector<SuiteRow> run_oracle_suite(std::size_t instances, std::uint64_t seed) {
  std::vector<SuiteRow> rows;
  auto rel = [](double a, double b, double scale) { return std::fabs(a - b) / std::max(1.0, scale); };

  {
    SuiteRow row{"expand_v vs linear recursion", instances};
    for (std::size_t t = 0; t < instances; ++t) {
      Engine eng = make_engine(seed, t);
      SmallInstance s = random_small_instance(eng, t % 2 == 1);
      std::vector<double> v = run_linear(s.theta, s.x, s.n, s.initial);
      bool ok = true;
      for (std::size_t i = 0; i <= s.length(); ++i) {
        double e = rel(v[i], expand_v(s, i), expand_v_scale(s, i));
        row.worst = std::max(row.worst, e);
        if (e > 1e-12) ok = false;
      }
      row.failures += !ok;
    }
    rows.push_back(row);
  }
  {
    SuiteRow row{"expand_upsilon vs bounding recursion", instances};
    for (std::size_t t = 0; t < instances; ++t) {
      Engine eng = make_engine(seed ^ 0x55, t);
      SmallInstance s = random_small_instance(eng, t % 2 == 1);
      std::vector<double> u = run_upsilon(s.theta, s.x, s.n, s.initial);
      bool ok = true;
      for (std::size_t i = 0; i <= s.length(); ++i) {
        double e = rel(u[i], expand_upsilon(s, i), expand_v_scale(s, i));
        row.worst = std::max(row.worst, e);
        if (e > 1e-12) ok = false;
      }
      row.failures += !ok;
    }
    rows.push_back(row);
  }
  {
    SuiteRow row{"waiting time below upsilon", instances};
    for (std::size_t t = 0; t < instances; ++t) {
      Engine eng = make_engine(seed ^ 0xAA, t);
      SmallInstance s = random_small_instance(eng, t % 2 == 1);
      ReflectedRun w = run_reflected(s.theta, s.x, s.n, s.initial);
      bool ok = true;
      for (std::size_t i = 0; i <= s.length(); ++i) {
        double up = expand_upsilon(s, i);
        double excess = (w.w[i] - up) / std::max(1.0, expand_v_scale(s, i));
        row.worst = std::max(row.worst, excess);
        if (w.w[i] < 0 || excess > 1e-12) ok = false;
      }
      row.failures += !ok;
    }
    rows.push_back(row);
  }
  {
    // With every C >= 0 the bounding recursion equals max(U'_0..U'_{i-1}, V'_i), where
    // U'_k = X'_0 + C'_0 X'_1 + ... + C'_0...C'_{k-2} X'_{k-1} on the reversed stream X'_j = X_{i-1-j}.
    SuiteRow row{"upsilon max-expansion on reversed stream", instances};
    for (std::size_t t = 0; t < instances; ++t) {
      Engine eng = make_engine(seed ^ 0x77, t);
      SmallInstance s = random_small_instance(eng, false);
      std::vector<double> ups = run_upsilon(s.theta, s.x, s.n, s.initial);
      bool ok = true;
      for (std::size_t i = 1; i <= s.length(); ++i) {
        double u = 0.0, prod = 1.0, m = 0.0;
        for (std::size_t k = 0; k < i; ++k) {
          m = std::max(m, u);  // U'_k
          std::size_t j = i - 1 - k;
          u += prod * s.x[j];
          prod *= coef(s, j);
        }
        double vi = u + prod * s.initial;
        double e = rel(std::max(m, vi), ups[i], expand_v_scale(s, i));
        row.worst = std::max(row.worst, e);
        if (e > 1e-12) ok = false;
      }
      row.failures += !ok;
    }
    rows.push_back(row);
  }
  {
    SuiteRow row{"discrete gronwall bound", instances};
    for (std::size_t t = 0; t < instances; ++t) {
      Engine eng = make_engine(seed ^ 0x99, t);
      boost::random::uniform_real_distribution<double> unit(0.0, 1.0);
      std::size_t len = 1 + static_cast<std::size_t>(49 * unit(eng));
      double u0 = 5 * unit(eng), alpha = 0.5 * unit(eng);
      std::vector<double> b(len);
      for (double& v : b) v = 2 * unit(eng);
      GronwallResult g = gronwall_check(u0, alpha, b);
      row.worst = std::max(row.worst, g.max_ratio);
      row.failures += !g.holds;
    }
    rows.push_back(row);
  }
  {
    SuiteRow row{"fwlln sup error shrinks", instances};
    std::vector<double> ladder{100, 1000, 10000};
    FwllnReport a = fwlln_check(DistributionSpec::normal(0.5, 1.0), 0.0, ladder, instances, seed ^ 0x11);
    FwllnReport b = fwlln_check(DistributionSpec::normal(0.5, 1.0), 1.0, ladder, instances, seed ^ 0x22);
    FwllnReport c = fwlln_check(DistributionSpec::point_mass(0.5), 0.0, ladder, 1, seed ^ 0x33);
    row.failures += !a.decreasing;
    row.failures += !b.decreasing;
    for (const auto& r : c.rows) {
      double e = r.median_sup_error - 0.5 / r.n;
      row.worst = std::max(row.worst, e);
      if (e > 1e-12) ++row.failures;
    }
    row.worst = std::max(row.worst, a.rows.back().median_sup_error);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wdq
