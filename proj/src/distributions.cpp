#include "wdq/distributions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

namespace wdq {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw std::invalid_argument(msg);
}

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

DistributionSpec::DistributionSpec(Family f) : family_(f) {
  std::visit(
      [this](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) {
          require(finite_all({d.mean, d.sd}) && d.sd >= 0.0, "normal: need finite mean and sd >= 0");
          mean_ = d.mean;
          var_ = d.sd * d.sd;
        } else if constexpr (std::is_same_v<T, ShiftedExponential>) {
          require(finite_all({d.rate, d.shift}) && d.rate > 0.0, "shifted_exponential: need rate > 0");
          mean_ = d.shift + 1.0 / d.rate;
          var_ = 1.0 / (d.rate * d.rate);
        } else if constexpr (std::is_same_v<T, Uniform>) {
          require(finite_all({d.a, d.b}) && d.a < d.b, "uniform: need a < b");
          mean_ = 0.5 * (d.a + d.b);
          var_ = (d.b - d.a) * (d.b - d.a) / 12.0;
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          require(finite_all({d.p, d.x_lo, d.x_hi}) && d.p >= 0.0 && d.p <= 1.0, "two_point: need p in [0,1]");
          mean_ = d.x_lo + d.p * (d.x_hi - d.x_lo);
          var_ = d.p * (1.0 - d.p) * (d.x_hi - d.x_lo) * (d.x_hi - d.x_lo);
        } else {
          require(std::isfinite(d.value), "point_mass: value must be finite");
          mean_ = d.value;
          var_ = 0.0;
        }
      },
      family_);
}

DistributionSpec DistributionSpec::from_name(std::string_view family, std::span<const double> params) {
  std::string f(family);
  std::transform(f.begin(), f.end(), f.begin(), [](unsigned char c) { return std::tolower(c); });
  auto need = [&](std::size_t k) {
    require(params.size() == k, f + ": expected " + std::to_string(k) + " parameters");
  };
  if (f == "normal" || f == "gaussian") {
    need(2);
    return normal(params[0], params[1]);
  }
  if (f == "shifted_exponential" || f == "exponential") {
    if (f == "exponential" && params.size() == 1) return shifted_exponential(params[0], 0.0);
    need(2);
    return shifted_exponential(params[0], params[1]);
  }
  if (f == "uniform") {
    need(2);
    return uniform(params[0], params[1]);
  }
  if (f == "two_point") {
    need(3);
    return two_point(params[0], params[1], params[2]);
  }
  if (f == "point_mass" || f == "constant") {
    need(1);
    return point_mass(params[0]);
  }
  static const char* heavy[] = {"pareto", "cauchy", "lognormal", "log_normal", "student_t", "t", "levy", "weibull"};
  for (const char* h : heavy)
    if (f == h) throw std::invalid_argument(f + ": heavy-tailed family without a finite moment generating function");
  throw std::invalid_argument("unknown distribution family: " + f);
}

std::string DistributionSpec::name() const {
  return std::visit(
      [](const auto& d) -> std::string {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) return "normal";
        else if constexpr (std::is_same_v<T, ShiftedExponential>) return "shifted_exponential";
        else if constexpr (std::is_same_v<T, Uniform>) return "uniform";
        else if constexpr (std::is_same_v<T, TwoPoint>) return "two_point";
        else return "point_mass";
      },
      family_);
}

std::vector<double> DistributionSpec::params() const {
  return std::visit(
      [](const auto& d) -> std::vector<double> {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) return {d.mean, d.sd};
        else if constexpr (std::is_same_v<T, ShiftedExponential>) return {d.rate, d.shift};
        else if constexpr (std::is_same_v<T, Uniform>) return {d.a, d.b};
        else if constexpr (std::is_same_v<T, TwoPoint>) return {d.p, d.x_lo, d.x_hi};
        else return {d.value};
      },
      family_);
}

double DistributionSpec::declared_sd() const { return std::sqrt(var_); }

DistributionSpec DistributionSpec::shifted(double delta) const {
  if (delta == 0.0) return *this;
  return std::visit(
      [delta](const auto& d) -> DistributionSpec {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) return normal(d.mean + delta, d.sd);
        else if constexpr (std::is_same_v<T, ShiftedExponential>) return shifted_exponential(d.rate, d.shift + delta);
        else if constexpr (std::is_same_v<T, Uniform>) return uniform(d.a + delta, d.b + delta);
        else if constexpr (std::is_same_v<T, TwoPoint>) return two_point(d.p, d.x_lo + delta, d.x_hi + delta);
        else return point_mass(d.value + delta);
      },
      family_);
}

Sampler::Sampler(const DistributionSpec& spec) {
  std::visit(
      [this](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Normal>) {
          if (d.sd == 0.0) {
            kind_ = Kind::point;
            shift_ = d.mean;
          } else {
            kind_ = Kind::normal;
            normal_ = boost::random::normal_distribution<double>(d.mean, d.sd);
          }
        } else if constexpr (std::is_same_v<T, ShiftedExponential>) {
          kind_ = Kind::exponential;
          exponential_ = boost::random::exponential_distribution<double>(d.rate);
          shift_ = d.shift;
        } else if constexpr (std::is_same_v<T, Uniform>) {
          kind_ = Kind::uniform;
          uniform_ = boost::random::uniform_real_distribution<double>(d.a, d.b);
        } else if constexpr (std::is_same_v<T, TwoPoint>) {
          kind_ = Kind::two_point;
          bernoulli_ = boost::random::bernoulli_distribution<double>(d.p);
          lo_ = d.x_lo;
          hi_ = d.x_hi;
        } else {
          kind_ = Kind::point;
          shift_ = d.value;
        }
      },
      spec.family());
}

void ModelParams::validate() const {
  require(beta > 0.0 && beta < 0.5, "beta must lie in (0, 1/2)");
  require(horizon > 0.0 && std::isfinite(horizon), "horizon must be positive");
  require(std::isfinite(r) && std::isfinite(eta) && std::isfinite(w0) && std::isfinite(md_offset),
          "model parameters must be finite");
}

double ModelParams::b(double n) const { return std::pow(n, beta); }

double ModelParams::mu_n(double n) const { return mu() + r * b(n) / std::sqrt(n) + eta / std::sqrt(n); }

DistributionSpec x_law_at(const ModelParams& p, double n) {
  require(n >= 1.0, "n must be >= 1");
  return p.x_law.shifted(p.mu_n(n) - p.mu());
}

std::vector<double> sample_theta(const ModelParams& p, Engine& eng, std::size_t count) {
  Sampler s(p.theta_law);
  std::vector<double> out(count);
  for (auto& v : out) v = s(eng);
  return out;
}

std::vector<double> sample_x(const ModelParams& p, double n, Engine& eng, std::size_t count) {
  Sampler s(x_law_at(p, n));
  std::vector<double> out(count);
  for (auto& v : out) v = s(eng);
  return out;
}

}  // namespace wdq
