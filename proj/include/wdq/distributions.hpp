#pragma once

#include <cstdint>
#include <boost/random/bernoulli_distribution.hpp>
#include <boost/random/exponential_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wdq/rng.hpp"

namespace wdq {

struct Normal {
  double mean, sd;
};
struct ShiftedExponential {
  double rate, shift;  // shift + Exp(rate)
};
struct Uniform {
  double a, b;
};
struct TwoPoint {
  double p, x_lo, x_hi;  // P(x_hi) = p
};
struct PointMass {
  double value;
};

using Family = std::variant<Normal, ShiftedExponential, Uniform, TwoPoint, PointMass>;

// A light-tailed law with analytic mean and variance.
class DistributionSpec {
 public:
  DistributionSpec() : DistributionSpec(PointMass{0.0}) {}
  explicit DistributionSpec(Family f);

  static DistributionSpec normal(double mean, double sd) { return DistributionSpec(Normal{mean, sd}); }
  static DistributionSpec shifted_exponential(double rate, double shift) {
    return DistributionSpec(ShiftedExponential{rate, shift});
  }
  static DistributionSpec uniform(double a, double b) { return DistributionSpec(Uniform{a, b}); }
  static DistributionSpec two_point(double p, double lo, double hi) { return DistributionSpec(TwoPoint{p, lo, hi}); }
  static DistributionSpec point_mass(double v) { return DistributionSpec(PointMass{v}); }
  // Parses a family name with its positional parameters; heavy-tailed names are rejected.
  static DistributionSpec from_name(std::string_view family, std::span<const double> params);

  const Family& family() const { return family_; }
  std::string name() const;
  std::vector<double> params() const;
  double declared_mean() const { return mean_; }
  double declared_var() const { return var_; }
  double declared_sd() const;
  // Same family translated by `delta`.
  DistributionSpec shifted(double delta) const;
  // Same family translated so that its mean equals `mean`.
  DistributionSpec with_mean(double mean) const { return shifted(mean - mean_); }

 private:
  Family family_;
  double mean_ = 0.0;
  double var_ = 0.0;
};

// Stateful sampler for one stream.
class Sampler {
 public:
  explicit Sampler(const DistributionSpec& spec);
  double operator()(Engine& eng) {
    switch (kind_) {
      case Kind::normal: return normal_(eng);
      case Kind::exponential: return shift_ + exponential_(eng);
      case Kind::uniform: return uniform_(eng);
      case Kind::two_point: return bernoulli_(eng) ? hi_ : lo_;
      case Kind::point: return shift_;
    }
    return shift_;
  }
  bool deterministic() const { return kind_ == Kind::point; }

 private:
  enum class Kind { normal, exponential, uniform, two_point, point };
  Kind kind_;
  boost::random::normal_distribution<double> normal_;
  boost::random::exponential_distribution<double> exponential_;
  boost::random::uniform_real_distribution<double> uniform_;
  boost::random::bernoulli_distribution<double> bernoulli_;
  double shift_ = 0.0, lo_ = 0.0, hi_ = 0.0;
};

struct ModelParams {
  DistributionSpec theta_law;  // mean theta, variance sigma_theta^2
  DistributionSpec x_law;      // base law, mean mu, variance sigma_x^2
  double r = 0.0;              // moderate-deviation drift perturbation
  double eta = 0.0;            // diffusion-scale drift perturbation, adds eta/sqrt(n)
  double beta = 0.2;           // b_n = n^beta
  double horizon = 1.0;
  double w0 = 0.0;             // fluid-scale initial value (W or V)
  double md_offset = 0.0;      // W_0 = n*w0 + b_n*sqrt(n)*md_offset

  void validate() const;
  double mu() const { return x_law.declared_mean(); }
  double theta() const { return theta_law.declared_mean(); }
  double sigma_x() const { return x_law.declared_sd(); }
  double sigma_theta() const { return theta_law.declared_sd(); }
  double b(double n) const;
  double mu_n(double n) const;
};

std::vector<double> sample_theta(const ModelParams& p, Engine& eng, std::size_t count);
std::vector<double> sample_x(const ModelParams& p, double n, Engine& eng, std::size_t count);
// Law of X^n: the base law translated to mean mu_n.
DistributionSpec x_law_at(const ModelParams& p, double n);

inline double c_coefficient(double theta_draw, double n) { return 1.0 - theta_draw / n; }

}  // namespace wdq
