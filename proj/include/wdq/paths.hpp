#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace wdq {

// Uniform grid on [0, horizon] with `steps` cells.
struct Grid {
  double horizon = 1.0;
  std::size_t steps = 1;

  Grid() = default;
  Grid(double horizon, std::size_t steps);

  double dt() const { return horizon / static_cast<double>(steps); }
  std::size_t nodes() const { return steps + 1; }
  // Time of node k; node `steps` is exactly the horizon.
  double time(std::size_t k) const;
  // Index of the cell containing t, clamped to [0, steps].
  std::size_t cell_of(double t) const;

  bool operator==(const Grid&) const = default;
};

// Step path: values[k] holds on [k dt, (k+1) dt).
class StepPath {
 public:
  StepPath() = default;
  StepPath(Grid grid, std::vector<double> values);

  static StepPath constant(const Grid& grid, double c);
  static StepPath identity(const Grid& grid);
  template <class F>
  static StepPath from_function(const Grid& grid, F&& f) {
    std::vector<double> v(grid.nodes());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.time(k));
    return StepPath(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double front() const { return values_.front(); }
  double back() const { return values_.back(); }
  // Value at an arbitrary time (step interpolation).
  double at(double t) const { return values_[grid_.cell_of(t)]; }
  bool nonnegative() const;

 private:
  Grid grid_;
  std::vector<double> values_;
};

// Linear interpolation between node values.
class PiecewiseLinearPath {
 public:
  PiecewiseLinearPath() = default;
  PiecewiseLinearPath(Grid grid, std::vector<double> node_values);

  template <class F>
  static PiecewiseLinearPath from_function(const Grid& grid, F&& f) {
    std::vector<double> v(grid.nodes());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = f(grid.time(k));
    return PiecewiseLinearPath(grid, std::move(v));
  }

  const Grid& grid() const { return grid_; }
  std::span<const double> nodes() const { return nodes_; }
  std::size_t size() const { return nodes_.size(); }
  double operator[](std::size_t k) const { return nodes_[k]; }
  double slope(std::size_t cell) const;
  double midpoint(std::size_t cell) const;
  double at(double t) const;
  StepPath as_step() const { return StepPath(grid_, nodes_); }

 private:
  Grid grid_;
  std::vector<double> nodes_;
};

StepPath operator+(const StepPath& a, const StepPath& b);
StepPath operator-(const StepPath& a, const StepPath& b);
StepPath operator*(double c, const StepPath& a);
StepPath operator+(const StepPath& a, double c);

double sup_norm(const StepPath& p);
double sup_distance(const StepPath& a, const StepPath& b);
StepPath running_sup(const StepPath& p);
// Left-endpoint Riemann sum: out[k] = dt * sum_{j<k} p[j].
StepPath integrate(const StepPath& p);

// CSV with header `t,value`; numbers use the shortest exact round-trip form.
std::string format_double(double x);
void write_csv(std::ostream& os, const StepPath& p);
void write_csv(const std::string& file, const StepPath& p);
StepPath read_csv(std::istream& is);
StepPath read_csv(const std::string& file);

}  // namespace wdq
