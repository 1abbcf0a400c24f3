#include "wdq/paths.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace wdq {

Grid::Grid(double horizon_, std::size_t steps_) : horizon(horizon_), steps(steps_) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("Grid: horizon must be positive and finite");
  if (steps == 0) throw std::invalid_argument("Grid: steps must be >= 1");
}

double Grid::time(std::size_t k) const {
  if (k >= steps) return horizon;
  return static_cast<double>(k) * dt();
}

std::size_t Grid::cell_of(double t) const {
  if (!(t > 0.0)) return 0;
  double c = std::floor(t / dt());
  if (c >= static_cast<double>(steps)) return steps;
  return static_cast<std::size_t>(c);
}

namespace {

void check_finite(const std::vector<double>& v, const char* who) {
  for (double x : v)
    if (!std::isfinite(x)) throw std::invalid_argument(std::string(who) + ": non-finite value");
}

void check_same(const Grid& a, const Grid& b) {
  if (!(a == b)) throw std::invalid_argument("path arithmetic on different grids");
}

}  // namespace

StepPath::StepPath(Grid grid, std::vector<double> values) : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.nodes()) throw std::invalid_argument("StepPath: need steps+1 values");
  check_finite(values_, "StepPath");
}

StepPath StepPath::constant(const Grid& grid, double c) { return StepPath(grid, std::vector<double>(grid.nodes(), c)); }

StepPath StepPath::identity(const Grid& grid) {
  return from_function(grid, [](double t) { return t; });
}

bool StepPath::nonnegative() const {
  return std::all_of(values_.begin(), values_.end(), [](double x) { return x >= 0.0; });
}

PiecewiseLinearPath::PiecewiseLinearPath(Grid grid, std::vector<double> node_values)
    : grid_(grid), nodes_(std::move(node_values)) {
  if (nodes_.size() != grid_.nodes()) throw std::invalid_argument("PiecewiseLinearPath: need steps+1 nodes");
  check_finite(nodes_, "PiecewiseLinearPath");
}

double PiecewiseLinearPath::slope(std::size_t k) const { return (nodes_[k + 1] - nodes_[k]) / grid_.dt(); }

double PiecewiseLinearPath::midpoint(std::size_t k) const { return 0.5 * (nodes_[k] + nodes_[k + 1]); }

double PiecewiseLinearPath::at(double t) const {
  std::size_t k = grid_.cell_of(t);
  if (k >= grid_.steps) return nodes_.back();
  double s = (t - grid_.time(k)) / grid_.dt();
  return nodes_[k] + s * (nodes_[k + 1] - nodes_[k]);
}

StepPath operator+(const StepPath& a, const StepPath& b) {
  check_same(a.grid(), b.grid());
  std::vector<double> v(a.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] + b[k];
  return StepPath(a.grid(), std::move(v));
}

StepPath operator-(const StepPath& a, const StepPath& b) {
  check_same(a.grid(), b.grid());
  std::vector<double> v(a.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] - b[k];
  return StepPath(a.grid(), std::move(v));
}

StepPath operator*(double c, const StepPath& a) {
  std::vector<double> v(a.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = c * a[k];
  return StepPath(a.grid(), std::move(v));
}

StepPath operator+(const StepPath& a, double c) {
  std::vector<double> v(a.size());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = a[k] + c;
  return StepPath(a.grid(), std::move(v));
}

double sup_norm(const StepPath& p) {
  double m = 0.0;
  for (double x : p.values()) m = std::max(m, std::fabs(x));
  return m;
}

double sup_distance(const StepPath& a, const StepPath& b) {
  check_same(a.grid(), b.grid());
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::fabs(a[k] - b[k]));
  return m;
}

StepPath running_sup(const StepPath& p) {
  std::vector<double> v(p.values().begin(), p.values().end());
  for (std::size_t k = 1; k < v.size(); ++k) v[k] = std::max(v[k], v[k - 1]);
  return StepPath(p.grid(), std::move(v));
}

StepPath integrate(const StepPath& p) {
  const double dt = p.grid().dt();
  std::vector<double> v(p.size());
  double acc = 0.0;
  v[0] = 0.0;
  for (std::size_t k = 1; k < v.size(); ++k) {
    acc += p[k - 1];
    v[k] = dt * acc;
  }
  return StepPath(p.grid(), std::move(v));
}

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_csv(std::ostream& os, const StepPath& p) {
  os << "t,value\n";
  for (std::size_t k = 0; k < p.size(); ++k) os << format_double(p.grid().time(k)) << ',' << format_double(p[k]) << '\n';
}

void write_csv(const std::string& file, const StepPath& p) {
  std::ofstream os(file);
  if (!os) throw std::runtime_error("cannot open " + file);
  write_csv(os, p);
}

StepPath read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("read_csv: empty input");
  std::vector<double> ts, vs;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    auto comma = line.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("read_csv: malformed row: " + line);
    ts.push_back(std::stod(line.substr(0, comma)));
    vs.push_back(std::stod(line.substr(comma + 1)));
  }
  if (vs.size() < 2) throw std::invalid_argument("read_csv: need at least two rows");
  Grid g(ts.back() - ts.front(), vs.size() - 1);
  if (std::fabs(ts.front()) > 0.0) throw std::invalid_argument("read_csv: first time must be 0");
  for (std::size_t k = 0; k < ts.size(); ++k)
    if (std::fabs(ts[k] - g.time(k)) > 1e-9 * g.horizon) throw std::invalid_argument("read_csv: non-uniform grid");
  return StepPath(g, std::move(vs));
}

StepPath read_csv(const std::string& file) {
  std::ifstream is(file);
  if (!is) throw std::runtime_error("cannot open " + file);
  return read_csv(is);
}

}  // namespace wdq
