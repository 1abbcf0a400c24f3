#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wdq/distributions.hpp"
#include "wdq/fluid.hpp"
#include "wdq/paths.hpp"

namespace wdq {

// Number of recursion steps covering [0, horizon] at level n: floor(n T).
std::size_t steps_for(double n, double horizon);
// Grid with cell width 1/n and floor(nT) cells.
Grid sim_grid(double n, double horizon);

struct Draws {
  std::vector<double> theta, x;
};
// Theta and X come from two independent streams derived from `seed`.
Draws draw_noise(const ModelParams& p, double n, std::size_t count, std::uint64_t seed);

// Raw-scale kernels on explicit draws. Outputs have draws.size()+1 entries.
struct ReflectedRun {
  std::vector<double> w;    // W_0..W_m
  std::vector<double> l;    // l[k] = L_{k-1} = sum_{j<k} Psi_j, l[0] = 0
  std::vector<double> psi;  // Psi_0..Psi_{m-1}
};
ReflectedRun run_reflected(std::span<const double> theta, std::span<const double> x, double n, double w_init);
std::vector<double> run_linear(std::span<const double> theta, std::span<const double> x, double n, double v_init);
// Upsilon_{i+1} = max of 0 and every suffix product-sum ending with the full V_{i+1}.
std::vector<double> run_upsilon(std::span<const double> theta, std::span<const double> x, double n, double w_init);

struct SimOutput {
  double n = 0;
  double center = 0;         // W* used for the centred views
  bool center_stable = true;  // false: regime unstable, centred at 0
  StepPath w_path;            // raw W
  StepPath l_path;            // raw regulator
  StepPath fluid_view;        // W / n
  StepPath diffusion_view;    // sqrt(n) (W/n - W*)
  StepPath md_view;           // sqrt(n)/b_n (W/n - W*)
  double complementarity = 0;  // sum_i W_{i+1} Psi_i
  std::optional<Draws> draws;
};

struct LinearSimOutput {
  double n = 0;
  double center = 0;
  bool center_stable = true;
  StepPath v_path;
  StepPath fluid_view;
  StepPath diffusion_view;
  StepPath md_view;
};

struct BoundingPaths {
  StepPath w, upsilon, v, u_runmax;  // raw scale; u_runmax[i] = max(U_0..U_{i-1}), u_runmax[0] = 0
};

// Raw initial value n*w0 + b_n sqrt(n) md_offset.
double initial_raw(const ModelParams& p, double n);
double center_w(const ModelParams& p, bool* stable = nullptr);
double center_v(const ModelParams& p, bool* stable = nullptr);

SimOutput simulate_w(const ModelParams& p, double n, std::uint64_t seed, bool keep_draws = false);
LinearSimOutput simulate_v(const ModelParams& p, double n, std::uint64_t seed, double v0);
BoundingPaths simulate_bounding_systems(const ModelParams& p, double n, std::uint64_t seed);

enum class TailKind { endpoint, sup };  // md(T) >= a, or sup_t md(t) > a
struct TailEvent {
  TailKind kind = TailKind::endpoint;
  double a = 1.0;
};

enum class Estimator { plain, tilted };
struct TailOptions {
  Process process = Process::w;
  Estimator estimator = Estimator::plain;
  // Per-step mean shift of X for the tilted estimator; default a b_n / (sqrt(n) T).
  std::optional<double> tilt;
};

struct TailSample {
  double n = 0;
  std::size_t reps = 0;
  std::size_t hits = 0;     // replications where the event occurred (under the sampling law)
  double p_hat = 0;
  std::optional<double> se;  // empty when reps == 1 ("insufficient")
  double upper95 = 0;       // one-sided 95% upper bound
  Estimator estimator = Estimator::plain;
  double tilt = 0;
};

// Replication r uses seed derive_seed(seed, r), the same stream simulate_w would use.
TailSample md_tail_sample(const ModelParams& p, double n, const TailEvent& event, std::size_t reps, std::uint64_t seed,
                          const TailOptions& opt = {});

}  // namespace wdq
