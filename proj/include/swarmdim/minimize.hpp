#pragma once
#include <cstdint>
#include <filesystem>
#include <utility>
#include <vector>

#include "swarmdim/energy.hpp"

namespace swarmdim {

enum class Scheme { AdaptiveEuler, RK4 };
enum class Termination { GradTol, EnergyPlateau, MaxIters, StepUnderflow };

std::string scheme_name(Scheme s);
std::string termination_name(Termination t);
Scheme scheme_from_name(const std::string& name);            // throws ValidationError
Termination termination_from_name(const std::string& name);  // throws ValidationError

struct MinimizerSettings {
  Scheme scheme = Scheme::AdaptiveEuler;
  double dt_init = 1e-2;
  double grow = 1.2;    // step multiplier after an accepted step
  double shrink = 0.5;  // step multiplier after a rejection
  double dt_min = 1e-12;
  long long max_iters = 200000;
  double grad_tol = 1e-8;     // on max_i |F_i|
  double energy_tol = 1e-13;  // relative decrease over plateau_window iterations
  int plateau_window = 50;
  int threads = 1;
  long long snapshot_interval = 0;     // accepted steps between snapshots; 0 = off
  std::filesystem::path snapshot_dir;  // empty = off
  int trace_target = 2000;             // rough number of energy-trace entries kept

  void check() const;  // throws ValidationError
};

struct RunReport {
  long long iterations = 0;
  long long accepted_steps = 0;
  long long rejected_steps = 0;
  double final_energy = 0.0;
  double final_grad_norm = 0.0;
  Termination termination = Termination::MaxIters;
  double wall_seconds = 0.0;
  // (iteration, energy) at accepted steps, subsampled; strictly decreasing
  std::vector<std::pair<long long, double>> energy_trace;
};

// n points sampled uniformly in the ball of given radius (rejection from the
// cube), deterministic in seed across platforms; masses empty = equal 1/n
ParticleConfiguration init_configuration(int n, int ambient_dim, double radius,
                                         std::uint64_t seed,
                                         std::vector<double> masses = {});

// one trial step of X += dt F with accept-iff-energy-strictly-drops; `current`
// may pass in the already-computed accumulator for the input state to avoid
// re-evaluating it
struct StepResult {
  ParticleConfiguration config;  // input state when rejected (bitwise unchanged)
  PairAccumulator pairs;         // accumulator matching `config`
  double dt_next = 0.0;
  bool accepted = false;
};
StepResult step_adaptive_euler(const ParticleConfiguration& config, const PotentialSpec& spec,
                               double dt, const MinimizerSettings& settings = {},
                               const PairAccumulator* current = nullptr);

// classical RK4 position update on the force field (no acceptance logic)
ParticleConfiguration step_rk4(const ParticleConfiguration& config, const PotentialSpec& spec,
                               double dt, int threads = 1);

struct MinimizeResult {
  ParticleConfiguration config;
  RunReport report;
};

// descend until the gradient norm, an energy plateau, the iteration budget or
// step underflow stops it; every accepted step strictly decreases the energy
MinimizeResult minimize(ParticleConfiguration config, const PotentialSpec& spec,
                        const MinimizerSettings& settings = {});

}  // namespace swarmdim
