#include "swarmdim/minimize.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "swarmdim/errors.hpp"

namespace swarmdim {

namespace {

double max_force_norm(const std::vector<Vec>& f) {
  double best = 0.0;
  for (const Vec& v : f) best = std::max(best, v.squared_norm());
  return std::sqrt(best);
}

void write_snapshot(const ParticleConfiguration& config, const MinimizerSettings& s,
                    long long accepted) {
  std::filesystem::create_directories(s.snapshot_dir);
  char name[48];
  std::snprintf(name, sizeof name, "snapshot_%08lld.csv", accepted);
  write_csv(config, s.snapshot_dir / name);
}

}  // namespace

std::string scheme_name(Scheme s) {
  return s == Scheme::AdaptiveEuler ? "adaptive_euler" : "rk4";
}

std::string termination_name(Termination t) {
  switch (t) {
    case Termination::GradTol: return "grad_tol";
    case Termination::EnergyPlateau: return "energy_plateau";
    case Termination::MaxIters: return "max_iters";
    case Termination::StepUnderflow: return "step_underflow";
  }
  return "?";
}

Scheme scheme_from_name(const std::string& name) {
  if (name == "adaptive_euler") return Scheme::AdaptiveEuler;
  if (name == "rk4") return Scheme::RK4;
  throw ValidationError("unknown scheme: " + name);
}

Termination termination_from_name(const std::string& name) {
  if (name == "grad_tol") return Termination::GradTol;
  if (name == "energy_plateau") return Termination::EnergyPlateau;
  if (name == "max_iters") return Termination::MaxIters;
  if (name == "step_underflow") return Termination::StepUnderflow;
  throw ValidationError("unknown termination: " + name);
}

void MinimizerSettings::check() const {
  if (!(dt_init > 0.0)) throw ValidationError("dt_init must be positive");
  if (!(dt_min > 0.0) || dt_min > dt_init)
    throw ValidationError("dt_min must satisfy 0 < dt_min <= dt_init");
  if (!(grow > 1.0)) throw ValidationError("grow must exceed 1");
  if (!(shrink > 0.0) || !(shrink < 1.0)) throw ValidationError("shrink must be in (0,1)");
  if (max_iters < 0) throw ValidationError("max_iters must be nonnegative");
  if (!(grad_tol >= 0.0)) throw ValidationError("grad_tol must be nonnegative");
  if (!(energy_tol >= 0.0)) throw ValidationError("energy_tol must be nonnegative");
  if (plateau_window < 1) throw ValidationError("plateau_window must be positive");
  if (threads < 1) throw ValidationError("threads must be positive");
  if (trace_target < 2) throw ValidationError("trace_target must be at least 2");
  if (snapshot_interval < 0) throw ValidationError("snapshot_interval must be nonnegative");
}

ParticleConfiguration init_configuration(int n, int ambient_dim, double radius,
                                         std::uint64_t seed, std::vector<double> masses) {
  if (n < 1) throw ValidationError("need at least one particle");
  if (ambient_dim < 1 || ambient_dim > 3) throw ValidationError("ambient_dim must be 1, 2 or 3");
  if (!(radius > 0.0)) throw ValidationError("radius must be positive");
  if (!masses.empty() && static_cast<int>(masses.size()) != n)
    throw ValidationError("explicit masses must match the particle count");

  std::mt19937_64 rng(seed);
  // top 53 bits -> [0,1); avoids distribution objects whose stream is
  // implementation-defined, so seeds reproduce across platforms
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };

  ParticleConfiguration config;
  config.ambient_dim = ambient_dim;
  config.positions.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Vec x;
    do {
      for (int k = 0; k < ambient_dim; ++k) x[k] = radius * (2.0 * unit() - 1.0);
    } while (x.squared_norm() > radius * radius);
    config.positions.push_back(x);
  }
  config.masses = masses.empty() ? equal_masses(n) : std::move(masses);
  config.provenance.seed = seed;
  std::ostringstream recipe;
  recipe << "uniform_ball(n=" << n << ", dim=" << ambient_dim << ", radius=" << radius
         << ", seed=" << seed << ")";
  config.provenance.recipe = recipe.str();
  config.check();
  return config;
}

StepResult step_adaptive_euler(const ParticleConfiguration& config, const PotentialSpec& spec,
                               double dt, const MinimizerSettings& settings,
                               const PairAccumulator* current) {
  PairAccumulator base =
      current ? *current : evaluate_pairs(config, spec, settings.threads);

  ParticleConfiguration candidate = config;
  for (int i = 0; i < config.size(); ++i) candidate.positions[i] += dt * base.forces[i];

  bool accepted = false;
  PairAccumulator cand;
  try {
    cand = evaluate_pairs(candidate, spec, settings.threads);
    accepted = std::isfinite(cand.energy) && cand.energy < base.energy;
  } catch (const SingularPairError&) {
    accepted = false;  // the step drove two particles together: just reject it
  }

  StepResult out;
  if (accepted) {
    out.config = std::move(candidate);
    out.pairs = std::move(cand);
    out.dt_next = dt * settings.grow;
    out.accepted = true;
  } else {
    out.config = config;  // untouched input state
    out.pairs = std::move(base);
    out.dt_next = dt * settings.shrink;
    out.accepted = false;
  }
  return out;
}

ParticleConfiguration step_rk4(const ParticleConfiguration& config, const PotentialSpec& spec,
                               double dt, int threads) {
  const int n = config.size();
  auto shifted = [&](const std::vector<Vec>& k, double h) {
    ParticleConfiguration c = config;
    for (int i = 0; i < n; ++i) c.positions[i] += h * k[i];
    return c;
  };
  const std::vector<Vec> k1 = forces(config, spec, threads);
  const std::vector<Vec> k2 = forces(shifted(k1, dt / 2), spec, threads);
  const std::vector<Vec> k3 = forces(shifted(k2, dt / 2), spec, threads);
  const std::vector<Vec> k4 = forces(shifted(k3, dt), spec, threads);
  ParticleConfiguration out = config;
  for (int i = 0; i < n; ++i)
    out.positions[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  return out;
}

MinimizeResult minimize(ParticleConfiguration config, const PotentialSpec& spec,
                        const MinimizerSettings& settings) {
  settings.check();
  require_valid(spec, config.ambient_dim);
  config.check();

  const auto t0 = std::chrono::steady_clock::now();
  RunReport report;
  PairAccumulator acc = evaluate_pairs(config, spec, settings.threads);
  if (!std::isfinite(acc.energy))
    throw ValidationError("initial configuration has non-finite energy");

  const int W = settings.plateau_window;
  std::vector<double> ring(static_cast<std::size_t>(W) + 1, acc.energy);
  const long long stride = std::max<long long>(1, settings.max_iters / settings.trace_target);
  report.energy_trace.emplace_back(0, acc.energy);

  double dt = settings.dt_init;
  while (true) {
    const double gn = max_force_norm(acc.forces);
    if (gn <= settings.grad_tol) {
      report.termination = Termination::GradTol;
      break;
    }
    if (report.iterations >= settings.max_iters) {
      report.termination = Termination::MaxIters;
      break;
    }
    if (report.iterations >= W) {
      const double e_old = ring[static_cast<std::size_t>((report.iterations - W) % (W + 1))];
      if (e_old - acc.energy <= settings.energy_tol * std::abs(acc.energy)) {
        report.termination = Termination::EnergyPlateau;
        break;
      }
    }

    bool accepted = false;
    if (settings.scheme == Scheme::AdaptiveEuler) {
      StepResult st = step_adaptive_euler(config, spec, dt, settings, &acc);
      accepted = st.accepted;
      if (accepted) {
        config = std::move(st.config);
        acc = std::move(st.pairs);
      }
      dt = st.dt_next;
    } else {
      // RK4 proposal under the same strict-descent acceptance
      try {
        ParticleConfiguration candidate = step_rk4(config, spec, dt, settings.threads);
        PairAccumulator cand = evaluate_pairs(candidate, spec, settings.threads);
        if (std::isfinite(cand.energy) && cand.energy < acc.energy) {
          config = std::move(candidate);
          acc = std::move(cand);
          accepted = true;
        }
      } catch (const SingularPairError&) {
        accepted = false;
      }
      dt *= accepted ? settings.grow : settings.shrink;
    }

    ++report.iterations;
    if (accepted) {
      ++report.accepted_steps;
      if (report.accepted_steps % stride == 0)
        report.energy_trace.emplace_back(report.iterations, acc.energy);
      if (settings.snapshot_interval > 0 && !settings.snapshot_dir.empty() &&
          report.accepted_steps % settings.snapshot_interval == 0)
        write_snapshot(config, settings, report.accepted_steps);
    } else {
      ++report.rejected_steps;
      if (dt < settings.dt_min) {
        ring[static_cast<std::size_t>(report.iterations % (W + 1))] = acc.energy;
        report.termination = Termination::StepUnderflow;
        break;
      }
    }
    ring[static_cast<std::size_t>(report.iterations % (W + 1))] = acc.energy;
  }

  report.final_energy = acc.energy;
  report.final_grad_norm = max_force_norm(acc.forces);
  // keep the trace strictly decreasing: only append the end state if the
  // energy actually moved since the last recorded entry
  if (report.energy_trace.back().second != acc.energy)
    report.energy_trace.emplace_back(report.iterations, acc.energy);
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {std::move(config), std::move(report)};
}

}  // namespace swarmdim
