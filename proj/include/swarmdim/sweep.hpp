#pragma once
#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmdim/diagnostics.hpp"
#include "swarmdim/minimize.hpp"

namespace swarmdim {

// where the flat phase fattens into full dimension in 2D: alpha = gamma/(gamma-1)
double fattening_curve_2d(double gamma);  // gamma > 1 or throws ValidationError

struct CellRun {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;  // failure reason when !ok
  double final_energy = 0.0;
  long long iterations = 0;
  Termination termination = Termination::MaxIters;
  int classified_dim = -1;
  int cluster_count = 0;
  double corr_dim = 0.0;
  double fit_r2 = 0.0;
};

struct PhaseCell {
  double gamma = 0.0;
  double alpha = 0.0;
  bool valid = true;  // false when alpha >= gamma (not a well on that cell)
  std::vector<CellRun> runs;
  int majority_dim = -1;   // mode of classified_dim over successful runs
  double agreement = 0.0;  // fraction of successful runs voting for the mode
};

struct Curve {
  std::string name;
  std::vector<std::array<double, 2>> points;  // (gamma, alpha)
};

struct PhaseDiagram {
  int ambient_dim = 2;
  std::vector<double> gammas;
  std::vector<double> alphas;
  std::vector<PhaseCell> cells;  // row-major: alphas x gammas
  std::vector<Curve> curves;
  std::vector<std::string> notes;
};

struct SweepParams {
  int ambient_dim = 2;
  int n_particles = 600;  // 2D default; use 400 in 3D
  double radius = 1.0;
  std::vector<std::uint64_t> seeds{1, 2, 3};
  MinimizerSettings settings;
  int threads = 1;  // concurrent (cell, seed) jobs
  // optional progress hook: (cells done, cells total)
  std::function<void(int, int)> progress;
};

// one power-law minimization + classification per (cell, seed); failures are
// recorded in the cell and the sweep keeps going
PhaseDiagram run_sweep(std::span<const double> gammas, std::span<const double> alphas,
                       const SweepParams& params);

nlohmann::json diagram_to_json(const PhaseDiagram& diagram);
PhaseDiagram diagram_from_json(const nlohmann::json& j);

// writes diagram.json, diagram.txt (alpha rows x gamma columns of
// majority_dim) and curve_<name>.dat polylines into dir
void emit_diagram(const PhaseDiagram& diagram, const std::filesystem::path& dir);

}  // namespace swarmdim
