#include "swarmdim/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <mutex>
#include <numeric>
#include <thread>

#include "swarmdim/errors.hpp"

namespace swarmdim {

namespace {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CellRun execute_run(double gamma, double alpha, std::uint64_t seed, const SweepParams& params) {
  CellRun run;
  run.seed = seed;
  try {
    const PotentialSpec spec = PotentialSpec::power_law(alpha, gamma);
    require_valid(spec, params.ambient_dim);
    ParticleConfiguration config =
        init_configuration(params.n_particles, params.ambient_dim, params.radius, seed);
    MinimizeResult res = minimize(std::move(config), spec, params.settings);
    const DimensionReport dim = classify_dimension(res.config, spec);
    run.ok = true;
    run.final_energy = res.report.final_energy;
    run.iterations = res.report.iterations;
    run.termination = res.report.termination;
    run.classified_dim = dim.classified_dim;
    run.cluster_count = dim.cluster_count;
    run.corr_dim = dim.corr_dim;
    run.fit_r2 = dim.fit_r2;
  } catch (const std::exception& e) {
    run.ok = false;
    run.error = e.what();
  }
  return run;
}

void finalize_cell(PhaseCell& cell) {
  // majority over successful runs; ties go to the class holding the lowest
  // (most converged) final energy
  std::map<int, int> votes;
  for (const CellRun& r : cell.runs)
    if (r.ok) ++votes[r.classified_dim];
  int n_ok = 0;
  for (const auto& [d, c] : votes) n_ok += c;
  if (n_ok == 0) {
    cell.majority_dim = -1;
    cell.agreement = 0.0;
    return;
  }
  int best_count = 0;
  for (const auto& [d, c] : votes) best_count = std::max(best_count, c);
  int best_dim = -1;
  double best_energy = std::numeric_limits<double>::infinity();
  for (const CellRun& r : cell.runs) {
    if (!r.ok || votes[r.classified_dim] != best_count) continue;
    if (r.final_energy < best_energy) {
      best_energy = r.final_energy;
      best_dim = r.classified_dim;
    }
  }
  cell.majority_dim = best_dim;
  cell.agreement = static_cast<double>(best_count) / n_ok;
}

}  // namespace

double fattening_curve_2d(double gamma) {
  if (!(gamma > 1.0))
    throw ValidationError("fattening curve needs gamma > 1 (got " + std::to_string(gamma) + ")");
  return gamma / (gamma - 1.0);
}

PhaseDiagram run_sweep(std::span<const double> gammas, std::span<const double> alphas,
                       const SweepParams& params) {
  if (gammas.empty() || alphas.empty()) throw ValidationError("sweep grid is empty");
  if (params.seeds.empty()) throw ValidationError("sweep needs at least one seed");
  params.settings.check();

  PhaseDiagram diagram;
  diagram.ambient_dim = params.ambient_dim;
  diagram.gammas.assign(gammas.begin(), gammas.end());
  diagram.alphas.assign(alphas.begin(), alphas.end());

  const int G = static_cast<int>(gammas.size());
  const int A = static_cast<int>(alphas.size());
  diagram.cells.resize(static_cast<std::size_t>(G) * A);
  for (int ai = 0; ai < A; ++ai)
    for (int gi = 0; gi < G; ++gi) {
      PhaseCell& cell = diagram.cells[static_cast<std::size_t>(ai) * G + gi];
      cell.alpha = alphas[static_cast<std::size_t>(ai)];
      cell.gamma = gammas[static_cast<std::size_t>(gi)];
      cell.valid = cell.alpha < cell.gamma;  // otherwise no attractive well
    }

  struct Job {
    std::size_t cell;
    std::size_t run_slot;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (std::size_t ci = 0; ci < diagram.cells.size(); ++ci) {
    PhaseCell& cell = diagram.cells[ci];
    if (!cell.valid) continue;
    cell.runs.resize(params.seeds.size());
    for (std::size_t si = 0; si < params.seeds.size(); ++si)
      jobs.push_back({ci, si, params.seeds[si]});
  }

  const int total_cells = static_cast<int>(diagram.cells.size());
  std::atomic<std::size_t> next{0};
  std::mutex progress_mutex;
  std::vector<int> cell_pending(diagram.cells.size(), 0);
  int cells_done = 0;
  for (std::size_t ci = 0; ci < diagram.cells.size(); ++ci) {
    cell_pending[ci] = static_cast<int>(diagram.cells[ci].runs.size());
    if (cell_pending[ci] == 0) ++cells_done;  // invalid cells are born finished
  }

  auto worker = [&] {
    while (true) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs.size()) break;
      const Job& job = jobs[k];
      const PhaseCell& cell = diagram.cells[job.cell];
      CellRun run = execute_run(cell.gamma, cell.alpha, job.seed, params);
      {
        std::lock_guard<std::mutex> lock(progress_mutex);
        diagram.cells[job.cell].runs[job.run_slot] = std::move(run);
        if (--cell_pending[job.cell] == 0) {
          ++cells_done;
          if (params.progress) params.progress(cells_done, total_cells);
        }
      }
    }
  };

  const int T = std::clamp<int>(params.threads, 1, static_cast<int>(jobs.size()) + 1);
  if (T <= 1 || jobs.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 1; t < T; ++t) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
  }

  for (PhaseCell& cell : diagram.cells)
    if (cell.valid) finalize_cell(cell);

  // overlay curves in the (gamma, alpha) plane
  const auto [gmin_it, gmax_it] = std::minmax_element(gammas.begin(), gammas.end());
  const double gmin = *gmin_it, gmax = *gmax_it;
  if (params.ambient_dim == 2) {
    Curve fat;
    fat.name = "fattening";
    const double lo = std::max(1.001, gmin);
    if (gmax > lo) {
      constexpr int kPts = 201;
      for (int k = 0; k < kPts; ++k) {
        const double g = lo + (gmax - lo) * k / (kPts - 1.0);
        fat.points.push_back({g, fattening_curve_2d(g)});
      }
      diagram.curves.push_back(std::move(fat));
    }
  } else {
    diagram.notes.push_back(
        "3d shell-instability boundary omitted: no closed form implemented");
  }
  diagram.curves.push_back({"mild_repulsion_boundary", {{gmin, 2.0}, {gmax, 2.0}}});
  diagram.curves.push_back({"degenerate_diagonal", {{gmin, gmin}, {gmax, gmax}}});
  return diagram;
}

nlohmann::json diagram_to_json(const PhaseDiagram& diagram) {
  nlohmann::json j;
  j["ambient_dim"] = diagram.ambient_dim;
  j["gammas"] = diagram.gammas;
  j["alphas"] = diagram.alphas;
  j["cells"] = nlohmann::json::array();
  for (const PhaseCell& cell : diagram.cells) {
    nlohmann::json jc;
    jc["gamma"] = cell.gamma;
    jc["alpha"] = cell.alpha;
    jc["valid"] = cell.valid;
    jc["majority_dim"] = cell.majority_dim;
    jc["agreement"] = cell.agreement;
    jc["runs"] = nlohmann::json::array();
    for (const CellRun& r : cell.runs) {
      nlohmann::json jr;
      jr["seed"] = r.seed;
      jr["ok"] = r.ok;
      if (!r.ok) jr["error"] = r.error;
      jr["final_energy"] = r.final_energy;
      jr["iterations"] = r.iterations;
      jr["termination"] = termination_name(r.termination);
      jr["classified_dim"] = r.classified_dim;
      jr["cluster_count"] = r.cluster_count;
      jr["corr_dim"] = r.corr_dim;
      jr["fit_r2"] = r.fit_r2;
      jc["runs"].push_back(std::move(jr));
    }
    j["cells"].push_back(std::move(jc));
  }
  j["curves"] = nlohmann::json::array();
  for (const Curve& c : diagram.curves) {
    nlohmann::json jc;
    jc["name"] = c.name;
    jc["points"] = nlohmann::json::array();
    for (const auto& p : c.points) jc["points"].push_back({p[0], p[1]});
    j["curves"].push_back(std::move(jc));
  }
  j["notes"] = diagram.notes;
  return j;
}

PhaseDiagram diagram_from_json(const nlohmann::json& j) {
  PhaseDiagram diagram;
  diagram.ambient_dim = j.at("ambient_dim").get<int>();
  diagram.gammas = j.at("gammas").get<std::vector<double>>();
  diagram.alphas = j.at("alphas").get<std::vector<double>>();
  for (const auto& jc : j.at("cells")) {
    PhaseCell cell;
    cell.gamma = jc.at("gamma").get<double>();
    cell.alpha = jc.at("alpha").get<double>();
    cell.valid = jc.at("valid").get<bool>();
    cell.majority_dim = jc.at("majority_dim").get<int>();
    cell.agreement = jc.at("agreement").get<double>();
    for (const auto& jr : jc.at("runs")) {
      CellRun r;
      r.seed = jr.at("seed").get<std::uint64_t>();
      r.ok = jr.at("ok").get<bool>();
      if (jr.contains("error")) r.error = jr.at("error").get<std::string>();
      r.final_energy = jr.at("final_energy").get<double>();
      r.iterations = jr.at("iterations").get<long long>();
      r.termination = termination_from_name(jr.at("termination").get<std::string>());
      r.classified_dim = jr.at("classified_dim").get<int>();
      r.cluster_count = jr.at("cluster_count").get<int>();
      r.corr_dim = jr.at("corr_dim").get<double>();
      r.fit_r2 = jr.at("fit_r2").get<double>();
      cell.runs.push_back(std::move(r));
    }
    diagram.cells.push_back(std::move(cell));
  }
  for (const auto& jc : j.at("curves")) {
    Curve c;
    c.name = jc.at("name").get<std::string>();
    for (const auto& p : jc.at("points"))
      c.points.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    diagram.curves.push_back(std::move(c));
  }
  diagram.notes = j.at("notes").get<std::vector<std::string>>();
  return diagram;
}

void emit_diagram(const PhaseDiagram& diagram, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream f(dir / "diagram.json");
    if (!f) throw std::runtime_error("cannot write diagram.json");
    f << diagram_to_json(diagram).dump(2) << "\n";
  }
  {
    std::ofstream f(dir / "diagram.txt");
    if (!f) throw std::runtime_error("cannot write diagram.txt");
    f << "# majority dimension per cell; rows alpha (descending), cols gamma (ascending)\n";
    f << "# '.' = invalid cell (alpha >= gamma), '?' = no successful run\n";
    const int G = static_cast<int>(diagram.gammas.size());
    std::vector<std::size_t> gi(diagram.gammas.size()), ai(diagram.alphas.size());
    std::iota(gi.begin(), gi.end(), 0);
    std::iota(ai.begin(), ai.end(), 0);
    std::sort(gi.begin(), gi.end(),
              [&](std::size_t a, std::size_t b) { return diagram.gammas[a] < diagram.gammas[b]; });
    std::sort(ai.begin(), ai.end(),
              [&](std::size_t a, std::size_t b) { return diagram.alphas[a] > diagram.alphas[b]; });
    f << "#        gamma:";
    for (std::size_t g : gi) {
      char buf[16];
      std::snprintf(buf, sizeof buf, " %6.3g", diagram.gammas[g]);
      f << buf;
    }
    f << "\n";
    for (std::size_t a : ai) {
      char buf[32];
      std::snprintf(buf, sizeof buf, "alpha %8.4g:", diagram.alphas[a]);
      f << buf;
      for (std::size_t g : gi) {
        const PhaseCell& cell = diagram.cells[a * G + g];
        char mark = '.';
        if (cell.valid) mark = cell.majority_dim < 0 ? '?' : static_cast<char>('0' + cell.majority_dim);
        f << "      " << mark;
      }
      f << "\n";
    }
    for (const std::string& note : diagram.notes) f << "# " << note << "\n";
  }
  for (const Curve& c : diagram.curves) {
    std::ofstream f(dir / ("curve_" + c.name + ".dat"));
    if (!f) throw std::runtime_error("cannot write curve file");
    f << "# gamma alpha\n";
    for (const auto& p : c.points) f << format_g17(p[0]) << " " << format_g17(p[1]) << "\n";
  }
}

}  // namespace swarmdim
