#include "swarmdim/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>

#include "swarmdim/errors.hpp"
#include "swarmdim/quadrature.hpp"

namespace swarmdim {

namespace {

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string repulsion_kind_name(RepulsionKind k) {
  switch (k) {
    case RepulsionKind::StronglyRepulsive: return "strongly_repulsive";
    case RepulsionKind::MildlyRepulsive: return "mildly_repulsive";
    case RepulsionKind::Borderline: return "borderline";
    case RepulsionKind::Invalid: return "invalid";
  }
  return "?";
}

void usage(std::ostream& os) {
  os << "usage: swarmdim <command> <config.ini> [--threads K] [--section.key=value ...]\n"
        "\n"
        "commands:\n"
        "  minimize         descend the interaction energy from a random cloud\n"
        "  diagnose         dimensionality / balance checks on an existing csv\n"
        "  sweep            phase diagram over a (gamma, alpha) grid\n"
        "  potential-table  tabulate w, w' and the Laplacian of one potential\n"
        "\n"
        "any config value can be overridden on the command line, e.g.\n"
        "  swarmdim minimize run.ini --solver.max_iters=5000 --particles.seed=9\n"
        "outputs land in [output] directory, resolved against $SWARMDIM_OUTPUT_ROOT\n"
        "when relative.  exit codes: 0 ok, 1 bad config, 2 numerical failure.\n";
}

void write_energy_trace(const RunReport& report, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "# iteration energy\n";
  for (const auto& [it, e] : report.energy_trace) f << it << " " << format_g17(e) << "\n";
}

void write_radial_hist(const std::vector<std::pair<double, long long>>& hist,
                       const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << "# bin_center count\n";
  for (const auto& [c, n] : hist) f << format_g17(c) << " " << n << "\n";
}

void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << j.dump(2) << "\n";
}

nlohmann::json particles_json(const ParticleConfiguration& config) {
  return {{"n", config.size()},
          {"dim", config.ambient_dim},
          {"seed", config.provenance.seed},
          {"recipe", config.provenance.recipe}};
}

}  // namespace

std::filesystem::path resolve_output_dir(const OutputParams& output) {
  std::filesystem::path dir = output.directory.empty() ? "." : output.directory;
  if (dir.is_relative()) {
    if (const char* root = std::getenv("SWARMDIM_OUTPUT_ROOT"); root && *root)
      dir = std::filesystem::path(root) / dir;
  }
  return dir;
}

nlohmann::json report_potential_json(const PotentialSpec& spec, int ambient_dim) {
  nlohmann::json j;
  j["variant"] = variant_name(spec.variant);
  j["description"] = describe(spec);
  switch (spec.variant) {
    case PotentialVariant::CosinePerturbed:
      j["p"] = spec.p;
      [[fallthrough]];
    case PotentialVariant::PowerLaw:
      j["alpha"] = spec.alpha;
      j["gamma"] = spec.gamma;
      j["coeff_a"] = spec.coeff_a;
      j["coeff_g"] = spec.coeff_g;
      break;
    case PotentialVariant::TanhWell:
      j["a"] = spec.a;
      j["b"] = spec.b;
      break;
  }
  const RepulsionClass rc = classify_repulsion(spec, ambient_dim);
  j["classification"] = {{"kind", repulsion_kind_name(rc.kind)},
                         {"beta", rc.beta},
                         {"predicted_dim_lower_bound", rc.predicted_dim_lower_bound},
                         {"note", rc.note}};
  return j;
}

nlohmann::json report_run_json(const RunReport& report) {
  nlohmann::json trace = nlohmann::json::array();
  for (const auto& [it, e] : report.energy_trace) trace.push_back({it, e});
  return {{"iterations", report.iterations},
          {"accepted_steps", report.accepted_steps},
          {"rejected_steps", report.rejected_steps},
          {"final_energy", report.final_energy},
          {"final_grad_norm", report.final_grad_norm},
          {"termination", termination_name(report.termination)},
          {"wall_seconds", report.wall_seconds},
          {"energy_trace", std::move(trace)}};
}

nlohmann::json report_dimension_json(const DimensionReport& report) {
  nlohmann::json hist = nlohmann::json::array();
  for (const auto& [c, n] : report.radial_histogram) hist.push_back({c, n});
  return {{"corr_dim", report.corr_dim},
          {"fit_r_lo", report.fit_r_lo},
          {"fit_r_hi", report.fit_r_hi},
          {"fit_r2", report.fit_r2},
          {"cluster_count", report.cluster_count},
          {"max_cluster_diameter", report.max_cluster_diameter},
          {"classified_dim", report.classified_dim},
          {"refused", report.refused},
          {"beta_lower_bound", report.beta_lower_bound},
          {"radial_histogram", std::move(hist)}};
}

nlohmann::json report_euler_lagrange_json(const EulerLagrangeReport& report) {
  double v_min = 0.0, v_max = 0.0;
  if (!report.v_values.empty()) {
    v_min = *std::min_element(report.v_values.begin(), report.v_values.end());
    v_max = *std::max_element(report.v_values.begin(), report.v_values.end());
  }
  return {{"two_e", report.two_e},
          {"v_min", v_min},
          {"v_max", v_max},
          {"per_component_stddev", report.per_component_stddev},
          {"off_support_samples", report.off_support_samples},
          {"off_support_violations", report.off_support_violations},
          {"off_support_tol", report.off_support_tol},
          {"laplacian_min", report.laplacian_min},
          {"laplacian_scale", report.laplacian_scale}};
}

int cmd_minimize(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  require_valid(rc.potential, rc.particles.dim);
  const std::filesystem::path dir = resolve_output_dir(rc.output);
  std::filesystem::create_directories(dir);

  MinimizerSettings settings = rc.solver;
  settings.threads = rc.threads;
  if (rc.output.snapshot_interval > 0) {
    settings.snapshot_interval = rc.output.snapshot_interval;
    settings.snapshot_dir = dir / "snapshots";
  }

  ParticleConfiguration start = init_configuration(
      rc.particles.n, rc.particles.dim, rc.particles.radius, rc.particles.seed,
      rc.particles.masses);
  MinimizeResult res = minimize(std::move(start), rc.potential, settings);

  const DimensionReport dim = classify_dimension(res.config, rc.potential);
  const EulerLagrangeReport el = euler_lagrange_check(
      res.config, rc.potential, 2000, rc.particles.seed ^ 0x517cc1b727220a95ULL, 0.0);

  write_csv(res.config, dir / "final.csv");
  write_energy_trace(res.report, dir / "energy_trace.dat");
  write_radial_hist(dim.radial_histogram, dir / "radial_hist.dat");

  nlohmann::json report;
  report["command"] = "minimize";
  report["potential"] = report_potential_json(rc.potential, rc.particles.dim);
  report["particles"] = particles_json(res.config);
  report["run"] = report_run_json(res.report);
  report["dimension"] = report_dimension_json(dim);
  report["euler_lagrange"] = report_euler_lagrange_json(el);
  write_json(report, dir / "report.json");

  out << "minimize: " << describe(rc.potential) << ", n=" << res.config.size() << ", dim="
      << res.config.ambient_dim << "\n"
      << "  termination " << termination_name(res.report.termination) << " after "
      << res.report.iterations << " iterations (" << res.report.accepted_steps
      << " accepted), E = " << format_g17(res.report.final_energy) << "\n"
      << "  classified_dim " << dim.classified_dim << " (corr_dim "
      << format_g17(dim.corr_dim) << ", clusters " << dim.cluster_count << ")\n"
      << "  outputs in " << dir.string() << "\n";
  if (res.report.termination == Termination::StepUnderflow) {
    err << "step size underflowed: descent stalled before any tolerance was met\n";
    return kExitNumerical;
  }
  return kExitOk;
}

int cmd_diagnose(const RunConfig& rc, std::ostream& out, std::ostream&) {
  ParticleConfiguration config = read_csv(rc.diagnose.input);
  require_valid(rc.potential, config.ambient_dim);
  // throws SingularPairError when particles coincide under a kernel that
  // diverges at zero separation, before any output is written
  const double energy = total_energy(config, rc.potential);
  const std::filesystem::path dir = resolve_output_dir(rc.output);
  std::filesystem::create_directories(dir);

  const DimensionReport dim = classify_dimension(config, rc.potential);
  const EulerLagrangeReport el =
      euler_lagrange_check(config, rc.potential, rc.diagnose.off_samples,
                           rc.diagnose.sample_seed, rc.diagnose.tol);

  write_radial_hist(dim.radial_histogram, dir / "radial_hist.dat");
  nlohmann::json report;
  report["command"] = "diagnose";
  report["potential"] = report_potential_json(rc.potential, config.ambient_dim);
  report["particles"] = particles_json(config);
  report["energy"] = energy;
  report["dimension"] = report_dimension_json(dim);
  report["euler_lagrange"] = report_euler_lagrange_json(el);
  write_json(report, dir / "report.json");

  double stddev_max = 0.0;
  for (double s : el.per_component_stddev) stddev_max = std::max(stddev_max, s);
  out << "diagnose: " << rc.diagnose.input.string() << " (n=" << config.size() << ", dim="
      << config.ambient_dim << ")\n"
      << "  classified_dim " << dim.classified_dim << " (corr_dim "
      << format_g17(dim.corr_dim) << ", r2 " << format_g17(dim.fit_r2) << ", clusters "
      << dim.cluster_count << ")\n"
      << "  E = " << format_g17(energy) << ", 2E = " << format_g17(el.two_e)
      << ", max component stddev "
      << format_g17(stddev_max) << ", off-support violations " << el.off_support_violations
      << "/" << el.off_support_samples << "\n"
      << "  outputs in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_sweep(const RunConfig& rc, std::ostream& out, std::ostream&) {
  const std::filesystem::path dir = resolve_output_dir(rc.output);
  std::filesystem::create_directories(dir);

  SweepParams params;
  params.ambient_dim = rc.particles.dim;
  params.n_particles = rc.particles.n;
  params.radius = rc.particles.radius;
  params.seeds = rc.sweep.seeds;
  params.settings = rc.solver;
  params.settings.threads = 1;  // parallelism goes across runs, keeping each run sequential
  params.threads = rc.threads;
  params.progress = [&out](int done, int total) {
    out << "[sweep] cells " << done << "/" << total << "\n" << std::flush;
  };

  const PhaseDiagram diagram = run_sweep(rc.sweep.gammas, rc.sweep.alphas, params);
  emit_diagram(diagram, dir);

  int failed_runs = 0, valid_cells = 0;
  for (const PhaseCell& c : diagram.cells) {
    if (c.valid) ++valid_cells;
    for (const CellRun& r : c.runs)
      if (!r.ok) ++failed_runs;
  }
  out << "sweep: " << diagram.alphas.size() << " x " << diagram.gammas.size() << " grid, "
      << valid_cells << " valid cells, " << params.seeds.size() << " seeds each";
  if (failed_runs > 0) out << ", " << failed_runs << " failed runs (recorded in diagram.json)";
  out << "\n  outputs in " << dir.string() << "\n";
  return kExitOk;
}

int cmd_potential_table(const RunConfig& rc, std::ostream& out, std::ostream& err) {
  const auto bad = validate(rc.potential, rc.table.dim);
  out << "potential: " << describe(rc.potential) << ", dim=" << rc.table.dim << "\n";
  if (!bad.empty()) {
    for (const auto& b : bad) err << "  invalid: " << b << "\n";
    return kExitConfig;
  }
  const RepulsionClass cls = classify_repulsion(rc.potential, rc.table.dim);
  out << "  classification: " << repulsion_kind_name(cls.kind);
  if (cls.kind == RepulsionKind::StronglyRepulsive)
    out << " (beta = " << cls.beta << ", predicted dim >= " << cls.predicted_dim_lower_bound
        << ")";
  out << "\n  " << cls.note << "\n";

  const std::filesystem::path dir = resolve_output_dir(rc.output);
  std::filesystem::create_directories(dir);
  std::ofstream f(dir / "table.dat");
  if (!f) throw std::runtime_error("cannot write table.dat");
  f << "# r w w_prime laplacian(dim=" << rc.table.dim << ")\n";
  for (int k = 0; k < rc.table.points; ++k) {
    const double r =
        rc.table.r_min + (rc.table.r_max - rc.table.r_min) * k / (rc.table.points - 1.0);
    f << format_g17(r) << " " << format_g17(eval_w(rc.potential, r)) << " "
      << format_g17(eval_w_prime(rc.potential, r)) << " "
      << format_g17(eval_laplacian_radial(rc.potential, r, rc.table.dim)) << "\n";
  }
  out << "  wrote " << (dir / "table.dat").string() << " (" << rc.table.points
      << " rows over [" << rc.table.r_min << ", " << rc.table.r_max << "])\n";
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  if (argc < 2) {
    usage(err);
    return kExitConfig;
  }
  const std::string cmd_str = argv[1];
  if (cmd_str == "--help" || cmd_str == "-h" || cmd_str == "help") {
    usage(out);
    return kExitOk;
  }
  Command cmd;
  if (cmd_str == "minimize")
    cmd = Command::Minimize;
  else if (cmd_str == "diagnose")
    cmd = Command::Diagnose;
  else if (cmd_str == "sweep")
    cmd = Command::Sweep;
  else if (cmd_str == "potential-table")
    cmd = Command::PotentialTable;
  else {
    err << "unknown command '" << cmd_str << "'\n";
    usage(err);
    return kExitConfig;
  }

  std::string config_path;
  std::vector<std::string> overrides;
  int threads = 1;
  for (int i = 2; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--threads") {
      if (i + 1 >= argc) {
        err << "--threads needs a value\n";
        return kExitConfig;
      }
      threads = std::atoi(argv[++i]);
    } else if (arg.rfind("--threads=", 0) == 0) {
      threads = std::atoi(arg.c_str() + 10);
    } else if (arg.rfind("--", 0) == 0 && arg.find('=') != std::string::npos) {
      overrides.push_back(arg.substr(2));
    } else if (arg.rfind("-", 0) != 0) {
      if (!config_path.empty()) {
        err << "more than one config file given ('" << config_path << "' and '" << arg
            << "')\n";
        return kExitConfig;
      }
      config_path = arg;
    } else {
      err << "unknown flag '" << arg << "'\n";
      return kExitConfig;
    }
  }
  if (threads < 1) {
    err << "--threads must be at least 1\n";
    return kExitConfig;
  }
  if (config_path.empty()) {
    err << "missing config file\n";
    usage(err);
    return kExitConfig;
  }

  try {
    RunConfig rc = load_config(config_path, cmd, overrides);
    rc.threads = threads;
    switch (cmd) {
      case Command::Minimize: return cmd_minimize(rc, out, err);
      case Command::Diagnose: return cmd_diagnose(rc, out, err);
      case Command::Sweep: return cmd_sweep(rc, out, err);
      case Command::PotentialTable: return cmd_potential_table(rc, out, err);
    }
    return kExitConfig;
  } catch (const SingularPairError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ValidationError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
}

}  // namespace swarmdim
