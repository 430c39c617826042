#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <vector>

#include "json.hpp"
#include "swarmdim/cli.hpp"
#include "swarmdim/diagnostics.hpp"
#include "swarmdim/energy.hpp"
#include "swarmdim/errors.hpp"
#include "swarmdim/minimize.hpp"
#include "swarmdim/potentials.hpp"
#include "swarmdim/sweep.hpp"

namespace py = pybind11;
using namespace swarmdim;

namespace {

py::object json_to_py(const nlohmann::json& j) {
  switch (j.type()) {
    case nlohmann::json::value_t::object: {
      py::dict d;
      for (const auto& [k, v] : j.items()) d[py::str(k)] = json_to_py(v);
      return d;
    }
    case nlohmann::json::value_t::array: {
      py::list l;
      for (const auto& v : j) l.append(json_to_py(v));
      return l;
    }
    case nlohmann::json::value_t::string:
      return py::str(j.get<std::string>());
    case nlohmann::json::value_t::boolean:
      return py::bool_(j.get<bool>());
    case nlohmann::json::value_t::number_integer:
      return py::int_(j.get<long long>());
    case nlohmann::json::value_t::number_unsigned:
      return py::int_(j.get<unsigned long long>());
    case nlohmann::json::value_t::number_float:
      return py::float_(j.get<double>());
    default:
      return py::none();
  }
}

std::vector<std::vector<double>> positions_as_lists(const ParticleConfiguration& c) {
  std::vector<std::vector<double>> out;
  out.reserve(c.positions.size());
  for (const Vec& x : c.positions) {
    std::vector<double> row(static_cast<std::size_t>(c.ambient_dim));
    for (int k = 0; k < c.ambient_dim; ++k) row[static_cast<std::size_t>(k)] = x[k];
    out.push_back(std::move(row));
  }
  return out;
}

ParticleConfiguration config_from_lists(int dim, const std::vector<std::vector<double>>& positions,
                                        std::vector<double> masses) {
  ParticleConfiguration c;
  c.ambient_dim = dim;
  c.positions.reserve(positions.size());
  for (const auto& row : positions) {
    if (static_cast<int>(row.size()) != dim)
      throw ValidationError("position row length does not match dim");
    Vec x;
    for (int k = 0; k < dim; ++k) x[k] = row[static_cast<std::size_t>(k)];
    c.positions.push_back(x);
  }
  c.masses = masses.empty() ? equal_masses(static_cast<int>(positions.size())) : std::move(masses);
  c.check();
  return c;
}

MinimizerSettings settings_from_args(const std::string& scheme, double dt_init, double grow,
                                     double shrink, double dt_min, long long max_iters,
                                     double grad_tol, double energy_tol, int plateau_window,
                                     int threads, int trace_target) {
  MinimizerSettings s;
  s.scheme = scheme_from_name(scheme);
  s.dt_init = dt_init;
  s.grow = grow;
  s.shrink = shrink;
  s.dt_min = dt_min;
  s.max_iters = max_iters;
  s.grad_tol = grad_tol;
  s.energy_tol = energy_tol;
  s.plateau_window = plateau_window;
  s.threads = threads;
  s.trace_target = trace_target;
  s.check();
  return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "energy descent for pairwise particle interactions and dimensionality diagnostics";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<SingularPairError>(m, "SingularPairError", PyExc_ArithmeticError);

  py::class_<PotentialSpec>(m, "PotentialSpec")
      .def_static("power_law", &PotentialSpec::power_law, py::arg("alpha"), py::arg("gamma"),
                  py::arg("coeff_a") = 1.0, py::arg("coeff_g") = 1.0)
      .def_static("cosine_perturbed", &PotentialSpec::cosine_perturbed, py::arg("alpha"),
                  py::arg("gamma"), py::arg("p"))
      .def_static("tanh_well", &PotentialSpec::tanh_well, py::arg("a"), py::arg("b"))
      .def_readonly("alpha", &PotentialSpec::alpha)
      .def_readonly("gamma", &PotentialSpec::gamma)
      .def_readonly("coeff_a", &PotentialSpec::coeff_a)
      .def_readonly("coeff_g", &PotentialSpec::coeff_g)
      .def_readonly("p", &PotentialSpec::p)
      .def_readonly("a", &PotentialSpec::a)
      .def_readonly("b", &PotentialSpec::b)
      .def_property_readonly("variant",
                             [](const PotentialSpec& s) { return variant_name(s.variant); })
      .def("__repr__", [](const PotentialSpec& s) { return describe(s); });

  py::class_<ParticleConfiguration>(m, "ParticleConfiguration")
      .def(py::init(&config_from_lists), py::arg("dim"), py::arg("positions"),
           py::arg("masses") = std::vector<double>{})
      .def_readonly("dim", &ParticleConfiguration::ambient_dim)
      .def_property_readonly("n", &ParticleConfiguration::size)
      .def_property_readonly("seed",
                             [](const ParticleConfiguration& c) { return c.provenance.seed; })
      .def_property_readonly("recipe",
                             [](const ParticleConfiguration& c) { return c.provenance.recipe; })
      .def("positions", &positions_as_lists)
      .def("masses", [](const ParticleConfiguration& c) { return c.masses; })
      .def("diameter", &ParticleConfiguration::diameter)
      .def("__len__", &ParticleConfiguration::size)
      .def("__repr__", [](const ParticleConfiguration& c) {
        return "ParticleConfiguration(n=" + std::to_string(c.size()) +
               ", dim=" + std::to_string(c.ambient_dim) + ")";
      });

  m.def("init_configuration", &init_configuration, py::arg("n"), py::arg("dim"),
        py::arg("radius") = 1.0, py::arg("seed") = 1,
        py::arg("masses") = std::vector<double>{});
  m.def("read_csv", [](const std::string& path) { return read_csv(path); }, py::arg("path"));
  m.def("write_csv",
        [](const ParticleConfiguration& c, const std::string& path) { write_csv(c, path); },
        py::arg("config"), py::arg("path"));

  m.def("eval_w", &eval_w, py::arg("spec"), py::arg("r"));
  m.def("eval_w_prime", &eval_w_prime, py::arg("spec"), py::arg("r"));
  m.def("eval_laplacian_radial", &eval_laplacian_radial, py::arg("spec"), py::arg("r"),
        py::arg("dim"));
  m.def("validate_potential", &validate, py::arg("spec"), py::arg("dim"));
  m.def(
      "classify_repulsion",
      [](const PotentialSpec& spec, int dim) {
        return json_to_py(report_potential_json(spec, dim)["classification"]);
      },
      py::arg("spec"), py::arg("dim"));

  m.def(
      "total_energy",
      [](const ParticleConfiguration& c, const PotentialSpec& spec, int threads) {
        return total_energy(c, spec, threads);
      },
      py::arg("config"), py::arg("spec"), py::arg("threads") = 1);
  m.def(
      "forces",
      [](const ParticleConfiguration& c, const PotentialSpec& spec, int threads) {
        const std::vector<Vec> f = forces(c, spec, threads);
        std::vector<std::vector<double>> out;
        out.reserve(f.size());
        for (const Vec& v : f) {
          std::vector<double> row(static_cast<std::size_t>(c.ambient_dim));
          for (int k = 0; k < c.ambient_dim; ++k) row[static_cast<std::size_t>(k)] = v[k];
          out.push_back(std::move(row));
        }
        return out;
      },
      py::arg("config"), py::arg("spec"), py::arg("threads") = 1);

  m.def(
      "minimize",
      [](const ParticleConfiguration& c, const PotentialSpec& spec, const std::string& scheme,
         double dt_init, double grow, double shrink, double dt_min, long long max_iters,
         double grad_tol, double energy_tol, int plateau_window, int threads, int trace_target) {
        const MinimizerSettings s =
            settings_from_args(scheme, dt_init, grow, shrink, dt_min, max_iters, grad_tol,
                               energy_tol, plateau_window, threads, trace_target);
        MinimizeResult res = minimize(c, spec, s);
        return py::make_tuple(std::move(res.config), json_to_py(report_run_json(res.report)));
      },
      py::arg("config"), py::arg("spec"), py::arg("scheme") = "adaptive_euler",
      py::arg("dt_init") = 1e-2, py::arg("grow") = 1.2, py::arg("shrink") = 0.5,
      py::arg("dt_min") = 1e-12, py::arg("max_iters") = 200000, py::arg("grad_tol") = 1e-8,
      py::arg("energy_tol") = 1e-13, py::arg("plateau_window") = 50, py::arg("threads") = 1,
      py::arg("trace_target") = 2000,
      "descend the interaction energy; returns (final_config, run_report_dict)");

  m.def(
      "classify_dimension",
      [](const ParticleConfiguration& c, const PotentialSpec& spec) {
        return json_to_py(report_dimension_json(classify_dimension(c, spec)));
      },
      py::arg("config"), py::arg("spec"));
  m.def(
      "estimate_correlation_dimension",
      [](const ParticleConfiguration& c) {
        const CorrDimFit fit = estimate_correlation_dimension(c);
        py::dict d;
        d["corr_dim"] = fit.corr_dim;
        d["r_lo"] = fit.r_lo;
        d["r_hi"] = fit.r_hi;
        d["fit_r2"] = fit.fit_r2;
        return d;
      },
      py::arg("config"));
  m.def(
      "euler_lagrange_check",
      [](const ParticleConfiguration& c, const PotentialSpec& spec, long long off_samples,
         std::uint64_t seed, double tol) {
        return json_to_py(report_euler_lagrange_json(
            euler_lagrange_check(c, spec, off_samples, seed, tol)));
      },
      py::arg("config"), py::arg("spec"), py::arg("off_samples") = 2000,
      py::arg("seed") = 1234, py::arg("tol") = 0.0);

  m.def("fattening_curve_2d", &fattening_curve_2d, py::arg("gamma"));
  m.def(
      "run_sweep",
      [](const std::vector<double>& gammas, const std::vector<double>& alphas, int dim,
         int n_particles, double radius, const std::vector<std::uint64_t>& seeds,
         long long max_iters, int threads) {
        SweepParams p;
        p.ambient_dim = dim;
        if (n_particles > 0)
          p.n_particles = n_particles;
        else
          p.n_particles = dim == 3 ? 400 : 600;
        p.radius = radius;
        p.seeds = seeds;
        p.settings.max_iters = max_iters;
        p.threads = threads;
        return json_to_py(diagram_to_json(run_sweep(gammas, alphas, p)));
      },
      py::arg("gammas"), py::arg("alphas"), py::arg("dim") = 2, py::arg("n_particles") = 0,
      py::arg("radius") = 1.0, py::arg("seeds") = std::vector<std::uint64_t>{1, 2, 3},
      py::arg("max_iters") = 200000, py::arg("threads") = 1,
      "phase diagram over a (gamma, alpha) grid; returns the diagram as a dict");
}
