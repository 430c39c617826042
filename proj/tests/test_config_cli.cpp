#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "swarmdim/cli.hpp"
#include "swarmdim/config.hpp"
#include "swarmdim/energy.hpp"
#include "swarmdim/errors.hpp"

using namespace swarmdim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const char* tag) {
  static int counter = 0;
  fs::path p = fs::temp_directory_path() /
               ("swarmdim_cli_" + std::string(tag) + "_" + std::to_string(counter++));
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  REQUIRE(f.good());
  f << text;
  return path;
}

std::string slurp(const fs::path& path) {
  std::ifstream f(path);
  REQUIRE(f.good());
  std::ostringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

nlohmann::json slurp_json(const fs::path& path) { return nlohmann::json::parse(slurp(path)); }

int cli(const std::vector<std::string>& args, std::string* out_text = nullptr,
        std::string* err_text = nullptr) {
  std::vector<const char*> argv{"swarmdim"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  if (out_text) *out_text = out.str();
  if (err_text) *err_text = err.str();
  return rc;
}

int config_error_line(const std::string& text, Command cmd) {
  try {
    parse_config(text, cmd);
  } catch (const ConfigError& e) {
    return e.line;
  }
  return -1;  // did not throw
}

}  // namespace

TEST_CASE("ini parsing keeps sections, values and line numbers") {
  const std::string text =
      "# leading comment\n"
      "; other comment style\n"
      "[potential]\n"
      "alpha = 1.5\n"
      "\n"
      "  gamma=7  \n"
      "[solver]\n"
      "max_iters = 100\n";
  const IniFile ini = parse_ini(text);
  REQUIRE(ini.sections.size() == 2);
  const IniSection* pot = ini.find("potential");
  REQUIRE(pot != nullptr);
  CHECK(pot->line == 3);
  REQUIRE(pot->entries.size() == 2);
  CHECK(pot->entries[0].key == "alpha");
  CHECK(pot->entries[0].value == "1.5");
  CHECK(pot->entries[0].line == 4);
  CHECK(pot->entries[1].key == "gamma");
  CHECK(pot->entries[1].value == "7");
  CHECK(pot->entries[1].line == 6);
  CHECK(ini.find("solver") != nullptr);
  CHECK(ini.find("missing") == nullptr);
}

TEST_CASE("reopened sections share duplicate detection") {
  const IniFile ini = parse_ini("[a]\nx = 1\n[b]\ny = 2\n[a]\nz = 3\n");
  REQUIRE(ini.sections.size() == 2);
  const IniSection* a = ini.find("a");
  REQUIRE(a->entries.size() == 2);
  CHECK(a->entries[1].key == "z");
  CHECK(a->entries[1].line == 6);

  try {
    parse_ini("[a]\nx = 1\n[a]\nx = 2\n");
    FAIL("duplicate across reopened section must throw");
  } catch (const ConfigError& e) {
    CHECK(e.line == 4);
    CHECK(std::string(e.what()).find("first set at line 2") != std::string::npos);
  }
}

TEST_CASE("ini syntax errors carry the offending line") {
  auto line_of = [](const std::string& text) {
    try {
      parse_ini(text);
    } catch (const ConfigError& e) {
      return e.line;
    }
    return -1;
  };
  CHECK(line_of("[potential\n") == 1);
  CHECK(line_of("\n[]\n") == 2);
  CHECK(line_of("x = 1\n") == 1);                   // key outside any section
  CHECK(line_of("[s]\njust words\n") == 2);         // no '='
  CHECK(line_of("[s]\n= 5\n") == 2);                // empty key
  CHECK(line_of("[s]\nx =\n") == 2);                // empty value
  CHECK(line_of("[s]\nx = 1\nx = 2\n") == 3);       // duplicate
}

TEST_CASE("overrides replace, append and create sections") {
  IniFile ini = parse_ini("[s]\nk = 1\n");
  apply_overrides(ini, {"s.k=2", "s.extra=3", "t.q = hello"});
  const IniSection* s = ini.find("s");
  REQUIRE(s->entries.size() == 2);
  CHECK(s->entries[0].value == "2");
  CHECK(s->entries[0].line == 0);  // no longer tied to a file line
  CHECK(s->entries[1].key == "extra");
  const IniSection* t = ini.find("t");
  REQUIRE(t != nullptr);
  REQUIRE(t->entries.size() == 1);
  CHECK(t->entries[0].value == "hello");

  for (const char* bad : {"novalue", "nodot=1", ".key=1", "section.=1", "s.k="})
    CHECK_THROWS_AS(apply_overrides(ini, {bad}), ConfigError);
}

TEST_CASE("range strings expand to lists") {
  CHECK(parse_range("1, 2.5, 3") == std::vector<double>{1.0, 2.5, 3.0});
  CHECK(parse_range("4") == std::vector<double>{4.0});
  CHECK(parse_range("0:1:0.25") == std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0});
  CHECK(parse_range("2:1:-0.5") == std::vector<double>{2.0, 1.5, 1.0});
  // the inclusive endpoint survives accumulated representation error
  CHECK(parse_range("1:2:0.1").size() == 11);
  CHECK(parse_range("1:2:0.1").back() == doctest::Approx(2.0));
  CHECK_THROWS_AS(parse_range("1:2:0"), ConfigError);
  CHECK_THROWS_AS(parse_range("1:2:-0.5"), ConfigError);
  CHECK_THROWS_AS(parse_range("1:2"), ConfigError);
  CHECK_THROWS_AS(parse_range("1:2:3:4"), ConfigError);
  CHECK_THROWS_AS(parse_range(""), ConfigError);
  CHECK_THROWS_AS(parse_range("1, two, 3"), ConfigError);
}

TEST_CASE("minimize config extraction and defaults") {
  const std::string text =
      "[potential]\n"
      "potential = powerlaw\n"
      "alpha = 0.5\n"
      "gamma = 5\n"
      "coeff_a = 2\n"
      "coeff_g = 3\n"
      "[particles]\n"
      "n = 40\n"
      "dim = 3\n"
      "radius = 2.5\n"
      "seed = 99\n"
      "masses = equal\n"
      "[solver]\n"
      "scheme = rk4\n"
      "dt_init = 0.005\n"
      "max_iters = 1234\n"
      "[output]\n"
      "directory = /tmp/somewhere\n"
      "snapshot_interval = 7\n";
  const RunConfig rc = parse_config(text, Command::Minimize);
  CHECK(rc.potential.variant == PotentialVariant::PowerLaw);
  CHECK(rc.potential.alpha == 0.5);
  CHECK(rc.potential.gamma == 5.0);
  CHECK(rc.potential.coeff_a == 2.0);
  CHECK(rc.potential.coeff_g == 3.0);
  CHECK(rc.particles.n == 40);
  CHECK(rc.particles.dim == 3);
  CHECK(rc.particles.radius == 2.5);
  CHECK(rc.particles.seed == 99);
  CHECK(rc.particles.masses.empty());
  CHECK(rc.solver.scheme == Scheme::RK4);
  CHECK(rc.solver.dt_init == 0.005);
  CHECK(rc.solver.max_iters == 1234);
  CHECK(rc.solver.grow == 1.2);  // untouched defaults survive
  CHECK(rc.output.directory == fs::path("/tmp/somewhere"));
  CHECK(rc.output.snapshot_interval == 7);

  // minimal config leaves documented defaults in place
  const RunConfig d = parse_config("[potential]\nalpha = 1\n[particles]\nn = 10\n",
                                   Command::Minimize);
  CHECK(d.potential.gamma == 7.0);
  CHECK(d.particles.dim == 2);
  CHECK(d.particles.radius == 1.0);
  CHECK(d.particles.seed == 1);
  CHECK(d.solver.scheme == Scheme::AdaptiveEuler);
  CHECK(d.solver.max_iters == 200000);
  CHECK(d.output.directory.empty());
}

TEST_CASE("explicit masses must match n") {
  const std::string good =
      "[potential]\nalpha = 1\n[particles]\nn = 3\nmasses = 0.5, 0.25, 0.25\n";
  const RunConfig rc = parse_config(good, Command::Minimize);
  CHECK(rc.particles.masses == std::vector<double>{0.5, 0.25, 0.25});
  const std::string bad = "[potential]\nalpha = 1\n[particles]\nn = 3\nmasses = 0.5, 0.5\n";
  CHECK_THROWS_AS(parse_config(bad, Command::Minimize), ConfigError);
}

TEST_CASE("potential variants accept only their own keys") {
  const RunConfig cos = parse_config(
      "[potential]\npotential = cosine\nalpha = 1.5\ngamma = 2\np = 4\n[particles]\nn = 10\n",
      Command::Minimize);
  CHECK(cos.potential.variant == PotentialVariant::CosinePerturbed);
  CHECK(cos.potential.p == 4.0);

  const RunConfig tanh_rc = parse_config(
      "[potential]\npotential = tanhwell\na = 6\nb = 0.25\n[particles]\nn = 10\n",
      Command::Minimize);
  CHECK(tanh_rc.potential.variant == PotentialVariant::TanhWell);
  CHECK(tanh_rc.potential.a == 6.0);
  CHECK(tanh_rc.potential.b == 0.25);

  // leftover keys are named in the error, at their own line
  CHECK(config_error_line("[potential]\nalpha = 1\np = 3\n[particles]\nn = 10\n",
                          Command::Minimize) == 3);
  CHECK(config_error_line("[potential]\npotential = tanhwell\nalpha = 1\n[particles]\nn = 10\n",
                          Command::Minimize) == 3);
  CHECK(config_error_line("[potential]\npotential = morse\n[particles]\nn = 10\n",
                          Command::Minimize) == 2);
}

TEST_CASE("sections are policed per command") {
  // [table] has no business in a minimize run; the error points at its header
  CHECK(config_error_line("[potential]\nalpha = 1\n[particles]\nn = 10\n[table]\npoints = 5\n",
                          Command::Minimize) == 5);
  // missing required sections
  CHECK(config_error_line("[potential]\nalpha = 1\n", Command::Minimize) == 0);
  CHECK(config_error_line("[potential]\nalpha = 1\n", Command::Diagnose) == 0);
  CHECK(config_error_line("[particles]\nn = 10\n", Command::Sweep) == 0);
  // unknown keys inside a known section
  CHECK(config_error_line("[potential]\nalpha = 1\n[particles]\nn = 10\nshape = cube\n",
                          Command::Minimize) == 5);
  CHECK(config_error_line("[potential]\nalpha = 1\n[particles]\nn = 10\n[solver]\nstep = 1\n",
                          Command::Minimize) == 6);
  // numbers must parse completely
  CHECK(config_error_line("[potential]\nalpha = 1.5x\n[particles]\nn = 10\n",
                          Command::Minimize) == 2);
}

TEST_CASE("sweep configs default the population by dimension") {
  const std::string base = "[sweep]\ngammas = 2:4:1\nalphas = 0.5, 1.5\nseeds = 4, 5\n";
  const RunConfig rc = parse_config(base, Command::Sweep);
  CHECK(rc.sweep.gammas == std::vector<double>{2.0, 3.0, 4.0});
  CHECK(rc.sweep.alphas == std::vector<double>{0.5, 1.5});
  CHECK(rc.sweep.seeds == std::vector<std::uint64_t>{4, 5});
  CHECK(rc.particles.n == 600);  // 2D default population

  const RunConfig rc3 = parse_config(base + "[particles]\ndim = 3\n", Command::Sweep);
  CHECK(rc3.particles.n == 400);  // 3D default population
  const RunConfig rcn = parse_config(base + "[particles]\ndim = 3\nn = 50\n", Command::Sweep);
  CHECK(rcn.particles.n == 50);  // explicit n wins

  CHECK_THROWS_AS(parse_config("[sweep]\ngammas = 2\n", Command::Sweep), ConfigError);
  CHECK_THROWS_AS(parse_config("[sweep]\ngammas = 2\nalphas = 1\nseeds = x\n", Command::Sweep),
                  ConfigError);
}

TEST_CASE("diagnose and table configs validate their fields") {
  const RunConfig rc = parse_config(
      "[potential]\nalpha = 1\n[diagnose]\ninput = cloud.csv\noff_samples = 500\n"
      "sample_seed = 77\ntol = 1e-5\n",
      Command::Diagnose);
  CHECK(rc.diagnose.input == fs::path("cloud.csv"));
  CHECK(rc.diagnose.off_samples == 500);
  CHECK(rc.diagnose.sample_seed == 77);
  CHECK(rc.diagnose.tol == 1e-5);
  CHECK_THROWS_AS(parse_config("[potential]\nalpha = 1\n[diagnose]\noff_samples = 5\n",
                               Command::Diagnose),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_config("[potential]\nalpha = 1\n[diagnose]\ninput = x.csv\noff_samples = -1\n",
                   Command::Diagnose),
      ConfigError);

  const RunConfig tc = parse_config(
      "[potential]\nalpha = 1\n[table]\nr_min = 0.1\nr_max = 3\npoints = 50\ndim = 1\n",
      Command::PotentialTable);
  CHECK(tc.table.r_min == 0.1);
  CHECK(tc.table.r_max == 3.0);
  CHECK(tc.table.points == 50);
  CHECK(tc.table.dim == 1);
  CHECK_THROWS_AS(parse_config("[potential]\nalpha = 1\n[table]\nr_min = 2\nr_max = 1\n",
                               Command::PotentialTable),
                  ConfigError);
  CHECK_THROWS_AS(parse_config("[potential]\nalpha = 1\n[table]\npoints = 1\n",
                               Command::PotentialTable),
                  ConfigError);
}

TEST_CASE("solver cross-checks run at parse time") {
  // dt_min above dt_init is caught by the settings check, not at first use
  CHECK_THROWS_AS(parse_config("[potential]\nalpha = 1\n[particles]\nn = 10\n"
                               "[solver]\ndt_init = 1e-6\ndt_min = 1e-3\n",
                               Command::Minimize),
                  ValidationError);
}

TEST_CASE("overrides flow through config parsing") {
  const std::string text = "[potential]\nalpha = 1\n[particles]\nn = 10\nseed = 1\n";
  const RunConfig rc = parse_config(text, Command::Minimize,
                                    {"particles.seed=9", "solver.max_iters=123"});
  CHECK(rc.particles.seed == 9);
  CHECK(rc.solver.max_iters == 123);
  // overrides are validated like file values
  CHECK_THROWS_AS(parse_config(text, Command::Minimize, {"particles.shape=cube"}), ConfigError);
}

TEST_CASE("cli argument handling") {
  std::string out, err;
  CHECK(cli({"--help"}, &out, &err) == kExitOk);
  CHECK(out.find("usage:") != std::string::npos);

  CHECK(cli({}, &out, &err) == kExitConfig);
  CHECK(err.find("usage:") != std::string::npos);
  CHECK(cli({"frobnicate", "x.ini"}, &out, &err) == kExitConfig);
  CHECK(err.find("unknown command") != std::string::npos);
  CHECK(cli({"minimize"}, &out, &err) == kExitConfig);
  CHECK(err.find("missing config file") != std::string::npos);
  CHECK(cli({"minimize", "a.ini", "b.ini"}, &out, &err) == kExitConfig);
  CHECK(cli({"minimize", "a.ini", "-x"}, &out, &err) == kExitConfig);
  CHECK(cli({"minimize", "a.ini", "--threads", "0"}, &out, &err) == kExitConfig);
  CHECK(cli({"minimize", "a.ini", "--threads"}, &out, &err) == kExitConfig);
  CHECK(cli({"minimize", "/nonexistent/path.ini"}, &out, &err) == kExitConfig);
  CHECK(err.find("cannot open") != std::string::npos);
}

TEST_CASE("minimize end to end with byte-stable outputs") {
  const fs::path work = fresh_dir("minimize");
  const fs::path dir_a = work / "a", dir_b = work / "b";
  const std::string cfg_text =
      "[potential]\nalpha = 2\ngamma = 4\n"
      "[particles]\nn = 16\ndim = 2\nseed = 5\n"
      "[solver]\nmax_iters = 3000\n"
      "[output]\ndirectory = ";
  const fs::path cfg_a = write_file(work / "a.ini", cfg_text + dir_a.string() + "\n");
  const fs::path cfg_b = write_file(work / "b.ini", cfg_text + dir_b.string() + "\n");

  std::string out, err;
  REQUIRE(cli({"minimize", cfg_a.string()}, &out, &err) == kExitOk);
  CHECK(out.find("termination") != std::string::npos);
  for (const char* name : {"final.csv", "energy_trace.dat", "radial_hist.dat", "report.json"})
    CHECK(fs::exists(dir_a / name));

  // the recorded trace must descend strictly
  std::istringstream trace(slurp(dir_a / "energy_trace.dat"));
  std::string line;
  REQUIRE(std::getline(trace, line));
  CHECK(line == "# iteration energy");
  double prev = std::numeric_limits<double>::infinity();
  long long it = 0;
  double e = 0.0;
  int rows = 0;
  while (trace >> it >> e) {
    CHECK(e < prev);
    prev = e;
    ++rows;
  }
  CHECK(rows >= 2);

  const ParticleConfiguration final_cfg = read_csv(dir_a / "final.csv");
  CHECK(final_cfg.size() == 16);
  CHECK(final_cfg.ambient_dim == 2);

  nlohmann::json report = slurp_json(dir_a / "report.json");
  CHECK(report["command"] == "minimize");
  CHECK(report["potential"]["variant"] == "powerlaw");
  CHECK(report["particles"]["n"] == 16);
  CHECK(report["particles"]["seed"] == 5);
  CHECK(report["run"]["final_energy"].get<double>() == e);  // last trace row
  CHECK(report["dimension"].contains("classified_dim"));
  CHECK(report["euler_lagrange"].contains("two_e"));

  // a second identical run reproduces every artifact byte for byte
  // (except the wall clock inside report.json)
  REQUIRE(cli({"minimize", cfg_b.string()}, &out, &err) == kExitOk);
  for (const char* name : {"final.csv", "energy_trace.dat", "radial_hist.dat"})
    CHECK(slurp(dir_a / name) == slurp(dir_b / name));
  nlohmann::json report_b = slurp_json(dir_b / "report.json");
  report["run"].erase("wall_seconds");
  report_b["run"].erase("wall_seconds");
  CHECK(report == report_b);

  fs::remove_all(work);
}

TEST_CASE("cli overrides and threads reach the run") {
  const fs::path work = fresh_dir("override");
  const fs::path cfg = write_file(work / "run.ini",
                                  "[potential]\nalpha = 2\ngamma = 4\n"
                                  "[particles]\nn = 16\ndim = 2\nseed = 5\n"
                                  "[output]\ndirectory = " + (work / "out").string() + "\n");
  std::string out, err;
  REQUIRE(cli({"minimize", cfg.string(), "--solver.max_iters=5', '--particles.seed=8"}, &out,
              &err) == kExitConfig);  // a malformed override never reaches the solver
  REQUIRE(cli({"minimize", cfg.string(), "--solver.max_iters=5", "--particles.seed=8",
               "--threads", "2"},
              &out, &err) == kExitOk);
  const nlohmann::json report = slurp_json(work / "out" / "report.json");
  CHECK(report["particles"]["seed"] == 8);
  CHECK(report["run"]["iterations"] == 5);
  CHECK(report["run"]["termination"] == "max_iters");
  fs::remove_all(work);
}

TEST_CASE("relative output directories resolve against the environment root") {
  const fs::path root = fresh_dir("envroot");
  const fs::path cfg = write_file(root / "run.ini",
                                  "[potential]\nalpha = 2\ngamma = 4\n"
                                  "[particles]\nn = 12\ndim = 1\nseed = 3\n"
                                  "[solver]\nmax_iters = 200\n"
                                  "[output]\ndirectory = rel/out\n");
  REQUIRE(setenv("SWARMDIM_OUTPUT_ROOT", root.c_str(), 1) == 0);
  std::string out, err;
  const int rc = cli({"minimize", cfg.string()}, &out, &err);
  REQUIRE(unsetenv("SWARMDIM_OUTPUT_ROOT") == 0);
  REQUIRE(rc == kExitOk);
  CHECK(fs::exists(root / "rel" / "out" / "report.json"));

  // unit-level: absolute paths and the bare default are left alone
  OutputParams abs;
  abs.directory = "/tmp/fixed";
  CHECK(resolve_output_dir(abs) == fs::path("/tmp/fixed"));
  CHECK(resolve_output_dir(OutputParams{}) == fs::path("."));
  fs::remove_all(root);
}

TEST_CASE("diagnose end to end on a written csv") {
  const fs::path work = fresh_dir("diagnose");
  ParticleConfiguration square;
  square.ambient_dim = 2;
  square.positions = {Vec(0, 0), Vec(1, 0), Vec(0, 1), Vec(1, 1), Vec(0.5, 0.5),
                      Vec(0.25, 0.5), Vec(0.5, 0.25), Vec(0.75, 0.5), Vec(0.5, 0.75),
                      Vec(0.25, 0.25)};
  square.masses = equal_masses(10);
  write_csv(square, work / "cloud.csv");
  const fs::path cfg = write_file(work / "d.ini",
                                  "[potential]\nalpha = 1.5\ngamma = 7\n"
                                  "[diagnose]\ninput = " + (work / "cloud.csv").string() +
                                      "\noff_samples = 200\n"
                                      "[output]\ndirectory = " + (work / "out").string() + "\n");
  std::string out, err;
  REQUIRE(cli({"diagnose", cfg.string()}, &out, &err) == kExitOk);
  CHECK(out.find("classified_dim") != std::string::npos);
  const nlohmann::json report = slurp_json(work / "out" / "report.json");
  CHECK(report["command"] == "diagnose");
  CHECK(!report.contains("run"));  // nothing was minimized
  CHECK(report["particles"]["n"] == 10);
  CHECK(report["euler_lagrange"]["off_support_samples"] == 200);
  // the pair-sum energy and the generated-potential average are two routes
  // to the same number
  CHECK(report["energy"].get<double>() * 2.0 ==
        doctest::Approx(report["euler_lagrange"]["two_e"].get<double>()).epsilon(1e-12));
  CHECK(fs::exists(work / "out" / "radial_hist.dat"));

  // pointing at a missing csv is a config problem
  const fs::path cfg_bad = write_file(work / "bad.ini",
                                      "[potential]\nalpha = 1.5\ngamma = 7\n"
                                      "[diagnose]\ninput = /nonexistent/cloud.csv\n");
  CHECK(cli({"diagnose", cfg_bad.string()}, &out, &err) == kExitConfig);
  fs::remove_all(work);
}

TEST_CASE("sweep end to end writes the diagram bundle") {
  const fs::path work = fresh_dir("sweep");
  const fs::path out_dir = work / "out";
  const fs::path cfg = write_file(work / "s.ini",
                                  "[sweep]\ngammas = 3\nalphas = 1\nseeds = 5\n"
                                  "[particles]\nn = 24\n"
                                  "[solver]\nmax_iters = 150\n"
                                  "[output]\ndirectory = " + out_dir.string() + "\n");
  std::string out, err;
  REQUIRE(cli({"sweep", cfg.string()}, &out, &err) == kExitOk);
  CHECK(out.find("[sweep] cells 1/1") != std::string::npos);
  for (const char* name : {"diagram.json", "diagram.txt", "curve_mild_repulsion_boundary.dat",
                           "curve_degenerate_diagonal.dat"})
    CHECK(fs::exists(out_dir / name));
  const nlohmann::json diagram = slurp_json(out_dir / "diagram.json");
  CHECK(diagram["ambient_dim"] == 2);
  CHECK(diagram["cells"].size() == 1);
  CHECK(diagram["cells"][0]["runs"][0]["ok"] == true);
  fs::remove_all(work);
}

TEST_CASE("potential table reports classification and tabulates the kernel") {
  const fs::path work = fresh_dir("table");
  const fs::path cfg = write_file(work / "t.ini",
                                  "[potential]\nalpha = 1.5\ngamma = 7\n"
                                  "[table]\nr_min = 0.5\nr_max = 1.5\npoints = 3\n"
                                  "[output]\ndirectory = " + (work / "out").string() + "\n");
  std::string out, err;
  REQUIRE(cli({"potential-table", cfg.string()}, &out, &err) == kExitOk);
  CHECK(out.find("strongly_repulsive") != std::string::npos);
  std::istringstream table(slurp(work / "out" / "table.dat"));
  std::string header;
  REQUIRE(std::getline(table, header));
  CHECK(header == "# r w w_prime laplacian(dim=2)");
  double r = 0, w = 0, wp = 0, lap = 0;
  int rows = 0;
  std::vector<double> rs;
  while (table >> r >> w >> wp >> lap) {
    rs.push_back(r);
    if (r == 1.0) {
      // at r = 1 the unit-coefficient power terms cancel in w' and the
      // Laplacian reduces to gamma - alpha
      CHECK(wp == 0.0);
      CHECK(lap == doctest::Approx(5.5).epsilon(1e-15));
    }
    ++rows;
  }
  CHECK(rows == 3);
  CHECK(rs == std::vector<double>{0.5, 1.0, 1.5});

  // an inverted well is rejected before any file is written
  const fs::path cfg_bad = write_file(work / "bad.ini",
                                      "[potential]\nalpha = 5\ngamma = 3\n"
                                      "[output]\ndirectory = " + (work / "out2").string() + "\n");
  CHECK(cli({"potential-table", cfg_bad.string()}, &out, &err) == kExitConfig);
  CHECK(err.find("invalid") != std::string::npos);
  CHECK(!fs::exists(work / "out2" / "table.dat"));
  fs::remove_all(work);
}

TEST_CASE("numerical failures exit with their own code") {
  const fs::path work = fresh_dir("numfail");

  // a step floor above any acceptable step size stalls the descent
  const fs::path cfg_stall = write_file(work / "stall.ini",
                                        "[potential]\nalpha = 2\ngamma = 4\n"
                                        "[particles]\nn = 16\ndim = 2\nseed = 5\n"
                                        "[solver]\ndt_init = 1e8\ndt_min = 1e7\n"
                                        "[output]\ndirectory = " + (work / "a").string() + "\n");
  std::string out, err;
  CHECK(cli({"minimize", cfg_stall.string()}, &out, &err) == kExitNumerical);
  CHECK(err.find("underflow") != std::string::npos);

  // coincident particles under a kernel that diverges at zero separation
  ParticleConfiguration coincident;
  coincident.ambient_dim = 1;
  coincident.positions = {Vec(0.0), Vec(0.0), Vec(1.0)};
  coincident.masses = equal_masses(3);
  write_csv(coincident, work / "coincident.csv");
  const fs::path cfg_sing = write_file(work / "sing.ini",
                                       "[potential]\nalpha = 0\ngamma = 2\n"
                                       "[diagnose]\ninput = " +
                                           (work / "coincident.csv").string() + "\n"
                                           "[output]\ndirectory = " + (work / "b").string() +
                                           "\n");
  CHECK(cli({"diagnose", cfg_sing.string()}, &out, &err) == kExitNumerical);
  CHECK(err.find("singular pair") != std::string::npos);
  fs::remove_all(work);
}
