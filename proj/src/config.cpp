#include "swarmdim/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

namespace swarmdim {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, "key '" + key + "': cannot parse '" + v + "' as a number");
  }
}

long long parse_int(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, "key '" + key + "': cannot parse '" + v + "' as an integer");
  }
}

std::uint64_t parse_u64(const std::string& v, int line, const std::string& key) {
  try {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError(line, "key '" + key + "': cannot parse '" + v + "' as an unsigned integer");
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

std::vector<double> parse_double_list(const std::string& v, int line, const std::string& key) {
  std::vector<double> out;
  for (const std::string& tok : split(v, ','))
    out.push_back(parse_double(tok, line, key));
  return out;
}

}  // namespace

const IniSection* IniFile::find(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

IniFile parse_ini(const std::string& text) {
  IniFile ini;
  std::istringstream is(text);
  std::string raw;
  int line_no = 0;
  IniSection* current = nullptr;
  while (std::getline(is, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(line_no, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) throw ConfigError(line_no, "empty section name");
      // reopening a section continues it, so duplicate-key detection spans both parts
      IniSection* existing = nullptr;
      for (auto& s : ini.sections)
        if (s.name == name) existing = &s;
      if (existing) {
        current = existing;
      } else {
        ini.sections.push_back({name, line_no, {}});
        current = &ini.sections.back();
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(line_no, "expected 'key = value' or '[section]', got '" + line + "'");
    if (!current) throw ConfigError(line_no, "key outside any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(line_no, "empty key");
    if (value.empty()) throw ConfigError(line_no, "key '" + key + "' has an empty value");
    for (const auto& e : current->entries)
      if (e.key == key)
        throw ConfigError(line_no, "duplicate key '" + key + "' in [" + current->name +
                                       "] (first set at line " + std::to_string(e.line) + ")");
    current->entries.push_back({key, value, line_no});
  }
  return ini;
}

void apply_overrides(IniFile& ini, const std::vector<std::string>& overrides) {
  for (const std::string& ov : overrides) {
    const auto eq = ov.find('=');
    if (eq == std::string::npos)
      throw ConfigError(0, "override '" + ov + "' must look like section.key=value");
    const std::string lhs = trim(ov.substr(0, eq));
    const std::string value = trim(ov.substr(eq + 1));
    const auto dot = lhs.find('.');
    if (dot == std::string::npos || dot == 0 || dot == lhs.size() - 1)
      throw ConfigError(0, "override '" + ov + "' must look like section.key=value");
    if (value.empty()) throw ConfigError(0, "override '" + ov + "' has an empty value");
    const std::string section = lhs.substr(0, dot);
    const std::string key = lhs.substr(dot + 1);
    IniSection* target = nullptr;
    for (auto& s : ini.sections)
      if (s.name == section) target = &s;
    if (!target) {
      ini.sections.push_back({section, 0, {}});
      target = &ini.sections.back();
    }
    bool replaced = false;
    for (auto& e : target->entries)
      if (e.key == key) {
        e.value = value;
        e.line = 0;
        replaced = true;
      }
    if (!replaced) target->entries.push_back({key, value, 0});
  }
}

std::vector<double> parse_range(const std::string& text, int line) {
  const std::string t = trim(text);
  if (t.find(':') == std::string::npos) {
    auto vals = parse_double_list(t, line, "range");
    if (vals.empty()) throw ConfigError(line, "empty value list");
    return vals;
  }
  const auto parts = split(t, ':');
  if (parts.size() != 3)
    throw ConfigError(line, "range must be start:stop:step, got '" + t + "'");
  const double start = parse_double(parts[0], line, "range start");
  const double stop = parse_double(parts[1], line, "range stop");
  const double step = parse_double(parts[2], line, "range step");
  if (step == 0.0) throw ConfigError(line, "range step must be nonzero");
  if ((stop - start) * step < 0.0)
    throw ConfigError(line, "range step points away from stop");
  std::vector<double> out;
  const double eps = std::abs(step) * 1e-9;
  // k-step form avoids accumulating rounding error over long ranges
  for (int k = 0;; ++k) {
    const double v = start + k * step;
    if (step > 0 ? v > stop + eps : v < stop - eps) break;
    out.push_back(v);
  }
  return out;
}

std::string command_name(Command c) {
  switch (c) {
    case Command::Minimize: return "minimize";
    case Command::Diagnose: return "diagnose";
    case Command::Sweep: return "sweep";
    case Command::PotentialTable: return "potential-table";
  }
  return "?";
}

namespace {

PotentialSpec extract_potential(const IniSection& sec) {
  // two passes: the variant key may come after its parameters
  std::map<std::string, IniEntry> kv;
  for (const auto& e : sec.entries) kv[e.key] = e;

  PotentialSpec spec;
  std::string vname = "powerlaw";
  if (auto it = kv.find("potential"); it != kv.end()) {
    vname = it->second.value;
    const auto v = variant_from_name(vname);
    if (!v)
      throw ConfigError(it->second.line,
                        "unknown potential '" + vname + "' (powerlaw, cosine, tanhwell)");
    spec.variant = *v;
    kv.erase(it);
  }

  auto take = [&kv](const char* key, double& field) {
    if (auto it = kv.find(key); it != kv.end()) {
      field = parse_double(it->second.value, it->second.line, key);
      kv.erase(it);
    }
  };
  switch (spec.variant) {
    case PotentialVariant::PowerLaw:
      take("alpha", spec.alpha);
      take("gamma", spec.gamma);
      take("coeff_a", spec.coeff_a);
      take("coeff_g", spec.coeff_g);
      break;
    case PotentialVariant::CosinePerturbed:
      take("alpha", spec.alpha);
      take("gamma", spec.gamma);
      take("coeff_a", spec.coeff_a);
      take("coeff_g", spec.coeff_g);
      take("p", spec.p);
      break;
    case PotentialVariant::TanhWell:
      take("a", spec.a);
      take("b", spec.b);
      break;
  }
  if (!kv.empty()) {
    const auto& e = kv.begin()->second;
    throw ConfigError(e.line, "key '" + e.key + "' not used by potential '" + vname + "'");
  }
  return spec;
}

ParticleParams extract_particles(const IniSection& sec, bool sweep_defaults) {
  ParticleParams p;
  bool n_set = false;
  for (const auto& e : sec.entries) {
    if (e.key == "n") {
      p.n = static_cast<int>(parse_int(e.value, e.line, e.key));
      n_set = true;
    } else if (e.key == "dim") {
      p.dim = static_cast<int>(parse_int(e.value, e.line, e.key));
    } else if (e.key == "radius") {
      p.radius = parse_double(e.value, e.line, e.key);
    } else if (e.key == "seed") {
      p.seed = parse_u64(e.value, e.line, e.key);
    } else if (e.key == "masses") {
      if (e.value != "equal") p.masses = parse_double_list(e.value, e.line, e.key);
    } else {
      throw ConfigError(e.line, "unknown key '" + e.key + "' in [particles]");
    }
  }
  if (p.dim < 1 || p.dim > 3) throw ConfigError(sec.line, "dim must be 1, 2 or 3");
  if (sweep_defaults && !n_set) p.n = p.dim == 3 ? 400 : 600;
  if (p.n < 1) throw ConfigError(sec.line, "n must be at least 1");
  if (!(p.radius > 0.0)) throw ConfigError(sec.line, "radius must be positive");
  if (!p.masses.empty() && static_cast<int>(p.masses.size()) != p.n)
    throw ConfigError(sec.line, "masses list length must equal n");
  return p;
}

MinimizerSettings extract_solver(const IniSection& sec) {
  MinimizerSettings s;
  for (const auto& e : sec.entries) {
    if (e.key == "scheme") {
      if (e.value == "adaptive_euler")
        s.scheme = Scheme::AdaptiveEuler;
      else if (e.value == "rk4")
        s.scheme = Scheme::RK4;
      else
        throw ConfigError(e.line, "unknown scheme '" + e.value + "' (adaptive_euler, rk4)");
    } else if (e.key == "dt_init")
      s.dt_init = parse_double(e.value, e.line, e.key);
    else if (e.key == "grow")
      s.grow = parse_double(e.value, e.line, e.key);
    else if (e.key == "shrink")
      s.shrink = parse_double(e.value, e.line, e.key);
    else if (e.key == "dt_min")
      s.dt_min = parse_double(e.value, e.line, e.key);
    else if (e.key == "max_iters")
      s.max_iters = parse_int(e.value, e.line, e.key);
    else if (e.key == "grad_tol")
      s.grad_tol = parse_double(e.value, e.line, e.key);
    else if (e.key == "energy_tol")
      s.energy_tol = parse_double(e.value, e.line, e.key);
    else if (e.key == "plateau_window")
      s.plateau_window = static_cast<int>(parse_int(e.value, e.line, e.key));
    else if (e.key == "trace_target")
      s.trace_target = static_cast<int>(parse_int(e.value, e.line, e.key));
    else
      throw ConfigError(e.line, "unknown key '" + e.key + "' in [solver]");
  }
  return s;
}

OutputParams extract_output(const IniSection& sec) {
  OutputParams o;
  for (const auto& e : sec.entries) {
    if (e.key == "directory")
      o.directory = e.value;
    else if (e.key == "snapshot_interval")
      o.snapshot_interval = parse_int(e.value, e.line, e.key);
    else
      throw ConfigError(e.line, "unknown key '" + e.key + "' in [output]");
  }
  if (o.snapshot_interval < 0) throw ConfigError(sec.line, "snapshot_interval must be >= 0");
  return o;
}

SweepGrid extract_sweep(const IniSection& sec) {
  SweepGrid g;
  bool have_g = false, have_a = false;
  for (const auto& e : sec.entries) {
    if (e.key == "gammas") {
      g.gammas = parse_range(e.value, e.line);
      have_g = true;
    } else if (e.key == "alphas") {
      g.alphas = parse_range(e.value, e.line);
      have_a = true;
    } else if (e.key == "seeds") {
      g.seeds.clear();
      for (const std::string& tok : split(e.value, ','))
        g.seeds.push_back(parse_u64(tok, e.line, e.key));
    } else {
      throw ConfigError(e.line, "unknown key '" + e.key + "' in [sweep]");
    }
  }
  if (!have_g || !have_a) throw ConfigError(sec.line, "[sweep] needs both gammas and alphas");
  if (g.seeds.empty()) throw ConfigError(sec.line, "[sweep] seeds must not be empty");
  return g;
}

DiagnoseParams extract_diagnose(const IniSection& sec) {
  DiagnoseParams d;
  bool have_input = false;
  for (const auto& e : sec.entries) {
    if (e.key == "input") {
      d.input = e.value;
      have_input = true;
    } else if (e.key == "off_samples")
      d.off_samples = parse_int(e.value, e.line, e.key);
    else if (e.key == "sample_seed")
      d.sample_seed = parse_u64(e.value, e.line, e.key);
    else if (e.key == "tol")
      d.tol = parse_double(e.value, e.line, e.key);
    else
      throw ConfigError(e.line, "unknown key '" + e.key + "' in [diagnose]");
  }
  if (!have_input) throw ConfigError(sec.line, "[diagnose] needs input = <csv path>");
  if (d.off_samples < 0) throw ConfigError(sec.line, "off_samples must be >= 0");
  return d;
}

TableParams extract_table(const IniSection& sec) {
  TableParams t;
  for (const auto& e : sec.entries) {
    if (e.key == "r_min")
      t.r_min = parse_double(e.value, e.line, e.key);
    else if (e.key == "r_max")
      t.r_max = parse_double(e.value, e.line, e.key);
    else if (e.key == "points")
      t.points = static_cast<int>(parse_int(e.value, e.line, e.key));
    else if (e.key == "dim")
      t.dim = static_cast<int>(parse_int(e.value, e.line, e.key));
    else
      throw ConfigError(e.line, "unknown key '" + e.key + "' in [table]");
  }
  if (!(t.r_min > 0.0) || !(t.r_max > t.r_min))
    throw ConfigError(sec.line, "need 0 < r_min < r_max");
  if (t.points < 2) throw ConfigError(sec.line, "points must be at least 2");
  if (t.dim < 1 || t.dim > 3) throw ConfigError(sec.line, "dim must be 1, 2 or 3");
  return t;
}

}  // namespace

RunConfig parse_config(const std::string& text, Command command,
                       const std::vector<std::string>& overrides) {
  IniFile ini = parse_ini(text);
  apply_overrides(ini, overrides);

  std::vector<std::string> allowed, required;
  switch (command) {
    case Command::Minimize:
      allowed = {"potential", "particles", "solver", "output"};
      required = {"potential", "particles"};
      break;
    case Command::Diagnose:
      allowed = {"potential", "diagnose", "output"};
      required = {"potential", "diagnose"};
      break;
    case Command::Sweep:
      allowed = {"sweep", "particles", "solver", "output"};
      required = {"sweep"};
      break;
    case Command::PotentialTable:
      allowed = {"potential", "table", "output"};
      required = {"potential"};
      break;
  }
  for (const auto& sec : ini.sections)
    if (std::find(allowed.begin(), allowed.end(), sec.name) == allowed.end())
      throw ConfigError(sec.line, "section [" + sec.name + "] is not used by '" +
                                      command_name(command) + "'");
  for (const auto& name : required)
    if (!ini.find(name))
      throw ConfigError(0, "missing required section [" + name + "] for '" +
                               command_name(command) + "'");

  RunConfig rc;
  rc.command = command;
  if (const auto* s = ini.find("potential")) rc.potential = extract_potential(*s);
  if (const auto* s = ini.find("particles"))
    rc.particles = extract_particles(*s, command == Command::Sweep);
  else if (command == Command::Sweep)
    rc.particles = extract_particles(IniSection{"particles", 0, {}}, true);
  if (const auto* s = ini.find("solver")) rc.solver = extract_solver(*s);
  if (const auto* s = ini.find("output")) rc.output = extract_output(*s);
  if (const auto* s = ini.find("sweep")) rc.sweep = extract_sweep(*s);
  if (const auto* s = ini.find("diagnose")) rc.diagnose = extract_diagnose(*s);
  if (const auto* s = ini.find("table")) rc.table = extract_table(*s);
  rc.solver.check();
  return rc;
}

RunConfig load_config(const std::filesystem::path& path, Command command,
                      const std::vector<std::string>& overrides) {
  std::ifstream f(path);
  if (!f) throw ConfigError(0, "cannot open config file " + path.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return parse_config(buf.str(), command, overrides);
}

}  // namespace swarmdim
