#include "swarmdim/energy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <sstream>
#include <thread>

#include "swarmdim/errors.hpp"

namespace swarmdim {

namespace {

double bbox_diagonal(const std::vector<Vec>& xs) {
  if (xs.empty()) return 0.0;
  Vec lo = xs[0], hi = xs[0];
  for (const Vec& v : xs)
    for (int k = 0; k < 3; ++k) {
      lo[k] = std::min(lo[k], v[k]);
      hi[k] = std::max(hi[k], v[k]);
    }
  return (hi - lo).norm();
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

Vec ParticleConfiguration::centroid() const {
  Vec c;
  for (int i = 0; i < size(); ++i) c += masses[i] * positions[i];
  return c;  // masses sum to 1, no division needed
}

double ParticleConfiguration::diameter() const {
  double best = 0.0;
  for (std::size_t i = 0; i < positions.size(); ++i)
    for (std::size_t j = i + 1; j < positions.size(); ++j)
      best = std::max(best, (positions[i] - positions[j]).squared_norm());
  return std::sqrt(best);
}

void ParticleConfiguration::check() const {
  if (ambient_dim < 1 || ambient_dim > 3)
    throw ValidationError("ambient_dim must be 1, 2 or 3");
  if (positions.empty()) throw ValidationError("configuration has no particles");
  if (masses.size() != positions.size())
    throw ValidationError("masses and positions differ in length");
  double sum = 0.0;
  for (double m : masses) {
    if (!(m > 0.0) || !std::isfinite(m)) throw ValidationError("masses must be positive");
    sum += m;
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw ValidationError("masses must sum to 1 (off by " + std::to_string(sum - 1.0) + ")");
  for (const Vec& v : positions) {
    for (int k = 0; k < 3; ++k) {
      if (!std::isfinite(v[k])) throw ValidationError("positions must be finite");
      if (k >= ambient_dim && v[k] != 0.0)
        throw ValidationError("coordinates beyond ambient_dim must be zero");
    }
  }
}

double coincidence_threshold(const ParticleConfiguration& config) {
  return 1e-14 * bbox_diagonal(config.positions);
}

PairAccumulator evaluate_pairs(const ParticleConfiguration& config, const PotentialSpec& spec,
                               int threads) {
  const int n = config.size();
  if (static_cast<int>(config.masses.size()) != n)
    throw ValidationError("masses and positions differ in length");
  PairAccumulator out;
  out.forces.assign(std::max(n, 0), Vec{});
  if (n < 2) return out;

  const double thr = coincidence_threshold(config);
  const double thr2 = thr * thr;
  const double w0 = eval_w(spec, 0.0);
  const bool singular_origin = std::isinf(w0);

  const int T = std::clamp(threads, 1, n);
  struct Partial {
    double energy = 0.0;
    double min_r2 = std::numeric_limits<double>::infinity();
    long long singular = 0;
    std::optional<std::pair<int, int>> singular_pair;  // first one seen
    std::vector<Vec> forces;
  };
  std::vector<Partial> parts(T);

  const auto* pos = config.positions.data();
  const auto* mass = config.masses.data();
  auto worker = [&](int t) {
    Partial& p = parts[t];
    p.forces.assign(n, Vec{});
    // interleaved rows: cheap static balancing, deterministic ownership
    for (int i = t; i < n; i += T) {
      const Vec xi = pos[i];
      const double mi = mass[i];
      for (int j = i + 1; j < n; ++j) {
        const Vec d = xi - pos[j];
        const double r2 = d.squared_norm();
        if (r2 < p.min_r2) p.min_r2 = r2;
        if (r2 <= thr2) {
          ++p.singular;
          if (!p.singular_pair) p.singular_pair = {i, j};
          if (!singular_origin) p.energy += mi * mass[j] * w0;
          continue;  // coincident pairs exert no force
        }
        const WSlope ws = eval_w_and_gscale(spec, r2);
        p.energy += mi * mass[j] * ws.w;
        const Vec g = ws.gscale * d;  // grad W(x_i - x_j)
        p.forces[i] -= mass[j] * g;
        p.forces[j] += mi * g;
      }
    }
  };

  if (T == 1) {
    worker(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(T - 1);
    for (int t = 1; t < T; ++t) pool.emplace_back(worker, t);
    worker(0);
    for (auto& th : pool) th.join();
  }

  std::optional<std::pair<int, int>> first_singular;
  for (const Partial& p : parts) {
    if (p.singular_pair && (!first_singular || *p.singular_pair < *first_singular))
      first_singular = p.singular_pair;
  }
  if (singular_origin && first_singular)
    throw SingularPairError(first_singular->first, first_singular->second);

  // fixed reduction order: same thread count => bitwise identical result
  double min_r2 = std::numeric_limits<double>::infinity();
  for (const Partial& p : parts) {
    out.energy += p.energy;
    out.singular_pair_count += p.singular;
    min_r2 = std::min(min_r2, p.min_r2);
    for (int i = 0; i < n; ++i) out.forces[i] += p.forces[i];
  }
  out.min_pair_distance = std::sqrt(min_r2);
  return out;
}

double total_energy(const ParticleConfiguration& config, const PotentialSpec& spec,
                    int threads) {
  return evaluate_pairs(config, spec, threads).energy;
}

std::vector<Vec> forces(const ParticleConfiguration& config, const PotentialSpec& spec,
                        int threads) {
  return evaluate_pairs(config, spec, threads).forces;
}

std::vector<double> generated_potential(const ParticleConfiguration& config,
                                        const PotentialSpec& spec, std::span<const Vec> query) {
  std::vector<double> v;
  v.reserve(query.size());
  for (const Vec& q : query) {
    double acc = 0.0;
    for (int j = 0; j < config.size(); ++j)
      acc += config.masses[j] * eval_w(spec, (q - config.positions[j]).norm());
    v.push_back(acc);
  }
  return v;
}

std::vector<double> generated_potential_at_particles(const ParticleConfiguration& config,
                                                     const PotentialSpec& spec) {
  const int n = config.size();
  std::vector<double> v(n, 0.0);
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      acc += config.masses[j] * eval_w(spec, (config.positions[i] - config.positions[j]).norm());
    }
    v[i] = acc;
  }
  return v;
}

PairDistanceStats pair_distance_stats(const ParticleConfiguration& config) {
  PairDistanceStats st;
  const int n = config.size();
  st.all_sorted.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      st.all_sorted.push_back((config.positions[i] - config.positions[j]).norm());
  std::sort(st.all_sorted.begin(), st.all_sorted.end());
  if (st.all_sorted.empty()) return st;
  st.min = st.all_sorted.front();
  st.max = st.all_sorted.back();
  const std::size_t m = st.all_sorted.size();
  st.median = (m % 2 == 1) ? st.all_sorted[m / 2]
                           : 0.5 * (st.all_sorted[m / 2 - 1] + st.all_sorted[m / 2]);
  return st;
}

std::string to_csv(const ParticleConfiguration& config) {
  std::ostringstream os;
  os << "# dim=" << config.ambient_dim << " n=" << config.size() << "\n";
  for (int i = 0; i < config.size(); ++i) {
    for (int k = 0; k < config.ambient_dim; ++k) os << format_g17(config.positions[i][k]) << ",";
    os << format_g17(config.masses[i]) << "\n";
  }
  return os.str();
}

void write_csv(const ParticleConfiguration& config, const std::filesystem::path& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << to_csv(config);
}

ParticleConfiguration config_from_csv(std::istream& in) {
  ParticleConfiguration config;
  std::string line;
  int n_declared = -1;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (!header_seen) {
        int d = 0, n = 0;
        if (std::sscanf(line.c_str(), "# dim=%d n=%d", &d, &n) == 2) {
          config.ambient_dim = d;
          n_declared = n;
          header_seen = true;
          continue;
        }
        throw ValidationError("csv header must be '# dim=<N> n=<count>'");
      }
      continue;  // further comments ignored
    }
    if (!header_seen) throw ValidationError("csv data before the dim/n header");
    std::istringstream row(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(row, cell, ',')) vals.push_back(std::stod(cell));
    if (static_cast<int>(vals.size()) != config.ambient_dim + 1)
      throw ValidationError("csv row has wrong arity: " + line);
    Vec x;
    for (int k = 0; k < config.ambient_dim; ++k) x[k] = vals[static_cast<std::size_t>(k)];
    config.positions.push_back(x);
    config.masses.push_back(vals.back());
  }
  if (!header_seen) throw ValidationError("csv missing header");
  if (n_declared >= 0 && n_declared != config.size())
    throw ValidationError("csv row count disagrees with the declared n");
  config.provenance.recipe = "loaded_from_csv";
  config.check();
  return config;
}

ParticleConfiguration read_csv(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot read " + path.string());
  return config_from_csv(f);
}

std::vector<double> equal_masses(int n) {
  if (n < 1) throw ValidationError("need at least one particle");
  return std::vector<double>(static_cast<std::size_t>(n), 1.0 / n);
}

}  // namespace swarmdim
