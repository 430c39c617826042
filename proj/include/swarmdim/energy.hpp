#pragma once
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "swarmdim/potentials.hpp"
#include "swarmdim/vec.hpp"

namespace swarmdim {

// where a configuration came from, for reproducibility
struct Provenance {
  std::uint64_t seed = 0;
  std::string recipe;
};

struct ParticleConfiguration {
  int ambient_dim = 2;  // 1, 2 or 3
  std::vector<Vec> positions;
  std::vector<double> masses;  // positive, summing to 1
  Provenance provenance;

  int size() const { return static_cast<int>(positions.size()); }
  Vec centroid() const;    // mass-weighted
  double diameter() const; // exact max pairwise distance, O(n^2)
  void check() const;      // throws ValidationError on broken invariants
};

// one fused pass over all pairs
struct PairAccumulator {
  double energy = 0.0;
  std::vector<Vec> forces;  // F_i = -sum_{j != i} m_j grad W(X_i - X_j)
  double min_pair_distance = std::numeric_limits<double>::infinity();
  long long singular_pair_count = 0;  // pairs treated as coincident
};

// pairs closer than this count as coincident; scale is the bounding-box
// diagonal (an O(n) stand-in for the diameter)
double coincidence_threshold(const ParticleConfiguration& config);

// Coincident pairs: if w(0+) = +inf the evaluation throws SingularPairError;
// otherwise the pair contributes m_i m_j w(0) to the energy and nothing to the
// forces.  threads > 1 splits the pair loop deterministically (fixed thread
// count => bitwise identical result).
PairAccumulator evaluate_pairs(const ParticleConfiguration& config, const PotentialSpec& spec,
                               int threads = 1);
double total_energy(const ParticleConfiguration& config, const PotentialSpec& spec,
                    int threads = 1);
std::vector<Vec> forces(const ParticleConfiguration& config, const PotentialSpec& spec,
                        int threads = 1);

// V(x) = sum_j m_j W(x - X_j) at arbitrary query points (no exclusion)
std::vector<double> generated_potential(const ParticleConfiguration& config,
                                        const PotentialSpec& spec, std::span<const Vec> query);
// V at the particles themselves with the self term dropped
std::vector<double> generated_potential_at_particles(const ParticleConfiguration& config,
                                                     const PotentialSpec& spec);

struct PairDistanceStats {
  double min = 0.0;
  double max = 0.0;
  double median = 0.0;
  std::vector<double> all_sorted;
};
PairDistanceStats pair_distance_stats(const ParticleConfiguration& config);

// CSV round-trip; header carries dim and count, rows are x[,y[,z]],mass with
// 17 significant digits
std::string to_csv(const ParticleConfiguration& config);
void write_csv(const ParticleConfiguration& config, const std::filesystem::path& path);
ParticleConfiguration config_from_csv(std::istream& in);
ParticleConfiguration read_csv(const std::filesystem::path& path);

// equal masses 1/n helper
std::vector<double> equal_masses(int n);

}  // namespace swarmdim
