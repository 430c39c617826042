#pragma once
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "swarmdim/energy.hpp"

namespace swarmdim {

// C(r) = fraction of (unordered) pairs strictly closer than r
std::vector<double> correlation_integral(const ParticleConfiguration& config,
                                         std::span<const double> radii);

struct CorrDimFit {
  double corr_dim = 0.0;
  double r_lo = 0.0, r_hi = 0.0;  // fitted radius window
  double fit_r2 = 1.0;            // goodness of the log-log line
};

// slope of log C(r) vs log r over [0.05, 0.25] x diameter, 16 log-spaced
// radii, zero-count radii dropped; collapsed configurations give slope 0
CorrDimFit estimate_correlation_dimension(const ParticleConfiguration& config);

struct Cluster {
  std::vector<int> indices;  // ascending
  Vec centroid;              // mass-weighted within the cluster
  double diameter = 0.0;
  double mass = 0.0;
};

// single-linkage components: i~j when |X_i - X_j| <= link_distance
std::vector<Cluster> cluster_decomposition(const ParticleConfiguration& config,
                                           double link_distance);

struct DimensionReport {
  double corr_dim = 0.0;
  double fit_r_lo = 0.0, fit_r_hi = 0.0;
  double fit_r2 = 1.0;
  int cluster_count = 0;
  double max_cluster_diameter = 0.0;
  int classified_dim = -1;  // 0..N, or -1 when refused
  bool refused = false;     // too few particles to classify (n < 10)
  std::vector<std::pair<double, long long>> radial_histogram;  // (bin center, count)
  double beta_lower_bound = 0.0;  // filled by the potential-aware overload
};

// integer dimension call: 0 when every cluster is point-like at the 1% scale,
// otherwise the correlation slope rounded and clipped to [1, N]
DimensionReport classify_dimension(const ParticleConfiguration& config);
DimensionReport classify_dimension(const ParticleConfiguration& config,
                                   const PotentialSpec& spec);

// sum_{i != j} m_i m_j |X_i - X_j|^{-s}; +inf when a pair coincides and s > 0
double riesz_energy(const ParticleConfiguration& config, double s);

// counts of |X_i - centroid| in `bins` equal-width bins up to the farthest
// particle
std::vector<std::pair<double, long long>> radial_histogram(const ParticleConfiguration& config,
                                                           int bins = 40);

struct EulerLagrangeReport {
  std::vector<double> v_values;  // generated potential at particles, self-excluded
  std::vector<double> per_component_stddev;  // one entry per cluster
  double two_e = 0.0;                        // twice the configuration energy
  long long off_support_samples = 0;
  long long off_support_violations = 0;  // V below the on-support floor minus tol
  double off_support_tol = 0.0;
  double laplacian_min = 0.0;    // min_i of sum_j m_j (Laplacian W)(X_i - X_j)
  double laplacian_scale = 0.0;  // median_i of |that sum| (sets the "tiny" scale)
};

// first-order balance checks for a candidate minimizer: V should be flat on
// each component at the level 2E, no lower off support, and the field's
// Laplacian should be nonnegative on the support.  tol <= 0 picks
// 1e-6 * |2E|.
EulerLagrangeReport euler_lagrange_check(const ParticleConfiguration& config,
                                         const PotentialSpec& spec,
                                         long long off_support_samples = 2000,
                                         std::uint64_t sample_seed = 1234, double tol = 0.0);

}  // namespace swarmdim
