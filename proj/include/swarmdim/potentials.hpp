#pragma once
#include <optional>
#include <string>
#include <vector>

#include "swarmdim/vec.hpp"

namespace swarmdim {

enum class PotentialVariant { PowerLaw, CosinePerturbed, TanhWell };

// Radial interaction kernel W(x) = w(|x|).
//
// PowerLaw        w(r) = -coeff_a * r^alpha/alpha + coeff_g * r^gamma/gamma
//                 with the convention r^s/s -> log r as s -> 0, so alpha = 0
//                 means logarithmic repulsion.  Requires alpha < gamma.
// CosinePerturbed power law plus a radial ripple 3/(2p) * cos(p r).
// TanhWell        defined through its slope, -w'(r) = tanh((1-r) a) + b,
//                 integrated so w(0) = 0.
struct PotentialSpec {
  PotentialVariant variant = PotentialVariant::PowerLaw;
  double alpha = 1.5;
  double gamma = 7.0;
  double coeff_a = 1.0;
  double coeff_g = 1.0;
  double p = 3.0;  // ripple frequency (CosinePerturbed)
  double a = 5.0;  // slope steepness (TanhWell)
  double b = 0.5;  // constant attraction offset (TanhWell)

  static PotentialSpec power_law(double alpha, double gamma, double coeff_a = 1.0,
                                 double coeff_g = 1.0);
  static PotentialSpec cosine_perturbed(double alpha, double gamma, double p);
  static PotentialSpec tanh_well(double a, double b);
};

enum class RepulsionKind { StronglyRepulsive, MildlyRepulsive, Borderline, Invalid };

struct RepulsionClass {
  RepulsionKind kind = RepulsionKind::Invalid;
  double beta = 0.0;                       // 2 - alpha when strongly repulsive
  double predicted_dim_lower_bound = 0.0;  // expected Hausdorff dimension floor
  std::string note;
};

// scalar profile and slope; w(0) may be +inf for singular kernels,
// w'(0) is a domain error (the radial direction is undefined)
double eval_w(const PotentialSpec& spec, double r);
double eval_w_prime(const PotentialSpec& spec, double r);

// both at once, sharing the expensive powers (the pair-loop hot path);
// gscale = w'(r)/r, the factor multiplying (x_i - x_j) in the gradient
struct WSlope {
  double w;
  double gscale;
};
WSlope eval_w_and_gscale(const PotentialSpec& spec, double r2);

// grad W(x) = w'(|x|) x/|x|; throws std::domain_error at x = 0
Vec eval_gradient(const PotentialSpec& spec, const Vec& x);

// Laplacian of W in R^N: w''(r) + (N-1) w'(r)/r, closed form where available.
// At r = 0 returns the limiting value (may be +-inf).
double eval_laplacian(const PotentialSpec& spec, const Vec& x, int ambient_dim);
double eval_laplacian_radial(const PotentialSpec& spec, double r, int ambient_dim);

// repulsion strength classification in ambient dimension N; depends only on
// the repulsive exponent (TanhWell behaves like a linear cusp, alpha = 1)
RepulsionClass classify_repulsion(const PotentialSpec& spec, int ambient_dim);

// list of violated invariants (empty = valid); require_valid throws instead
std::vector<std::string> validate(const PotentialSpec& spec, int ambient_dim);
void require_valid(const PotentialSpec& spec, int ambient_dim);

std::string variant_name(PotentialVariant v);
std::optional<PotentialVariant> variant_from_name(const std::string& name);

// short human-readable parameter summary, e.g. "powerlaw(alpha=1.5, gamma=7)"
std::string describe(const PotentialSpec& spec);

}  // namespace swarmdim
