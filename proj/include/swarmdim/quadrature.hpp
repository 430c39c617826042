#pragma once
#include <functional>
#include <vector>

#include "swarmdim/potentials.hpp"
#include "swarmdim/vec.hpp"

namespace swarmdim {

// Gauss-Legendre nodes and weights on [-1, 1]
struct GaussLegendre {
  std::vector<double> nodes;
  std::vector<double> weights;
};
GaussLegendre gauss_legendre(int n);

// average of f over the ball B(center, eps) in R^N (N in {1,2,3}) by a
// product rule: Gauss-Legendre radially, uniform angular / product sphere
// rule in the angular variables.  radial_order 0 picks the per-dimension
// default (32 in 1D/2D, 16 in 3D).
double ball_average(const std::function<double(const Vec&)>& f, const Vec& center, double eps,
                    int ambient_dim, int radial_order = 0);

// finite-radius surrogate for -Laplacian: (2(N+2)/eps^2) (f(x) - avg over B(x, eps) of f).
// Positive where f sits above its neighborhood average.
double approx_neg_laplacian(const std::function<double(const Vec&)>& f, const Vec& x, double eps,
                            int ambient_dim, int radial_order = 0);

// un-negated surrogate (2(N+2)/eps^2)(avg - W(x)) applied to the kernel;
// if W(x) = +inf the result is reported as -inf (an infinitely tall spike can
// only push the sign one way)
double approx_laplacian_at(const PotentialSpec& spec, const Vec& x, double eps, int ambient_dim,
                           int radial_order = 0);

}  // namespace swarmdim
