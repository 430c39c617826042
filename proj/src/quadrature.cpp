#include "swarmdim/quadrature.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace swarmdim {

namespace {

constexpr double kPi = std::numbers::pi;

GaussLegendre compute_gauss_legendre(int n) {
  // Newton iteration on the Legendre recurrence, symmetric pairs filled at once
  GaussLegendre gl;
  gl.nodes.assign(n, 0.0);
  gl.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    gl.nodes[i] = -x;
    gl.nodes[n - 1 - i] = x;
    gl.weights[i] = gl.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return gl;
}

int default_radial_order(int ambient_dim) { return ambient_dim == 3 ? 16 : 32; }

}  // namespace

GaussLegendre gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be positive");
  thread_local std::map<int, GaussLegendre> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss_legendre(n)).first;
  return it->second;
}

double ball_average(const std::function<double(const Vec&)>& f, const Vec& center, double eps,
                    int ambient_dim, int radial_order) {
  if (eps <= 0.0) throw std::invalid_argument("ball_average: eps must be positive");
  const int m = radial_order > 0 ? radial_order : default_radial_order(ambient_dim);
  const GaussLegendre gl = gauss_legendre(m);

  switch (ambient_dim) {
    case 1: {
      double acc = 0.0;
      for (int i = 0; i < m; ++i) acc += gl.weights[i] * f(center + Vec(eps * gl.nodes[i]));
      return acc / 2.0;  // node weights sum to 2 on [-1, 1]
    }
    case 2: {
      const int n_ang = 2 * m;
      double integral = 0.0;
      for (int i = 0; i < m; ++i) {
        const double r = eps * 0.5 * (gl.nodes[i] + 1.0);
        const double wr = gl.weights[i] * (eps * 0.5) * r;  // includes the Jacobian r
        double ring = 0.0;
        for (int k = 0; k < n_ang; ++k) {
          const double th = 2.0 * kPi * k / n_ang;
          ring += f(center + Vec(r * std::cos(th), r * std::sin(th)));
        }
        integral += wr * ring * (2.0 * kPi / n_ang);
      }
      return integral / (kPi * eps * eps);
    }
    case 3: {
      const int n_th = std::max(4, m / 2);       // Gauss-Legendre in cos(theta)
      const int n_ph = 2 * n_th;                 // uniform in phi
      const GaussLegendre gth = gauss_legendre(n_th);
      double integral = 0.0;
      for (int i = 0; i < m; ++i) {
        const double r = eps * 0.5 * (gl.nodes[i] + 1.0);
        const double wr = gl.weights[i] * (eps * 0.5) * r * r;
        double shell = 0.0;
        for (int j = 0; j < n_th; ++j) {
          const double cth = gth.nodes[j];
          const double sth = std::sqrt(std::max(0.0, 1.0 - cth * cth));
          for (int k = 0; k < n_ph; ++k) {
            const double ph = 2.0 * kPi * k / n_ph;
            shell += gth.weights[j] *
                     f(center + Vec(r * sth * std::cos(ph), r * sth * std::sin(ph), r * cth));
          }
        }
        integral += wr * shell * (2.0 * kPi / n_ph);
      }
      return integral / (4.0 / 3.0 * kPi * eps * eps * eps);
    }
    default:
      throw std::invalid_argument("ball_average: ambient_dim must be 1, 2 or 3");
  }
}

double approx_neg_laplacian(const std::function<double(const Vec&)>& f, const Vec& x, double eps,
                            int ambient_dim, int radial_order) {
  const double fx = f(x);
  const double avg = ball_average(f, x, eps, ambient_dim, radial_order);
  return 2.0 * (ambient_dim + 2) / (eps * eps) * (fx - avg);
}

double approx_laplacian_at(const PotentialSpec& spec, const Vec& x, double eps, int ambient_dim,
                           int radial_order) {
  const double wx = eval_w(spec, x.norm());
  if (std::isinf(wx)) return -std::numeric_limits<double>::infinity();
  const auto f = [&](const Vec& y) { return eval_w(spec, y.norm()); };
  const double avg = ball_average(f, x, eps, ambient_dim, radial_order);
  return 2.0 * (ambient_dim + 2) / (eps * eps) * (avg - wx);
}

}  // namespace swarmdim
