#pragma once
#include <array>
#include <cmath>

namespace swarmdim {

// point in R^N for N <= 3; unused coordinates stay exactly zero, so norms and
// dots can always run over all three lanes without knowing N
struct Vec {
  std::array<double, 3> c{0.0, 0.0, 0.0};

  Vec() = default;
  Vec(double x, double y = 0.0, double z = 0.0) : c{x, y, z} {}

  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }

  Vec& operator+=(const Vec& o) {
    c[0] += o.c[0];
    c[1] += o.c[1];
    c[2] += o.c[2];
    return *this;
  }
  Vec& operator-=(const Vec& o) {
    c[0] -= o.c[0];
    c[1] -= o.c[1];
    c[2] -= o.c[2];
    return *this;
  }
  Vec& operator*=(double s) {
    c[0] *= s;
    c[1] *= s;
    c[2] *= s;
    return *this;
  }

  friend Vec operator+(Vec a, const Vec& b) { return a += b; }
  friend Vec operator-(Vec a, const Vec& b) { return a -= b; }
  friend Vec operator*(double s, Vec a) { return a *= s; }
  friend Vec operator*(Vec a, double s) { return a *= s; }
  friend bool operator==(const Vec& a, const Vec& b) { return a.c == b.c; }

  double dot(const Vec& o) const { return c[0] * o.c[0] + c[1] * o.c[1] + c[2] * o.c[2]; }
  double squared_norm() const { return dot(*this); }
  double norm() const { return std::sqrt(squared_norm()); }
};

inline double distance(const Vec& a, const Vec& b) { return (a - b).norm(); }

}  // namespace swarmdim
