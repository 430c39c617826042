#include "swarmdim/potentials.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "swarmdim/errors.hpp"

namespace swarmdim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log(cosh(x)) without overflow for large |x|
double logcosh(double x) {
  const double ax = std::abs(x);
  return ax + std::log1p(std::exp(-2.0 * ax)) - std::numbers::ln2;
}

// r^s / s with the s -> 0 limit read as log r
double power_term(double s, double r) {
  if (s == 0.0) return std::log(r);
  return std::pow(r, s) / s;
}

double effective_alpha(const PotentialSpec& spec) {
  // the tanh well rises with slope tanh(a)+b out of r=0, i.e. a linear cusp
  return spec.variant == PotentialVariant::TanhWell ? 1.0 : spec.alpha;
}

// limit of coeff * (s + N - 2) * r^(s-2) as r -> 0+
double laplacian_term_limit(double coeff, double s, int N) {
  const double c = coeff * (s + N - 2);
  if (c == 0.0) return 0.0;  // harmonic exponent: the term vanishes identically
  if (s > 2.0) return 0.0;
  if (s == 2.0) return c;
  return c > 0 ? kInf : -kInf;
}

}  // namespace

PotentialSpec PotentialSpec::power_law(double alpha, double gamma, double coeff_a,
                                       double coeff_g) {
  PotentialSpec s;
  s.variant = PotentialVariant::PowerLaw;
  s.alpha = alpha;
  s.gamma = gamma;
  s.coeff_a = coeff_a;
  s.coeff_g = coeff_g;
  return s;
}

PotentialSpec PotentialSpec::cosine_perturbed(double alpha, double gamma, double p) {
  PotentialSpec s = power_law(alpha, gamma);
  s.variant = PotentialVariant::CosinePerturbed;
  s.p = p;
  return s;
}

PotentialSpec PotentialSpec::tanh_well(double a, double b) {
  PotentialSpec s;
  s.variant = PotentialVariant::TanhWell;
  s.a = a;
  s.b = b;
  return s;
}

double eval_w(const PotentialSpec& spec, double r) {
  if (r < 0.0) throw std::domain_error("eval_w: negative radius");
  switch (spec.variant) {
    case PotentialVariant::PowerLaw:
    case PotentialVariant::CosinePerturbed: {
      double w;
      if (r == 0.0) {
        if (spec.alpha <= 0.0) return kInf;  // log or negative power blows up
        w = 0.0;
      } else {
        w = -spec.coeff_a * power_term(spec.alpha, r) +
            spec.coeff_g * power_term(spec.gamma, r);
      }
      if (spec.variant == PotentialVariant::CosinePerturbed)
        w += 1.5 / spec.p * std::cos(spec.p * r);
      return w;
    }
    case PotentialVariant::TanhWell:
      return -spec.b * r + (logcosh((1.0 - r) * spec.a) - logcosh(spec.a)) / spec.a;
  }
  throw std::logic_error("unknown potential variant");
}

double eval_w_prime(const PotentialSpec& spec, double r) {
  if (r <= 0.0) throw std::domain_error("eval_w_prime: radius must be positive");
  switch (spec.variant) {
    case PotentialVariant::PowerLaw:
    case PotentialVariant::CosinePerturbed: {
      // d/dr of r^s/s is r^(s-1) for every s, including the log case
      double d = -spec.coeff_a * std::pow(r, spec.alpha - 1.0) +
                 spec.coeff_g * std::pow(r, spec.gamma - 1.0);
      if (spec.variant == PotentialVariant::CosinePerturbed)
        d += -1.5 * std::sin(spec.p * r);
      return d;
    }
    case PotentialVariant::TanhWell:
      return -(std::tanh((1.0 - r) * spec.a) + spec.b);
  }
  throw std::logic_error("unknown potential variant");
}

WSlope eval_w_and_gscale(const PotentialSpec& spec, double r2) {
  // hot path: one log + two exp per pair for the power family, sqrt only when
  // a variant genuinely needs the radius
  switch (spec.variant) {
    case PotentialVariant::PowerLaw:
    case PotentialVariant::CosinePerturbed: {
      const double t = std::log(r2);
      const double pa2 = std::exp(0.5 * (spec.alpha - 2.0) * t);  // r^(alpha-2)
      const double pg2 = std::exp(0.5 * (spec.gamma - 2.0) * t);  // r^(gamma-2)
      double gscale = -spec.coeff_a * pa2 + spec.coeff_g * pg2;
      double w = (spec.alpha == 0.0 ? -spec.coeff_a * 0.5 * t
                                    : -spec.coeff_a / spec.alpha * pa2 * r2) +
                 (spec.gamma == 0.0 ? spec.coeff_g * 0.5 * t
                                    : spec.coeff_g / spec.gamma * pg2 * r2);
      if (spec.variant == PotentialVariant::CosinePerturbed) {
        const double r = std::sqrt(r2);
        w += 1.5 / spec.p * std::cos(spec.p * r);
        gscale += -1.5 * std::sin(spec.p * r) / r;
      }
      return {w, gscale};
    }
    case PotentialVariant::TanhWell: {
      const double r = std::sqrt(r2);
      const double w =
          -spec.b * r + (logcosh((1.0 - r) * spec.a) - logcosh(spec.a)) / spec.a;
      const double gscale = -(std::tanh((1.0 - r) * spec.a) + spec.b) / r;
      return {w, gscale};
    }
  }
  throw std::logic_error("unknown potential variant");
}

Vec eval_gradient(const PotentialSpec& spec, const Vec& x) {
  const double r2 = x.squared_norm();
  if (r2 == 0.0) throw std::domain_error("eval_gradient: undefined at the origin");
  return eval_w_and_gscale(spec, r2).gscale * x;
}

double eval_laplacian_radial(const PotentialSpec& spec, double r, int ambient_dim) {
  if (r < 0.0) throw std::domain_error("eval_laplacian_radial: negative radius");
  const int N = ambient_dim;
  switch (spec.variant) {
    case PotentialVariant::PowerLaw:
    case PotentialVariant::CosinePerturbed: {
      double lap;
      if (r == 0.0) {
        // r^(alpha-2) dominates r^(gamma-2) as r -> 0, so when the alpha term
        // diverges its sign decides the limit
        const double la = laplacian_term_limit(-spec.coeff_a, spec.alpha, N);
        const double lg = laplacian_term_limit(spec.coeff_g, spec.gamma, N);
        lap = std::isinf(la) ? la : la + lg;
      } else {
        lap = -spec.coeff_a * (spec.alpha + N - 2) * std::pow(r, spec.alpha - 2.0) +
              spec.coeff_g * (spec.gamma + N - 2) * std::pow(r, spec.gamma - 2.0);
      }
      if (spec.variant == PotentialVariant::CosinePerturbed) {
        if (r == 0.0) {
          if (std::isfinite(lap)) lap += -1.5 * spec.p * N;
        } else {
          lap += -1.5 * spec.p * std::cos(spec.p * r) -
                 1.5 * (N - 1) * std::sin(spec.p * r) / r;
        }
      }
      return lap;
    }
    case PotentialVariant::TanhWell: {
      const double th = std::tanh((1.0 - r) * spec.a);
      const double wpp = spec.a * (1.0 - th * th);
      if (N == 1) return wpp;
      if (r == 0.0) {
        const double wp0 = -(std::tanh(spec.a) + spec.b);  // strictly negative
        return wp0 < 0 ? -kInf : kInf;
      }
      return wpp + (N - 1) * (-(th + spec.b)) / r;
    }
  }
  throw std::logic_error("unknown potential variant");
}

double eval_laplacian(const PotentialSpec& spec, const Vec& x, int ambient_dim) {
  return eval_laplacian_radial(spec, x.norm(), ambient_dim);
}

RepulsionClass classify_repulsion(const PotentialSpec& spec, int ambient_dim) {
  const int N = ambient_dim;
  const double alpha = effective_alpha(spec);
  RepulsionClass out;
  if (alpha <= -N) {
    out.kind = RepulsionKind::Invalid;
    out.note = "repulsion too singular: alpha <= -N, energy not defined";
    return out;
  }
  if (alpha <= 2.0 - N) {
    out.kind = RepulsionKind::Invalid;
    out.note = "at or below the harmonic exponent 2-N: outside the classified range";
    return out;
  }
  if (alpha < 2.0) {
    out.kind = RepulsionKind::StronglyRepulsive;
    out.beta = 2.0 - alpha;
    out.predicted_dim_lower_bound = out.beta;
    out.note = "support dimension expected >= 2-alpha";
    return out;
  }
  if (alpha == 2.0) {
    out.kind = RepulsionKind::Borderline;
    out.note = "quadratic borderline: flat and cluster minimizers both occur";
    return out;
  }
  out.kind = RepulsionKind::MildlyRepulsive;
  out.note = "finite-cluster (dimension-0) minimizers expected";
  return out;
}

std::vector<std::string> validate(const PotentialSpec& spec, int ambient_dim) {
  std::vector<std::string> bad;
  if (ambient_dim < 1 || ambient_dim > 3) bad.push_back("ambient_dim must be 1, 2 or 3");
  switch (spec.variant) {
    case PotentialVariant::PowerLaw:
    case PotentialVariant::CosinePerturbed:
      if (!std::isfinite(spec.alpha) || !std::isfinite(spec.gamma))
        bad.push_back("alpha and gamma must be finite");
      else {
        if (!(spec.alpha < spec.gamma)) bad.push_back("alpha must be < gamma");
        if (!(spec.alpha > -ambient_dim))
          bad.push_back("alpha must exceed -ambient_dim (integrable repulsion)");
      }
      if (!(spec.coeff_a > 0.0)) bad.push_back("coeff_a must be positive");
      if (!(spec.coeff_g > 0.0)) bad.push_back("coeff_g must be positive");
      if (spec.variant == PotentialVariant::CosinePerturbed && !(spec.p > 0.0))
        bad.push_back("p must be positive");
      break;
    case PotentialVariant::TanhWell:
      if (!(spec.a > 0.0)) bad.push_back("a must be positive");
      if (!(spec.b > 0.0)) bad.push_back("b must be positive");
      break;
  }
  return bad;
}

void require_valid(const PotentialSpec& spec, int ambient_dim) {
  const auto bad = validate(spec, ambient_dim);
  if (bad.empty()) return;
  std::string msg = "invalid potential:";
  for (const auto& b : bad) msg += " " + b + ";";
  throw ValidationError(msg);
}

std::string variant_name(PotentialVariant v) {
  switch (v) {
    case PotentialVariant::PowerLaw: return "powerlaw";
    case PotentialVariant::CosinePerturbed: return "cosine";
    case PotentialVariant::TanhWell: return "tanhwell";
  }
  return "?";
}

std::optional<PotentialVariant> variant_from_name(const std::string& name) {
  if (name == "powerlaw") return PotentialVariant::PowerLaw;
  if (name == "cosine") return PotentialVariant::CosinePerturbed;
  if (name == "tanhwell") return PotentialVariant::TanhWell;
  return std::nullopt;
}

std::string describe(const PotentialSpec& spec) {
  std::ostringstream os;
  os << variant_name(spec.variant) << "(";
  switch (spec.variant) {
    case PotentialVariant::PowerLaw:
      os << "alpha=" << spec.alpha << ", gamma=" << spec.gamma;
      if (spec.coeff_a != 1.0 || spec.coeff_g != 1.0)
        os << ", coeff_a=" << spec.coeff_a << ", coeff_g=" << spec.coeff_g;
      break;
    case PotentialVariant::CosinePerturbed:
      os << "alpha=" << spec.alpha << ", gamma=" << spec.gamma << ", p=" << spec.p;
      break;
    case PotentialVariant::TanhWell:
      os << "a=" << spec.a << ", b=" << spec.b;
      break;
  }
  os << ")";
  return os.str();
}

}  // namespace swarmdim
