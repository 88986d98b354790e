#pragma once

#include <cmath>
#include <stdexcept>

#include "casimir/log_signed.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/specfun.hpp"

// Casimir-Polder energy of a perfectly conducting wedge, in the closed
// discrete-mode form and in the analytically continued lambda-integral form.
// All energies are dimensionless: U_hat = U r^4 / (alpha hbar c).

namespace casimir {

// Wedge with half-opening angle theta0 around theta = 0, faces at +-theta0;
// particle at angle theta (theta0 < theta <= pi by symmetry) and cylindrical
// radius r.
struct WedgeConfig {
  double theta0;
  double theta;
  double r = 1.0;

  double p() const { return kPi / (2.0 * (kPi - theta0)); }

  void validate() const {
    if (!(theta0 > 0.0 && theta0 < kPi))
      throw std::domain_error("wedge: theta0 must lie in (0, pi)");
    if (!(theta > theta0)) throw std::domain_error("wedge: theta must exceed theta0");
    if (!(theta <= kPi)) throw std::domain_error("wedge: theta must not exceed pi");
    if (!(r > 0.0)) throw std::domain_error("wedge: r must be positive");
  }
};

// The four hyperbolic T-matrix ratios at fixed (lambda, theta0), with the
// cross relations tM_plus = -tN_minus and tM_minus = -tN_plus.
struct WedgeTMatrix {
  double tM_plus;   //  sinh(lam theta0) / sinh(lam (pi - theta0))
  double tM_minus;  //  cosh(lam theta0) / cosh(lam (pi - theta0))
  double tN_plus;   // -tM_minus
  double tN_minus;  // -tM_plus
};

inline WedgeTMatrix wedge_tmatrix(double lambda, double theta0) {
  if (!(lambda >= 0)) throw std::domain_error("wedge_tmatrix: lambda must be >= 0");
  if (!(theta0 > 0.0 && theta0 < kPi))
    throw std::domain_error("wedge_tmatrix: theta0 must lie in (0, pi)");

  WedgeTMatrix t;
  const double a = lambda * theta0;
  const double b = lambda * (kPi - theta0);
  if (lambda == 0.0) {
    t.tM_plus = theta0 / (kPi - theta0);  // sinh ratio limit
    t.tM_minus = 1.0;
  } else {
    // log-scaled for large lambda; both ratios stay finite
    t.tM_plus = std::exp(log_sinh(a) - log_sinh(b));
    t.tM_minus = std::exp(log_cosh(a) - log_cosh(b));
  }
  t.tN_plus = -t.tM_minus;
  t.tN_minus = -t.tM_plus;
  return t;
}

// Closed form:
// U_hat = -3/(8 pi sin^4(p(theta-theta0))) [ p^4 - (2/3) p^2 (p^2-1) sin^2(p(theta-theta0))
//         - (1/135)(p^2-1)(p^2+11) sin^4(p(theta-theta0)) ],  p = pi/(2(pi-theta0)).
inline double wedge_energy_closed(const WedgeConfig& cfg) {
  cfg.validate();
  const double p = cfg.p();
  const double s = std::sin(p * (cfg.theta - cfg.theta0));
  if (std::fabs(s) < 1e-14)
    throw std::domain_error("wedge_energy_closed: particle on an image plane of the wedge");
  const double s2 = s * s;
  const double p2 = p * p;
  const double bracket =
      p2 * p2 - (2.0 / 3.0) * p2 * (p2 - 1.0) * s2 - (1.0 / 135.0) * (p2 - 1.0) * (p2 + 11.0) * s2 * s2;
  return -3.0 / (8.0 * kPi * s2 * s2) * bracket;
}

// The analytically continued lambda-integrand,
//   (lambda + lambda^3) [ coth(pi lam)/3 - coth(2(pi-theta0) lam)/3
//                         + cosh(2(pi-theta) lam)/sinh(2(pi-theta0) lam) ],
// assembled from the cylindrical-integral identities
//   int_0^inf x[(x^2+lam^2) K_il(x)^2 + x^2 K_il'(x)^2] dx = pi lam (1+lam^2)/sinh(pi lam),
//   int_0^inf x^3 K_il(x)^2 dx = pi lam (1+lam^2)/(3 sinh(pi lam)).
// Finite at lambda -> 0 (limit 1/(3 pi) + 1/(3(pi - theta0))) and decaying
// like lam^3 exp(-2 min(theta - theta0, theta0) lam).
inline double wedge_lambda_integrand(double lambda, const WedgeConfig& cfg) {
  cfg.validate();
  if (!(lambda > 0)) throw std::domain_error("wedge_lambda_integrand: lambda must be > 0");
  const double a = kPi - cfg.theta;    // >= 0
  const double c = kPi - cfg.theta0;   // > a
  const double coth_pi = 1.0 / std::tanh(kPi * lambda);
  const double coth_2c = 1.0 / std::tanh(2.0 * c * lambda);
  // cosh(2 a lam)/sinh(2 c lam), a < c: exponent never overflows in log form
  double ratio;
  if (a == 0.0) {
    ratio = std::exp(-log_sinh(2.0 * c * lambda));
  } else {
    ratio = std::exp(log_cosh(2.0 * a * lambda) - log_sinh(2.0 * c * lambda));
  }
  return (lambda + lambda * lambda * lambda) * (coth_pi / 3.0 - coth_2c / 3.0 + ratio);
}

// Absolute energy from the lambda integral: U_hat = -(1/pi) int_0^inf integrand.
inline Estimate wedge_energy_integral(const WedgeConfig& cfg, const QuadSpec& spec) {
  cfg.validate();
  const double rate =
      std::min({2.0 * (cfg.theta - cfg.theta0), 4.0 * (kPi - cfg.theta0), 2.0 * kPi});
  auto f = [&cfg](double lam) { return wedge_lambda_integrand(lam, cfg); };
  Estimate e = integrate_semi_infinite(f, 0.0, rate, spec);
  e.value /= -kPi;
  e.err /= kPi;
  return e;
}

// Relative energy U_hat(theta) - U_hat(theta_ref): only the theta-dependent
// bracket term survives the difference,
//   -(1/pi) int_0^inf (lam + lam^3)
//       [cosh(2(pi-theta) lam) - cosh(2(pi-theta_ref) lam)] / sinh(2(pi-theta0) lam) dlam,
// absolutely convergent with decay 2(min(theta, theta_ref) - theta0).
inline Estimate wedge_energy_relative(const WedgeConfig& cfg, double theta_ref,
                                      const QuadSpec& spec) {
  cfg.validate();
  if (!(theta_ref > cfg.theta0 && theta_ref <= kPi))
    throw std::domain_error("wedge_energy_relative: theta_ref must lie in (theta0, pi]");
  const double a = kPi - cfg.theta;
  const double b = kPi - theta_ref;
  const double c = kPi - cfg.theta0;
  if (cfg.theta == theta_ref) return {0.0, 0.0, 0, true};

  auto f = [&](double lam) {
    // cosh X - cosh Y = 2 sinh((X+Y)/2) sinh((X-Y)/2), stable at small lam
    const double s1 = (a + b) * lam;
    const double s2 = (a - b) * lam;
    const double s3 = 2.0 * c * lam;
    double v;
    if (s3 < 1.0) {
      v = 2.0 * std::sinh(s1) * std::sinh(s2) / std::sinh(s3);
    } else {
      const double mag = log_sinh(s1) + log_sinh(std::fabs(s2)) - log_sinh(s3) + std::log(2.0);
      v = (s2 < 0 ? -1.0 : 1.0) * std::exp(mag);
    }
    return (lam + lam * lam * lam) * v;
  };
  const double rate = 2.0 * (std::min(cfg.theta, theta_ref) - cfg.theta0);
  Estimate e = integrate_semi_infinite(f, 0.0, rate, spec);
  e.value /= -kPi;
  e.err /= kPi;
  return e;
}

}  // namespace casimir
