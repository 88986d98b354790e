#pragma once

// Independent oracles for the special-function layer. Deliberately separate
// implementations: long-double direct series, a Lanczos complex gamma, the
// classical K_0 series/asymptotic split, and the Mehler-Dirichlet integral
// representation. None of them share code with the library paths they check.

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>

#include "casimir/quadrature.hpp"

namespace oracles {

// Direct extended-precision summation of the conical series (plain long
// double; no log scaling, usable while the sums stay in range).
struct ConicalLD {
  long double p;
  long double dp_dpsi;
};

inline ConicalLD conical_series_long_double(int m, long double lambda, long double psi) {
  const long double z = std::sin(psi / 2) * std::sin(psi / 2);
  const long double lam_sq = lambda * lambda + 0.25L;
  long double term = 1.0L, S = 0.0L, Sp = 0.0L;
  for (long k = 0; k < 2000000; ++k) {
    S += term;
    if (k >= 1) Sp += (long double)k * term / z;
    const long double ratio =
        z * ((long double)k * (k + 1) + lam_sq) / ((long double)(k + 1 + m) * (k + 1));
    term *= ratio;
    if (k > 16 && ratio < 1.0L && term < 1e-24L * S) break;
  }
  long double pref = 1.0L;
  for (int j = 1; j <= m; ++j) pref *= std::tan(psi / 2) / (long double)j;
  ConicalLD out;
  out.p = pref * S;
  out.dp_dpsi = pref * ((long double)m / std::sin(psi) * S + std::sin(psi) / 2 * Sp);
  return out;
}

// Lanczos approximation for Gamma(z), z complex, Re z handled by reflection.
inline std::complex<double> complex_gamma(std::complex<double> z) {
  static const double g[9] = {0.99999999999980993,  676.5203681218851,   -1259.1392167224028,
                              771.32342877765313,   -176.61502916214059, 12.507343278686905,
                              -0.13857109526572012, 9.9843695780195716e-6,
                              1.5056327351493116e-7};
  if (z.real() < 0.5) {
    // Gamma(z) Gamma(1-z) = pi / sin(pi z)
    const std::complex<double> pi(3.14159265358979323846, 0.0);
    return pi / (std::sin(pi * z) * complex_gamma(1.0 - z));
  }
  z -= 1.0;
  std::complex<double> x = g[0];
  for (int i = 1; i < 9; ++i) x += g[i] / (z + (double)i);
  const std::complex<double> t = z + 7.5;
  return std::sqrt(2.0 * 3.14159265358979323846) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

// Classical K_0: ascending series (long double, to survive the
// log-versus-sum cancellation) below x = 6, and the textbook integral form
// K_0 = 2 e^{-x} int_0^inf e^{-x u^2} / sqrt(u^2 + 2) du above it.
inline double bessel_k0_classical(double x) {
  if (x <= 6.0) {
    // K_0 = -(ln(x/2) + gamma) I_0(x) + sum_{k>=1} (x/2)^{2k}/(k!)^2 H_k
    const long double gamma = 0.577215664901532860606512090082L;
    const long double t = (long double)x / 2;
    long double i0 = 1, sum = 0, term = 1, hk = 0;
    for (int k = 1; k < 80; ++k) {
      term *= t * t / ((long double)k * k);
      i0 += term;
      hk += 1.0L / k;
      sum += term * hk;
    }
    return (double)(-(std::log(t) + gamma) * i0 + sum);
  }
  auto f = [x](double u) { return std::exp(-x * u * u) / std::sqrt(u * u + 2.0); };
  casimir::QuadSpec spec;
  spec.rel_tol = 1e-13;
  spec.abs_tol = 1e-300;
  const double upper = std::sqrt(45.0 / x);
  const auto est = casimir::integrate_finite(f, 0.0, upper, spec);
  return 2.0 * std::exp(-x) * est.value;
}

// Mehler-Dirichlet representation for m = 0:
//   P_{i lam - 1/2}(cos th) = (2/pi) int_0^th cosh(lam t)/sqrt(2 cos t - 2 cos th) dt,
// evaluated after t = th - u^2, using the exact product form
// 2(cos t - cos th) = 4 sin((th + t)/2) sin(u^2/2) which is stable at the
// endpoint.
inline double conical_mehler_dirichlet(double lambda, double theta,
                                       const casimir::QuadSpec& spec) {
  auto f = [lambda, theta](double u) {
    const double t = theta - u * u;
    const double s = 4.0 * std::sin(0.5 * (theta + t)) * std::sin(0.5 * u * u);
    return std::cosh(lambda * t) * 2.0 * u / std::sqrt(s);
  };
  const auto est = casimir::integrate_finite(f, 0.0, std::sqrt(theta), spec);
  return 2.0 / 3.14159265358979323846 * est.value;
}

// 4th-order central difference d/dx f at x with step h.
inline double central_diff4(const std::function<double(double)>& f, double x, double h) {
  return (-f(x + 2 * h) + 8 * f(x + h) - 8 * f(x - h) + f(x - 2 * h)) / (12 * h);
}

}  // namespace oracles
