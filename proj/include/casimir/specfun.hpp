#pragma once

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/log_signed.hpp"
#include "casimir/quadrature.hpp"

// Special functions of imaginary order / complex degree that the energy
// formulas consume: Ferrers (conical) functions P^{-m}_{i*lam - 1/2}(cos psi)
// with their angle derivatives, and the modified Bessel function K_{i*lam}(x)
// with its derivative. Everything is returned log-scaled; the raw values span
// exp(+-700) and beyond while the physical combinations stay O(1).

namespace casimir {

// Conical function value and its derivative with respect to the angle psi,
// where the argument is cos(psi).
struct ConicalValue {
  LogSigned p;
  LogSigned dp_dpsi;
};

namespace detail {

inline void check_conical_args(int m, double lambda, double psi) {
  if (m < 0) throw std::domain_error("conical: order m must be >= 0");
  if (!(lambda >= 0)) throw std::domain_error("conical: lambda must be >= 0");
  if (!(psi > 0.0 && psi < kPi))
    throw std::domain_error("conical: psi must lie strictly inside (0, pi)");
}

// log of rho_m(lambda) = 1 / prod_{j=0}^{m-1} (lambda^2 + (j+1/2)^2), the
// (positive) Ferrers connection constant P^{-m} = rho_m P^{m}.
inline double conical_log_rho(int m, double lambda) {
  double s = 0.0;
  for (int j = 0; j < m; ++j) s -= std::log(lambda * lambda + (j + 0.5) * (j + 0.5));
  return s;
}

}  // namespace detail

// P^{-m}_{i*lambda-1/2}(cos psi) and d/dpsi of it, via the hypergeometric
// series in z = (1 - cos psi)/2 = sin^2(psi/2) with prefactor
// tan^m(psi/2) / m!.
//
// For nu = i*lambda - 1/2 the coefficient recurrence is purely real and
// positive: (j - nu)(j + 1 + nu) = (j + 1/2 - i*lambda)(j + 1/2 + i*lambda)
//                                = j(j+1) + lambda^2 + 1/4,
// so c_0 = 1, c_{k+1} = c_k (k(k+1) + lambda^2 + 1/4) / ((k+1+m)(k+1)).
// Every term is positive (no cancellation); sums are renormalized by a
// running exponent because partial sums grow like exp(2 lambda sqrt(z)).
inline ConicalValue conical_p_neg(int m, double lambda, double psi) {
  detail::check_conical_args(m, lambda, psi);

  const double sh = std::sin(0.5 * psi);
  const double z = sh * sh;
  if (z > 0.999)
    throw accuracy_error("conical: series argument z > 0.999 (psi too close to pi)", z);

  const double lam_sq = lambda * lambda + 0.25;
  constexpr long kMaxTerms = 1000000;
  constexpr double kBig = 1e250;
  const double kLogBig = std::log(kBig);
  constexpr double kSeriesRelTol = 1e-17;

  double term = 1.0;  // c_k z^k, renormalized
  double sum = 0.0;   // S  = sum c_k z^k
  double dsum = 0.0;  // S' = sum k c_k z^{k-1}
  double expo = 0.0;  // true quantity = stored * exp(expo)
  bool converged = false;

  for (long k = 0; k < kMaxTerms; ++k) {
    sum += term;
    if (k >= 1) dsum += (double)k * term / z;
    assert(sum > 0.0 && "conical series partial sums must stay positive");

    const double ratio =
        z * ((double)k * (k + 1) + lam_sq) / ((double)(k + 1 + m) * (k + 1));
    term *= ratio;  // now t_{k+1}

    // Every later ratio is bounded by max(ratio, z): the coefficient factor
    // (j(j+1)+lam^2+1/4)/((j+1+m)(j+1)) decreases while > 1 and stays <= 1
    // once it has crossed, so the geometric tail bound below is rigorous.
    const double rbar = std::max(ratio, z);
    if (rbar < 1.0 && k >= 2) {
      const double one_minus = 1.0 - rbar;
      const double tail_s = term / one_minus;
      const double tail_d =
          term * ((double)(k + 1) / one_minus + rbar / (one_minus * one_minus)) / z;
      if (tail_s <= kSeriesRelTol * sum && tail_d <= kSeriesRelTol * dsum) {
        converged = true;
        break;
      }
    }
    if (sum > kBig || dsum > kBig || term > kBig) {
      sum /= kBig;
      dsum /= kBig;
      term /= kBig;
      expo += kLogBig;
    }
  }
  if (!converged)
    throw accuracy_error("conical: series not converged within term cap", term / sum);

  const double log_pref =
      (m == 0) ? 0.0 : m * std::log(std::tan(0.5 * psi)) - std::lgamma(m + 1.0);
  const double sin_psi = std::sin(psi);
  // d/dpsi = pref * [ (m / sin psi) S + (sin psi / 2) S' ]; both pieces positive.
  const double bracket = (m / sin_psi) * sum + 0.5 * sin_psi * dsum;

  ConicalValue out;
  out.p = LogSigned::from_log(+1, log_pref + expo + std::log(sum));
  out.dp_dpsi = LogSigned::from_log(+1, log_pref + expo + std::log(bracket));
  return out;
}

// rho_m(lambda) with P^{-m}_{i*lam-1/2}(x) = rho_m(lambda) * P^{m}_{i*lam-1/2}(x)
// for the Ferrers functions on (-1, 1):
//   rho_m = 1 / prod_{j=0}^{m-1} (lambda^2 + (j+1/2)^2)
//         = (-1)^m  Gamma(i*lam + 1/2 - m) / Gamma(i*lam + 1/2 + m).
// Positive for all m; only negative-order functions are ever evaluated by
// series, positive orders come from this constant.
inline double conical_ratio_rho(int m, double lambda) {
  if (m < 0) throw std::domain_error("conical_ratio_rho: m must be >= 0");
  if (!(lambda >= 0)) throw std::domain_error("conical_ratio_rho: lambda must be >= 0");
  return std::exp(detail::conical_log_rho(m, lambda));
}

// P^{+m}_{i*lambda-1/2}(cos psi) and d/dpsi, as conical_p_neg / rho_m in
// log-scaled arithmetic.
inline ConicalValue conical_p_pos(int m, double lambda, double psi) {
  ConicalValue v = conical_p_neg(m, lambda, psi);
  const double log_rho = detail::conical_log_rho(m, lambda);
  ConicalValue out;
  out.p = LogSigned::from_log(v.p.sign(), v.p.log_mag() - log_rho);
  out.dp_dpsi = LogSigned::from_log(v.dp_dpsi.sign(), v.dp_dpsi.log_mag() - log_rho);
  return out;
}

namespace detail {

// Simultaneous quadrature of the three K_{i*lambda} integrands
//   j0 = int_0^T exp(-x(cosh t - 1)) cos(lambda t) dt
//   j1 = ... * cosh t
//   j2 = ... * (1/2 - x cosh t)
// in long double, so that K = exp(-x) j0, K' = -exp(-x) j1 and the
// d/dr(r k) combination use one pass over the same nodes. The oscillation
// cos(lambda t) is resolved by pre-splitting into half-period panels; the
// envelope concentrates everything near t = 0.
struct KIntegrals {
  long double j0 = 0, j1 = 0, j2 = 0;
  long evaluations = 0;
};

inline KIntegrals bessel_k_integrals(double lambda, double x) {
  using Real = long double;
  const Real xl = x;
  const Real laml = lambda;

  // Truncate where the envelope is ~1e-24 of its peak.
  const Real upper = std::acosh((Real)1 + (Real)55 / xl);

  struct Vec3 {
    Real v[3];
  };
  auto f = [&](Real t) -> Vec3 {
    // cosh t - 1 without cancellation for small t
    const Real sh = std::sinh(t / 2);
    const Real cm1 = 2 * sh * sh;
    const Real env = std::exp(-xl * cm1) * std::cos(laml * t);
    const Real ch = cm1 + 1;
    return {{env, env * ch, env * ((Real)0.5 - xl * ch)}};
  };

  struct Panel {
    Real a, b;
    Real val[3];
    Real err;
  };
  using K = GK15<Real>;
  auto eval_panel = [&](Real a, Real b) -> Panel {
    const Real c = (a + b) / 2, h = (b - a) / 2;
    Vec3 fc = f(c);
    Real resk[3], resg[3];
    for (int q = 0; q < 3; ++q) {
      resk[q] = K::wgk[7] * fc.v[q];
      resg[q] = K::wg[3] * fc.v[q];
    }
    for (int i = 0; i < 7; ++i) {
      const Real dx = h * K::xgk[i];
      Vec3 f1 = f(c - dx), f2 = f(c + dx);
      for (int q = 0; q < 3; ++q) {
        const Real s = f1.v[q] + f2.v[q];
        resk[q] += K::wgk[i] * s;
        if (i % 2 == 1) resg[q] += K::wg[i / 2] * s;
      }
    }
    Panel p;
    p.a = a;
    p.b = b;
    p.err = 0;
    for (int q = 0; q < 3; ++q) {
      p.val[q] = resk[q] * h;
      const Real e = std::fabs((resk[q] - resg[q]) * h);
      p.err = std::max(p.err, e);
    }
    return p;
  };

  // Pre-split by the cosine half-period and by the envelope scale.
  const Real osc_width = (Real)kPi / (2 * std::max(laml, (Real)1));
  const Real env_width = std::max((Real)0.05L, (Real)1 / std::sqrt(xl + 1));
  const Real width = std::min({osc_width, env_width, (Real)0.5L});
  long n0 = (long)std::ceil((double)(upper / width));
  n0 = std::clamp(n0, (long)4, (long)6000);

  std::vector<Panel> panels;
  panels.reserve((size_t)n0 + 64);
  KIntegrals out;
  for (long i = 0; i < n0; ++i) {
    const Real a = upper * (Real)i / (Real)n0;
    const Real b = upper * (Real)(i + 1) / (Real)n0;
    panels.push_back(eval_panel(a, b));
    out.evaluations += 15;
  }

  auto worse = [](const Panel& s, const Panel& t) { return s.err < t.err; };
  std::make_heap(panels.begin(), panels.end(), worse);

  const long budget = 2 * n0 + 400;
  long splits = 0;
  while (splits < budget) {
    Real tot_err = 0, scale = 0;
    for (const auto& p : panels) {
      tot_err += p.err;
      scale = std::max({scale, std::fabs(p.val[0]), std::fabs(p.val[1]), std::fabs(p.val[2])});
    }
    const Real target = std::max((Real)1e-19L * scale * (Real)panels.size(),
                                 std::numeric_limits<Real>::min() * (Real)1e6);
    if (tot_err <= target) break;

    std::pop_heap(panels.begin(), panels.end(), worse);
    Panel w = panels.back();
    panels.pop_back();
    const Real mid = (w.a + w.b) / 2;
    if (!(mid > w.a && mid < w.b)) {
      panels.push_back(w);
      std::push_heap(panels.begin(), panels.end(), worse);
      break;
    }
    panels.push_back(eval_panel(w.a, mid));
    std::push_heap(panels.begin(), panels.end(), worse);
    panels.push_back(eval_panel(mid, w.b));
    std::push_heap(panels.begin(), panels.end(), worse);
    out.evaluations += 30;
    ++splits;
  }
  if (splits >= budget) {
    Real tot_err = 0, scale = 0;
    for (const auto& p : panels) {
      tot_err += p.err;
      scale = std::max(scale, std::fabs(p.val[0]));
    }
    if (tot_err > (Real)1e-13L * std::max(scale, (Real)1e-30L))
      throw accuracy_error("bessel_k_imag: oscillatory quadrature failed to converge",
                           (double)(tot_err / std::max(scale, (Real)1e-300L)));
  }

  for (const auto& p : panels) {
    out.j0 += p.val[0];
    out.j1 += p.val[1];
    out.j2 += p.val[2];
  }
  return out;
}

}  // namespace detail

// K_{i*lambda}(x), its x-derivative, and the underflow flag for the region
// lambda > 50 max(1, x) where the sech(pi lambda) envelope of every energy
// integrand puts the value below any tolerance used here.
struct BesselKImag {
  LogSigned k;      // K_{i lambda}(x)
  LogSigned dk_dx;  // d/dx K_{i lambda}(x)
  bool underflow = false;
};

inline BesselKImag bessel_k_imag_full(double lambda, double x) {
  if (!(x > 0)) throw std::domain_error("bessel_k_imag: x must be > 0");
  if (!(lambda >= 0)) throw std::domain_error("bessel_k_imag: lambda must be >= 0");
  if (lambda > 50.0 * std::max(1.0, x)) return {LogSigned{}, LogSigned{}, true};

  const auto ji = detail::bessel_k_integrals(lambda, x);
  BesselKImag out;
  if (ji.j0 != 0)
    out.k = LogSigned::from_log(ji.j0 > 0 ? +1 : -1,
                                -x + (double)std::log(std::fabs(ji.j0)));
  if (ji.j1 != 0)
    out.dk_dx = LogSigned::from_log(ji.j1 > 0 ? -1 : +1,
                                    -x + (double)std::log(std::fabs(ji.j1)));
  return out;
}

// K_{i*lambda}(x) via adaptive quadrature of
// int_0^inf exp(-x cosh t) cos(lambda t) dt, log-scaled.
inline LogSigned bessel_k_imag(double lambda, double x) {
  return bessel_k_imag_full(lambda, x).k;
}

// Modified spherical Bessel function of imaginary order,
// k_{i*lambda-1/2}(x) = sqrt(2/(pi x)) K_{i*lambda}(x).
inline LogSigned spherical_k_imag(double lambda, double x) {
  LogSigned k = bessel_k_imag(lambda, x);
  if (k.is_zero()) return k;
  const double log_factor = 0.5 * (std::log(2.0 / kPi) - std::log(x));
  return LogSigned::from_log(k.sign(), k.log_mag() + log_factor);
}

// Radial pair used by the kappa-resolved energy: k_{i*lam-1/2}(x) and
// d/dr ( r k_{i*lam-1/2}(kappa r) ) = sqrt(2/(pi x)) (K/2 + x K'),  x = kappa r.
// The K/2 + x K' combination is accumulated directly under the integral sign
// (integrand weight 1/2 - x cosh t), not formed by subtraction.
struct SphericalKPair {
  LogSigned k;
  LogSigned rderiv;  // d/dr (r k(kappa r)) as a function of x = kappa r
  bool underflow = false;
};

inline SphericalKPair spherical_k_pair(double lambda, double x) {
  if (!(x > 0)) throw std::domain_error("spherical_k_pair: x must be > 0");
  if (!(lambda >= 0)) throw std::domain_error("spherical_k_pair: lambda must be >= 0");
  if (lambda > 50.0 * std::max(1.0, x)) return {LogSigned{}, LogSigned{}, true};

  const auto ji = detail::bessel_k_integrals(lambda, x);
  const double log_factor = 0.5 * (std::log(2.0 / kPi) - std::log(x));
  SphericalKPair out;
  if (ji.j0 != 0)
    out.k = LogSigned::from_log(ji.j0 > 0 ? +1 : -1,
                                -x + (double)std::log(std::fabs(ji.j0)) + log_factor);
  if (ji.j2 != 0)
    out.rderiv = LogSigned::from_log(ji.j2 > 0 ? +1 : -1,
                                     -x + (double)std::log(std::fabs(ji.j2)) + log_factor);
  return out;
}

inline LogSigned spherical_k_imag_rderiv(double lambda, double kappa, double r) {
  if (!(kappa > 0) || !(r > 0))
    throw std::domain_error("spherical_k_imag_rderiv: kappa and r must be > 0");
  return spherical_k_pair(lambda, kappa * r).rderiv;
}

}  // namespace casimir
