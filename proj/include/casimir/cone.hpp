#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "casimir/errors.hpp"
#include "casimir/log_signed.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/specfun.hpp"

// Casimir-Polder energy of an isotropic polarizable particle near a perfectly
// conducting cone, from the analytically continued angular-momentum
// representation:
//
//   U_hat = (1/8) { sum_m  int_0^inf dlam  lam sech(pi lam) tanh(pi lam)
//                     [ 2 T^N_{lam m} (lam^2 + 1/4) P^m(-cos theta)^2
//                       + (T^N - T^M) ( (d_theta P^m(-cos theta))^2
//                                       + m^2/sin^2(theta) P^m(-cos theta)^2 ) ]
//                   - (1/pi) sin^2(theta0) / (cos theta - cos theta0)^2 }
//
// with P^m = P^m_{i lam - 1/2} and U_hat = U r^4/(alpha hbar c). The last
// term is the ghost-mode contribution. On the axis (theta = pi) only
// m = -1, 0, +1 survive and the m-sum collapses to a single integral.

namespace casimir {

struct ConeConfig {
  double theta0;  // half-opening angle, in (0, pi)
  double theta;   // particle polar angle, theta0 < theta <= pi
  double r = 1.0; // spherical radius from the cone vertex

  void validate() const {
    if (!(theta0 > 0.0 && theta0 < kPi))
      throw std::domain_error("cone: theta0 must lie in (0, pi)");
    if (!(theta > theta0)) throw std::domain_error("cone: theta must exceed theta0");
    if (!(theta <= kPi)) throw std::domain_error("cone: theta must not exceed pi");
    if (!(r > 0.0)) throw std::domain_error("cone: r must be positive");
  }
};

struct TMatrixPair {
  double tN;
  double tM;
};

struct EnergyResult {
  double u_hat = 0.0;
  double err = 0.0;
  int m_max_used = 0;
  // Channel breakdown of u_hat: electric collects every T^N term, magnetic
  // the -T^M term, ghost the closed-form ghost mode. u_hat = sum of the three.
  double electric = 0.0;
  double magnetic = 0.0;
  double ghost = 0.0;
  bool converged = false;
};

// General (theta < pi) evaluations within this distance of the axis are
// routed to the dedicated on-axis path: the angular weights degenerate as
// powers of sin(theta) there and lose precision.
inline constexpr double kOnAxisWindow = 1e-3;

namespace detail {

struct TMatrixLog {
  LogSigned tN;
  LogSigned tM;
};

// T^N = -P^{-m}(cos theta0) / P^{m}(-cos theta0),
// T^M = -d_theta0 P^{-m}(cos theta0) / d_theta0 P^{m}(-cos theta0),
// evaluated from negative-order conical functions and rho_m only. Note
// d_theta0 P^{m}(-cos theta0) = -(1/rho_m) dp_dpsi at psi = pi - theta0.
// tN < 0 < tM always (series positivity), so tN - tM never cancels.
inline TMatrixLog cone_tmatrix_log(double lambda, int m, double theta0) {
  const ConicalValue at_t0 = conical_p_neg(m, lambda, theta0);
  const ConicalValue at_sup = conical_p_neg(m, lambda, kPi - theta0);
  const double log_rho = conical_log_rho(m, lambda);
  TMatrixLog t;
  t.tN = LogSigned::from_log(-1, log_rho + at_t0.p.log_mag() - at_sup.p.log_mag());
  t.tM = LogSigned::from_log(+1, log_rho + at_t0.dp_dpsi.log_mag() - at_sup.dp_dpsi.log_mag());
  return t;
}

// lam * sech(pi lam) * tanh(pi lam), log-scaled.
inline LogSigned sech_tanh_weight(double lambda) {
  return LogSigned::from_log(
      +1, std::log(lambda) + log_tanh(kPi * lambda) - log_cosh(kPi * lambda));
}

enum class Channel { electric, magnetic };

// One channel of the lambda-integrand at fixed m. electric carries the
// 2 T^N (lam^2+1/4) A + T^N B terms, magnetic carries -T^M B.
inline LogSigned cone_lambda_integrand_log(double lambda, int m, const ConeConfig& cfg,
                                           Channel ch) {
  const TMatrixLog t = cone_tmatrix_log(lambda, m, cfg.theta0);
  const ConicalValue av = conical_p_neg(m, lambda, kPi - cfg.theta);
  const double log_rho = conical_log_rho(m, lambda);
  // A = P^m(-cos theta)^2, B = (d_theta P^m)^2 + m^2/sin^2(theta) A
  const LogSigned A = LogSigned::from_log(+1, 2.0 * (av.p.log_mag() - log_rho));
  LogSigned B = LogSigned::from_log(+1, 2.0 * (av.dp_dpsi.log_mag() - log_rho));
  if (m > 0) {
    const double s = std::sin(cfg.theta);
    B = B + LogSigned::from_value((double)m * m / (s * s)) * A;
  }
  const LogSigned pre = sech_tanh_weight(lambda);
  const LogSigned lam_sq = LogSigned::from_value(lambda * lambda + 0.25);
  if (ch == Channel::electric)
    return pre * t.tN * (LogSigned::from_value(2.0) * lam_sq * A + B);
  return pre * (-t.tM) * B;
}

inline double to_double_or_accuracy_error(const LogSigned& v, const char* what) {
  try {
    return v.value_allowing_underflow();
  } catch (const std::range_error&) {
    throw accuracy_error(what, v.log_mag());
  }
}

// Ratio hint for the m-sum: the ghost factor q = [tan(theta0/2)/tan(theta/2)]^2.
inline double m_sum_ratio(double theta0, double theta) {
  const double q = std::tan(0.5 * theta0) / std::tan(0.5 * theta);
  return std::clamp(q * q, 1e-12, 0.999);
}

}  // namespace detail

// tN = -P^{-m}(cos theta0)/P^m(-cos theta0), tM the derivative analog.
// Negative m maps to |m| (dependence is on m^2 and the rho factors cancel
// consistently in the ratios).
inline TMatrixPair cone_tmatrix(double lambda, int m, double theta0) {
  if (!(lambda >= 0)) throw std::domain_error("cone_tmatrix: lambda must be >= 0");
  if (!(theta0 > 0.0 && theta0 < kPi))
    throw std::domain_error("cone_tmatrix: theta0 must lie in (0, pi)");
  const auto t = detail::cone_tmatrix_log(lambda, std::abs(m), theta0);
  return {t.tN.value(), t.tM.value()};
}

// Angular weights of the master formula at (lambda, m, theta):
//   A = P^m_{i lam-1/2}(-cos theta)^2
//   B = (d_theta P^m(-cos theta))^2 + m^2/sin^2(theta) A
// Both grow like exp(2 lam (pi - theta)); returned log-scaled.
struct AngularWeights {
  LogSigned A;
  LogSigned B;
};

inline AngularWeights cone_angular_weights(double lambda, int m, double theta) {
  if (m < 0) throw std::domain_error("cone_angular_weights: m must be >= 0");
  if (!(theta > 0.0 && theta < kPi))
    throw std::domain_error("cone_angular_weights: theta must lie in (0, pi); use the on-axis path at theta = pi");
  const ConicalValue av = conical_p_neg(m, lambda, kPi - theta);
  const double log_rho = detail::conical_log_rho(m, lambda);
  AngularWeights w;
  w.A = LogSigned::from_log(+1, 2.0 * (av.p.log_mag() - log_rho));
  w.B = LogSigned::from_log(+1, 2.0 * (av.dp_dpsi.log_mag() - log_rho));
  if (m > 0) {
    const double s = std::sin(theta);
    w.B = w.B + LogSigned::from_value((double)m * m / (s * s)) * w.A;
  }
  return w;
}

// Full lambda-integrand of the master formula at fixed m:
//   lam sech(pi lam) tanh(pi lam) [2 tN (lam^2+1/4) A + (tN - tM) B],
// assembled in log-scaled arithmetic with one final exponentiation. The net
// envelope decays like exp(-2 lam (theta - theta0)).
inline double cone_lambda_integrand(double lambda, int m, const ConeConfig& cfg) {
  cfg.validate();
  if (!(lambda > 0)) throw std::domain_error("cone_lambda_integrand: lambda must be > 0");
  const LogSigned e = detail::cone_lambda_integrand_log(lambda, m, cfg, detail::Channel::electric);
  const LogSigned mg = detail::cone_lambda_integrand_log(lambda, m, cfg, detail::Channel::magnetic);
  return detail::to_double_or_accuracy_error(
      e + mg, "cone_lambda_integrand: overflow (theta too close to theta0 for double range)");
}

// Closed-form ghost-mode contribution to the braced master-formula quantity:
//   -(1/pi) sin^2(theta0) / (cos theta - cos theta0)^2,
// equal to -(1/pi) tan^2(theta0/2) at theta = pi.
inline double ghost_term(double theta, double theta0) {
  if (theta == theta0) throw std::domain_error("ghost_term: theta must differ from theta0");
  const double d = std::cos(theta) - std::cos(theta0);
  const double s = std::sin(theta0);
  return -(s * s) / (d * d) / kPi;
}

// On-axis specialization (theta = pi): only m = -1, 0, +1 contribute and
//   U_hat = (1/8) { int_0^inf lam (lam^2+1/4) sech tanh
//                     [2 tN(lam,0) + (lam^2+1/4)(tN(lam,1) - tM(lam,1))] dlam
//                   - (1/pi) tan^2(theta0/2) }.
inline EnergyResult cone_energy_on_axis(double r, double theta0, const QuadSpec& spec) {
  if (!(theta0 > 0.0 && theta0 < kPi))
    throw std::domain_error("cone_energy_on_axis: theta0 must lie in (0, pi)");
  if (!(r > 0.0)) throw std::domain_error("cone_energy_on_axis: r must be positive");
  spec.validate();

  auto electric = [theta0](double lam) {
    const auto t0 = detail::cone_tmatrix_log(lam, 0, theta0);
    const auto t1 = detail::cone_tmatrix_log(lam, 1, theta0);
    const LogSigned lam_sq = LogSigned::from_value(lam * lam + 0.25);
    const LogSigned pre = detail::sech_tanh_weight(lam) * lam_sq;
    const LogSigned bracket = LogSigned::from_value(2.0) * t0.tN + lam_sq * t1.tN;
    return detail::to_double_or_accuracy_error(pre * bracket, "cone_energy_on_axis: overflow");
  };
  auto magnetic = [theta0](double lam) {
    const auto t1 = detail::cone_tmatrix_log(lam, 1, theta0);
    const LogSigned lam_sq = LogSigned::from_value(lam * lam + 0.25);
    const LogSigned pre = detail::sech_tanh_weight(lam) * lam_sq;
    return detail::to_double_or_accuracy_error(pre * lam_sq * (-t1.tM),
                                               "cone_energy_on_axis: overflow");
  };

  const double rate = 2.0 * (kPi - theta0);
  const Estimate e = integrate_semi_infinite(electric, 0.0, rate, spec);
  const Estimate mg = integrate_semi_infinite(magnetic, 0.0, rate, spec);
  const double t = std::tan(0.5 * theta0);

  EnergyResult out;
  out.electric = e.value / 8.0;
  out.magnetic = mg.value / 8.0;
  out.ghost = -(t * t) / kPi / 8.0;
  out.u_hat = out.electric + out.magnetic + out.ghost;
  out.err = (e.err + mg.err) / 8.0;
  out.m_max_used = 1;
  out.converged = e.converged && mg.converged;
  return out;
}

// Master-formula energy. The m-sum is m = 0 plus twice m >= 1 (m <-> -m
// symmetry), lambda-integrated first per m with the exponential envelope
// rate 2(theta - theta0), then truncated with the geometric ratio hint
// q = [tan(theta0/2)/tan(theta/2)]^2.
inline EnergyResult cone_energy(const ConeConfig& cfg, const QuadSpec& spec) {
  cfg.validate();
  spec.validate();
  if (cfg.theta > kPi - kOnAxisWindow)
    return cone_energy_on_axis(cfg.r, cfg.theta0, spec);

  const double rate = 2.0 * (cfg.theta - cfg.theta0);
  bool all_converged = true;
  double err_sum = 0.0;

  auto channel_integral = [&](int m, detail::Channel ch) {
    auto f = [&, m, ch](double lam) {
      return detail::to_double_or_accuracy_error(
          detail::cone_lambda_integrand_log(lam, m, cfg, ch),
          "cone_energy: integrand overflow (theta too close to theta0)");
    };
    Estimate est = integrate_semi_infinite(f, 0.0, rate, spec);
    all_converged = all_converged && est.converged;
    err_sum += est.err;
    return est.value;
  };

  double electric = channel_integral(0, detail::Channel::electric);
  double magnetic = channel_integral(0, detail::Channel::magnetic);

  const double q = detail::m_sum_ratio(cfg.theta0, cfg.theta);
  QuadSpec sum_spec = spec;
  sum_spec.max_subdivisions = 400;  // term cap for the m-sum
  double electric_tail = 0.0, magnetic_tail = 0.0;
  auto term = [&](int m) {
    const double e = channel_integral(m, detail::Channel::electric);
    const double mg = channel_integral(m, detail::Channel::magnetic);
    electric_tail += 2.0 * e;
    magnetic_tail += 2.0 * mg;
    return 2.0 * (e + mg);
  };
  const Estimate msum = sum_truncated(term, q, sum_spec, 1);
  all_converged = all_converged && msum.converged;

  EnergyResult out;
  out.electric = (electric + electric_tail) / 8.0;
  out.magnetic = (magnetic + magnetic_tail) / 8.0;
  out.ghost = ghost_term(cfg.theta, cfg.theta0) / 8.0;
  out.u_hat = out.electric + out.magnetic + out.ghost;
  out.err = (err_sum + msum.err) / 8.0;
  out.m_max_used = (int)msum.evaluations;  // highest m evaluated (sum starts at 1)
  out.converged = all_converged;
  return out;
}

// dU_hat/dkappa, the kappa-resolved integrand of the master formula with the
// lambda integral done first (required for the kappa -> 0 behavior used by
// the Matsubara n = 0 term):
//   g(kappa) = (r^2 kappa / 2 pi) { sum_m int_0^inf dlam lam tanh(pi lam)
//                [ B (tN D^2 - tM x^2 k^2)/(lam^2+1/4) + tN (lam^2+1/4) A k^2 ]
//              - sin^2(theta0)/(cos theta - cos theta0)^2 e^{-2 x} },
// with k = k_{i lam-1/2}(x), D = d/dr(r k), x = kappa r. Normalized so that
// int_0^inf g dkappa = cone_energy(cfg).u_hat.
inline double cone_kappa_integrand(double kappa, const ConeConfig& cfg, const QuadSpec& spec) {
  cfg.validate();
  spec.validate();
  if (!(kappa > 0)) throw std::domain_error("cone_kappa_integrand: kappa must be > 0");
  const double x = kappa * cfg.r;
  const bool on_axis = cfg.theta > kPi - kOnAxisWindow;

  double lam_sum;
  if (on_axis) {
    auto f = [&](double lam) {
      const auto t0 = detail::cone_tmatrix_log(lam, 0, cfg.theta0);
      const auto t1 = detail::cone_tmatrix_log(lam, 1, cfg.theta0);
      const auto kp = spherical_k_pair(lam, x);
      if (kp.underflow) return 0.0;
      const LogSigned k2 = kp.k.squared();
      const LogSigned D2 = kp.rderiv.squared();
      const LogSigned lam_sq = LogSigned::from_value(lam * lam + 0.25);
      const LogSigned pre =
          LogSigned::from_log(+1, std::log(lam) + log_tanh(kPi * lam)) * lam_sq;
      const LogSigned bracket =
          (t0.tN - LogSigned::from_value(x * x) * t1.tM) * k2 + t1.tN * D2;
      return detail::to_double_or_accuracy_error(pre * bracket,
                                                 "cone_kappa_integrand: overflow");
    };
    const Estimate est =
        integrate_semi_infinite(f, 0.0, 2.0 * (kPi - cfg.theta0), spec);
    const double t = std::tan(0.5 * cfg.theta0);
    lam_sum = est.value - t * t * std::exp(-2.0 * x);
  } else {
    auto integral_m = [&](int m) {
      auto f = [&, m](double lam) {
        const auto t = detail::cone_tmatrix_log(lam, m, cfg.theta0);
        const auto w = cone_angular_weights(lam, m, cfg.theta);
        const auto kp = spherical_k_pair(lam, x);
        if (kp.underflow) return 0.0;
        const LogSigned k2 = kp.k.squared();
        const LogSigned D2 = kp.rderiv.squared();
        const LogSigned lam_sq = LogSigned::from_value(lam * lam + 0.25);
        const LogSigned pre = LogSigned::from_log(+1, std::log(lam) + log_tanh(kPi * lam));
        const LogSigned radial =
            (t.tN * D2 - t.tM * LogSigned::from_value(x * x) * k2) / lam_sq;
        return detail::to_double_or_accuracy_error(
            pre * (w.B * radial + t.tN * lam_sq * w.A * k2),
            "cone_kappa_integrand: overflow");
      };
      return integrate_semi_infinite(f, 0.0, 2.0 * (cfg.theta - cfg.theta0), spec).value;
    };
    double total = integral_m(0);
    const double q = detail::m_sum_ratio(cfg.theta0, cfg.theta);
    QuadSpec sum_spec = spec;
    sum_spec.max_subdivisions = 400;
    total += sum_truncated([&](int m) { return 2.0 * integral_m(m); }, q, sum_spec, 1).value;
    const double d = std::cos(cfg.theta) - std::cos(cfg.theta0);
    const double s = std::sin(cfg.theta0);
    lam_sum = total - (s * s) / (d * d) * std::exp(-2.0 * x);
  }
  return cfg.r * cfg.r * kappa / (2.0 * kPi) * lam_sum;
}

// U_hat scaled by sin^4(theta - theta0), i.e. by the fourth power of the
// perpendicular distance to the cone in units of r.
inline double scaled_energy(const ConeConfig& cfg, const QuadSpec& spec) {
  const double s = std::sin(cfg.theta - cfg.theta0);
  return cone_energy(cfg, spec).u_hat * s * s * s * s;
}

}  // namespace casimir
