#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "casimir/cone.hpp"
#include "casimir/quadrature.hpp"
#include "casimir/specfun.hpp"
#include "casimir/thermal.hpp"
#include "casimir/wedge.hpp"

// Self-verification suites: every closed-form identity the formalism obeys,
// run at pinned tolerances with measured residuals. The fast level covers the
// plane limits and the Wronskian probe; the full level adds the integral
// identities, the wedge grid, the 5:1 channel ratio and the thermal tau -> 0
// consistency check.

namespace casimir {

struct CheckResult {
  std::string name;
  double residual = 0.0;  // max relative (or stated) residual observed
  double tol = 0.0;
  bool pass = false;
};

enum class VerifyLevel { fast, full };

namespace detail {

inline CheckResult make_check(std::string name, double residual, double tol) {
  CheckResult c;
  c.name = std::move(name);
  c.residual = residual;
  c.tol = tol;
  c.pass = std::isfinite(residual) && residual <= tol;
  return c;
}

inline QuadSpec tight_spec() {
  QuadSpec s;
  s.rel_tol = 1e-10;
  s.abs_tol = 1e-14;
  s.max_subdivisions = 4000;
  return s;
}

// Relative-style residual that stays meaningful for tiny references.
inline double rel_residual(double got, double want) {
  return std::fabs(got - want) / std::max(std::fabs(want), 1e-300);
}

}  // namespace detail

// 1. On-axis plane limit: U_hat(theta0 = pi/2) = -3/(8 pi).
inline CheckResult check_plane_on_axis() {
  QuadSpec spec;
  const EnergyResult res = cone_energy_on_axis(1.0, 0.5 * kPi, spec);
  const double want = -3.0 / (8.0 * kPi);
  return detail::make_check("plane on-axis -3/(8 pi)", detail::rel_residual(res.u_hat, want),
                            1e-6);
}

// 2. Off-axis plane family: U_hat = -3/(8 pi cos^4 theta) at theta0 = pi/2.
inline CheckResult check_plane_family() {
  QuadSpec spec;
  double worst = 0.0;
  for (double theta : {1.8, 2.2, 2.6, 3.0}) {
    ConeConfig cfg{0.5 * kPi, theta, 1.0};
    const double got = cone_energy(cfg, spec).u_hat;
    const double c = std::cos(theta);
    const double want = -3.0 / (8.0 * kPi * c * c * c * c);
    worst = std::max(worst, detail::rel_residual(got, want));
  }
  return detail::make_check("plane off-axis family", worst, 1e-5);
}

// T^N - T^M = 4 cosh(pi lam) / (pi sin theta0 d/dtheta0[P^m(-cos theta0)^2]),
// the Wronskian probe of the conical machinery.
inline CheckResult check_wronskian() {
  double worst = 0.0;
  int samples = 0;
  for (double lam : {0.05, 0.7, 3.0, 11.0, 40.0}) {
    for (int m : {0, 1, 2, 3, 5}) {
      for (double theta0 : {0.35, 1.1, 1.7, 2.4}) {
        const auto t = detail::cone_tmatrix_log(lam, m, theta0);
        const LogSigned lhs = t.tN - t.tM;
        // d/dtheta0 [P^m(-cos theta0)^2] = -2 P^{-m} dp/dpsi / rho^2 at pi - theta0
        const ConicalValue sup = conical_p_neg(m, lam, kPi - theta0);
        const double log_rho = detail::conical_log_rho(m, lam);
        const LogSigned dd = LogSigned::from_log(
            -1, std::log(2.0) + sup.p.log_mag() + sup.dp_dpsi.log_mag() - 2.0 * log_rho);
        const LogSigned rhs =
            LogSigned::from_log(+1, std::log(4.0) + log_cosh(kPi * lam) -
                                        std::log(kPi * std::sin(theta0))) /
            dd;
        const LogSigned diff = lhs - rhs;
        double resid = 0.0;
        if (!diff.is_zero()) resid = std::exp(diff.log_mag() - rhs.log_mag());
        worst = std::max(worst, resid);
        ++samples;
      }
    }
  }
  (void)samples;  // 100-point sample grid
  return detail::make_check("Wronskian T^N - T^M identity", worst, 1e-9);
}

// Ghost mode: geometric-series reconstruction versus the closed form on a
// 25-point grid.
inline CheckResult check_ghost_series() {
  QuadSpec spec = detail::tight_spec();
  double worst = 0.0;
  for (double theta0 : {0.4, 0.9, 1.5, 2.1, 2.7}) {
    for (double dth : {0.25, 0.7, 1.2, 1.8, 2.4}) {
      const double theta = theta0 + dth;
      if (theta >= kPi) continue;
      const double q = detail::m_sum_ratio(theta0, theta);
      const double s = std::sin(theta);
      const Estimate series =
          sum_truncated([&](int m) { return std::pow(q, m) * m; }, q, spec, 1);
      const double got = -(4.0 / (kPi * s * s)) * series.value;
      const double want = ghost_term(theta, theta0);
      worst = std::max(worst, std::fabs(got - want) / std::fabs(want));
    }
  }
  return detail::make_check("ghost geometric-series identity", worst, 1e-10);
}

// Kappa integral: int_0^inf kappa^3 k_{i lam - 1/2}(r kappa)^2 dkappa
//               = (pi/(4 r^4)) (lam^2 + 1/4) sech(pi lam), r = 1.
inline CheckResult check_kappa_integral_identity() {
  QuadSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-300;  // values at lam = 10 are ~1e-12; relative mode only
  spec.max_subdivisions = 4000;
  double worst = 0.0;
  for (double lam : {0.0, 0.5, 2.0, 10.0}) {
    auto f = [lam](double kappa) {
      const LogSigned k = spherical_k_imag(lam, kappa);
      return kappa * kappa * kappa * k.squared().value_allowing_underflow();
    };
    const Estimate got = integrate_semi_infinite(f, 0.0, 2.0, spec);
    const double want = kPi / 4.0 * (lam * lam + 0.25) * std::exp(-log_cosh(kPi * lam));
    worst = std::max(worst, std::fabs(got.value - want) / want);
  }
  return detail::make_check("kappa-integral identity", worst, 1e-8);
}

// The four lambda integrals:
//   int k^2 lam tanh = e^{-2x}/(2x)
//   int k^2 lam^3 tanh = (x + 1/4) e^{-2x}/(2x)
//   int (d/dr (r k))^2 lam tanh = (x^2 - x + 1/2) e^{-2x}/(2x)
//   int lam (lam^2+1/4) sech tanh = 1/(2 pi)
inline CheckResult check_lambda_integral_identities() {
  QuadSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-300;
  spec.max_subdivisions = 4000;
  double worst = 0.0;
  for (double x : {0.5, 1.0, 3.0}) {
    auto pair_at = [x](double lam) { return spherical_k_pair(lam, x); };
    auto f1 = [&](double lam) {
      return pair_at(lam).k.squared().value_allowing_underflow() * lam * std::tanh(kPi * lam);
    };
    auto f2 = [&](double lam) {
      return pair_at(lam).k.squared().value_allowing_underflow() * lam * lam * lam *
             std::tanh(kPi * lam);
    };
    auto f3 = [&](double lam) {
      return pair_at(lam).rderiv.squared().value_allowing_underflow() * lam *
             std::tanh(kPi * lam);
    };
    const double e2 = std::exp(-2.0 * x) / (2.0 * x);
    worst = std::max(worst,
                     detail::rel_residual(integrate_semi_infinite(f1, 0.0, kPi, spec).value, e2));
    worst = std::max(worst, detail::rel_residual(
                                integrate_semi_infinite(f2, 0.0, kPi, spec).value,
                                (x + 0.25) * e2));
    worst = std::max(worst, detail::rel_residual(
                                integrate_semi_infinite(f3, 0.0, kPi, spec).value,
                                (x * x - x + 0.5) * e2));
  }
  auto f4 = [](double lam) {
    return lam * (lam * lam + 0.25) * std::exp(-log_cosh(kPi * lam)) * std::tanh(kPi * lam);
  };
  worst = std::max(worst, detail::rel_residual(
                              integrate_semi_infinite(f4, 0.0, kPi, spec).value,
                              1.0 / (2.0 * kPi)));
  return detail::make_check("lambda-integral identities", worst, 1e-8);
}

// Wedge: relative lambda-integral energies match closed-form differences on
// the acceptance grid.
inline CheckResult check_wedge_grid() {
  QuadSpec spec;
  spec.rel_tol = 1e-10;
  spec.abs_tol = 1e-13;
  double worst_scaled = 0.0;
  for (double theta0 : {kPi / 6, kPi / 4, kPi / 3, kPi / 2, 2 * kPi / 3}) {
    std::vector<double> angles;
    for (double th = theta0 + 0.2 + 1e-9; th <= kPi; th += (kPi - theta0 - 0.2) / 3.0)
      angles.push_back(th);
    angles.push_back(kPi);
    for (double theta : angles) {
      for (double theta_ref : angles) {
        if (theta_ref <= theta) continue;
        WedgeConfig cfg{theta0, theta, 1.0};
        const double got = wedge_energy_relative(cfg, theta_ref, spec).value;
        const double want =
            wedge_energy_closed(cfg) - wedge_energy_closed(WedgeConfig{theta0, theta_ref, 1.0});
        const double tol_here = std::max(1e-8, 1e-6 * std::fabs(want));
        worst_scaled = std::max(worst_scaled, std::fabs(got - want) / tol_here);
      }
    }
  }
  // residual reported as a fraction of the per-point tolerance max(1e-8, 1e-6 |value|)
  return detail::make_check("wedge relative-energy grid", worst_scaled, 1.0);
}

// 5:1 electric:magnetic ratio at the plane, ghost grouped with electric.
inline CheckResult check_five_to_one() {
  QuadSpec spec;
  spec.rel_tol = 1e-9;
  const EnergyResult res = cone_energy_on_axis(1.0, 0.5 * kPi, spec);
  const double ratio = (res.electric + res.ghost) / res.magnetic;
  return detail::make_check("5:1 electric:magnetic ratio", detail::rel_residual(ratio, 5.0),
                            1e-6);
}

// Thermal: Matsubara sum approaches the zero-temperature integral as tau -> 0
// with an O(tau^2) Riemann-sum error.
inline CheckResult check_thermal_limit() {
  QuadSpec spec;
  spec.rel_tol = 1e-7;
  spec.abs_tol = 1e-11;
  ConeConfig cfg{kPi / 3, 2.5, 1.0};
  const double u0 = cone_energy(cfg, spec).u_hat;
  double prev_dev = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double tau : {0.2, 0.1, 0.05}) {
    ThermalConfig th;
    th.tau = tau;
    const double ut = thermal_energy(cfg, th, spec).u_hat;
    const double dev = std::fabs(ut - u0) / std::fabs(u0);
    if (dev >= prev_dev) worst = 1.0;  // deviation must shrink monotonically
    prev_dev = dev;
  }
  // and the smallest-tau deviation must be small in absolute terms
  worst = std::max(worst, prev_dev / 0.01);
  return detail::make_check("thermal tau->0 consistency", worst, 1.0);
}

inline std::vector<CheckResult> run_verification(VerifyLevel level) {
  std::vector<CheckResult> out;
  out.push_back(check_plane_on_axis());
  out.push_back(check_plane_family());
  out.push_back(check_wronskian());
  out.push_back(check_ghost_series());
  if (level == VerifyLevel::full) {
    out.push_back(check_kappa_integral_identity());
    out.push_back(check_lambda_integral_identities());
    out.push_back(check_wedge_grid());
    out.push_back(check_five_to_one());
    out.push_back(check_thermal_limit());
  }
  return out;
}

}  // namespace casimir
