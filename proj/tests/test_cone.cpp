#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "casimir/cone.hpp"
#include "casimir/quadrature.hpp"

using namespace casimir;

namespace {
const QuadSpec kDefault{};

double kronecker_plane(double theta) {
  const double c = std::cos(theta);
  return -3.0 / (8.0 * kPi * c * c * c * c);
}
}  // namespace

TEST_CASE("config validation names the violated invariant") {
  CHECK_THROWS_WITH((ConeConfig{1.0, 0.5, 1.0}.validate()),
                    Catch::Matchers::ContainsSubstring("theta must exceed theta0"));
  CHECK_THROWS_AS((ConeConfig{-0.1, 1.0, 1.0}.validate()), std::domain_error);
  CHECK_THROWS_AS((ConeConfig{1.0, 3.5, 1.0}.validate()), std::domain_error);
  CHECK_THROWS_AS((ConeConfig{1.0, 2.0, 0.0}.validate()), std::domain_error);
}

TEST_CASE("T-matrices at the plane half-angle") {
  // theta0 = pi/2, m = 0: tN = -1 for all lambda
  for (double lam : {0.05, 0.5, 1.0, 4.0, 15.0}) {
    CHECK(cone_tmatrix(lam, 0, kPi / 2).tN == Catch::Approx(-1.0).epsilon(1e-12));
  }
  // theta0 = pi/2, m = 1: tN = -tM = -1/(lam^2 + 1/4)
  for (double lam : {0.5, 2.0, 7.0}) {
    const auto t = cone_tmatrix(lam, 1, kPi / 2);
    CHECK(t.tN == Catch::Approx(-1.0 / (lam * lam + 0.25)).epsilon(1e-12));
    CHECK(t.tM == Catch::Approx(+1.0 / (lam * lam + 0.25)).epsilon(1e-12));
  }
}

TEST_CASE("T-matrix golden values and sign pattern") {
  // frozen from 30-digit Ferrers-function evaluation
  const auto t1 = cone_tmatrix(2.0, 1, 1.3);
  CHECK(t1.tN == Catch::Approx(-0.07093347179800640356035).epsilon(1e-12));
  CHECK(t1.tM == Catch::Approx(+0.06468339532514475135251).epsilon(1e-12));
  const auto t2 = cone_tmatrix(0.7, 0, 0.9);
  CHECK(t2.tN == Catch::Approx(-0.4502830549108730776541).epsilon(1e-12));
  CHECK(t2.tM == Catch::Approx(+0.1645240632064754487305).epsilon(1e-12));
  const auto t3 = cone_tmatrix(5.0, 3, 2.2);
  CHECK(t3.tN == Catch::Approx(-0.0822876762490217868848).epsilon(1e-12));
  CHECK(t3.tM == Catch::Approx(+0.08862928776307075107672).epsilon(1e-12));

  // negative m maps to |m|
  const auto tm = cone_tmatrix(2.0, -1, 1.3);
  CHECK(tm.tN == t1.tN);

  // tN < 0 on a grid (attractive boundary condition)
  for (double lam : {0.1, 1.0, 6.0})
    for (int m : {0, 1, 3})
      for (double theta0 : {0.5, 1.2, 2.0, 2.7}) CHECK(cone_tmatrix(lam, m, theta0).tN < 0.0);
}

TEST_CASE("Wronskian identity over the acceptance sample") {
  // tN - tM = 4 cosh(pi lam) / (pi sin theta0) / d/dtheta0[P^m(-cos theta0)^2]
  double worst = 0.0;
  for (double lam : {0.05, 0.7, 3.0, 11.0, 40.0}) {
    for (int m : {0, 1, 2, 3, 5}) {
      for (double theta0 : {0.35, 1.1, 1.7, 2.4}) {
        const auto t = detail::cone_tmatrix_log(lam, m, theta0);
        const ConicalValue sup = conical_p_neg(m, lam, kPi - theta0);
        const double log_rho = detail::conical_log_rho(m, lam);
        const LogSigned dd = LogSigned::from_log(
            -1, std::log(2.0) + sup.p.log_mag() + sup.dp_dpsi.log_mag() - 2.0 * log_rho);
        const LogSigned rhs = LogSigned::from_log(
                                  +1, std::log(4.0) + log_cosh(kPi * lam) -
                                          std::log(kPi * std::sin(theta0))) /
                              dd;
        const LogSigned diff = (t.tN - t.tM) - rhs;
        if (!diff.is_zero())
          worst = std::max(worst, std::exp(diff.log_mag() - rhs.log_mag()));
      }
    }
  }
  CHECK(worst < 1e-9);
}

TEST_CASE("angular weights") {
  // m = 0, theta -> pi: A -> 1, B -> 0
  const auto w0 = cone_angular_weights(1.3, 0, kPi - 1e-7);
  CHECK(w0.A.value() == Catch::Approx(1.0).margin(1e-9));
  CHECK(std::fabs(w0.B.value_allowing_underflow()) < 1e-9);

  // m = 2, theta -> pi: A -> 0
  const auto w2 = cone_angular_weights(1.3, 2, kPi - 1e-7);
  CHECK(std::fabs(w2.A.value_allowing_underflow()) < 1e-12);

  // B matches a finite-difference reconstruction from P^m values at
  // (m=1, lam=3, theta=2.0); the fd over theta carries the chain rule itself
  const int m = 1;
  const double lam = 3.0, theta = 2.0, h = 1e-5;
  auto pm = [&](double th) {
    return conical_p_pos(m, lam, kPi - th).p.value();
  };
  const double fd = (pm(theta + h) - pm(theta - h)) / (2 * h);
  const double a = pm(theta);
  const double want_B = fd * fd + (m * m / (std::sin(theta) * std::sin(theta))) * a * a;
  CHECK(cone_angular_weights(lam, m, theta).B.value() ==
        Catch::Approx(want_B).epsilon(1e-6));
}

TEST_CASE("lambda integrand values and envelope") {
  const ConeConfig cfg{0.6, 1.6, 1.0};
  // lambda -> 0+: tanh factor kills it
  CHECK(std::fabs(cone_lambda_integrand(1e-9, 0, cfg)) < 1e-8);

  // frozen goldens from 30-digit evaluation of the same bracket
  CHECK(cone_lambda_integrand(3.0, 2, cfg) ==
        Catch::Approx(-0.005898666150747204893076).epsilon(1e-11));
  CHECK(cone_lambda_integrand(40.0, 0, cfg) ==
        Catch::Approx(-3.678480105609831027435e-32).epsilon(1e-10));
  const ConeConfig inside{2.9, 3.05, 1.0};
  CHECK(cone_lambda_integrand(120.0, 1, inside) ==
        Catch::Approx(-4.311828849745727470296e-11).epsilon(1e-10));

  // decay rate: log|f(lam)| - log|f(2 lam)| >= 2 (theta - theta0) lam (1 - 0.2)
  const double lam = 18.0;
  const double f1 = std::fabs(cone_lambda_integrand(lam, 0, cfg));
  const double f2 = std::fabs(cone_lambda_integrand(2 * lam, 0, cfg));
  CHECK(std::log(f1) - std::log(f2) >= 2.0 * (cfg.theta - cfg.theta0) * lam * 0.8);
}

TEST_CASE("plane limit integrand restricted to |m| <= 1 on the axis") {
  // at theta0 = pi/2 the on-axis integrand is
  // lam (lam^2+1/4) sech tanh [2 tN0 + (lam^2+1/4)(tN1 - tM1)] = -4 lam (lam^2+1/4) sech tanh
  for (double lam : {0.3, 1.0, 2.5}) {
    const auto t0 = cone_tmatrix(lam, 0, kPi / 2);
    const auto t1 = cone_tmatrix(lam, 1, kPi / 2);
    const double L = lam * lam + 0.25;
    const double bracket = 2.0 * t0.tN + L * (t1.tN - t1.tM);
    CHECK(bracket == Catch::Approx(-4.0).epsilon(1e-12));
  }
}

TEST_CASE("ghost term") {
  CHECK_THROWS_AS(ghost_term(1.0, 1.0), std::domain_error);
  // theta = pi: -(1/pi) tan^2(theta0/2)
  for (double theta0 : {0.5, kPi / 2, 2.2}) {
    const double t = std::tan(0.5 * theta0);
    CHECK(ghost_term(kPi, theta0) == Catch::Approx(-t * t / kPi).epsilon(1e-13));
  }
  CHECK(ghost_term(kPi, kPi / 2) == Catch::Approx(-1.0 / kPi).epsilon(1e-14));
  // golden
  CHECK(ghost_term(2.6, 0.9) == Catch::Approx(-0.08934994979706295887657).epsilon(1e-13));

  // geometric-series reconstruction at (theta = 2.6, theta0 = 0.9)
  const double q = detail::m_sum_ratio(0.9, 2.6);
  const Estimate s = sum_truncated([&](int m) { return m * std::pow(q, m); }, q, kDefault);
  const double got = -(4.0 / (kPi * std::pow(std::sin(2.6), 2))) * s.value;
  CHECK(got == Catch::Approx(ghost_term(2.6, 0.9)).epsilon(1e-10));
}

TEST_CASE("on-axis energy: plane value and channel ratio") {
  const EnergyResult res = cone_energy_on_axis(1.0, kPi / 2, kDefault);
  CHECK(res.converged);
  CHECK(res.u_hat == Catch::Approx(-3.0 / (8.0 * kPi)).epsilon(1e-8));
  CHECK(res.u_hat == Catch::Approx(res.electric + res.magnetic + res.ghost).margin(1e-15));
  // ghost grouped with electric: 5:1
  CHECK((res.electric + res.ghost) / res.magnetic == Catch::Approx(5.0).epsilon(1e-7));
}

TEST_CASE("on-axis energy golden values") {
  // frozen from a 30-digit independent evaluation of the on-axis integral
  CHECK(cone_energy_on_axis(1.0, kPi / 3, kDefault).u_hat ==
        Catch::Approx(-0.036107928961348749728).epsilon(1e-8));
  CHECK(cone_energy_on_axis(1.0, 100.0 * kPi / 180.0, kDefault).u_hat ==
        Catch::Approx(-0.18821776096340848309).epsilon(1e-8));
}

TEST_CASE("on-axis energy decreases monotonically as the cone closes around the axis") {
  double prev = 0.0;
  bool first = true;
  for (double theta0 = 2.8; theta0 <= 3.001; theta0 += 0.05) {
    const double u = cone_energy_on_axis(1.0, theta0, kDefault).u_hat;
    if (!first) CHECK(u < prev);
    prev = u;
    first = false;
  }
}

TEST_CASE("general energy: plane family off axis") {
  for (double theta : {2.2, 2.6}) {
    const ConeConfig cfg{kPi / 2, theta, 1.0};
    const EnergyResult res = cone_energy(cfg, kDefault);
    CHECK(res.converged);
    CHECK(res.u_hat == Catch::Approx(kronecker_plane(theta)).epsilon(1e-6));
    CHECK(res.u_hat < 0.0);
  }
}

TEST_CASE("general energy golden values") {
  // frozen from a 30-digit independent master-formula evaluation
  const EnergyResult a = cone_energy(ConeConfig{kPi / 3, 2.5, 1.0}, kDefault);
  CHECK(a.u_hat == Catch::Approx(-0.057304800123158013093).epsilon(1e-8));
  const EnergyResult b = cone_energy(ConeConfig{0.8, 2.0, 1.0}, kDefault);
  CHECK(b.u_hat == Catch::Approx(-0.074570632687891644239).epsilon(1e-8));
  CHECK(a.u_hat == Catch::Approx(a.electric + a.magnetic + a.ghost).margin(1e-14));
}

TEST_CASE("continuity across the on-axis specialization") {
  // general path at theta = pi - 1e-3 vs the on-axis value
  const double theta0 = 1.1;
  const ConeConfig cfg{theta0, kPi - 1e-3, 1.0};
  const double general = cone_energy(cfg, kDefault).u_hat;
  const double axis = cone_energy_on_axis(1.0, theta0, kDefault).u_hat;
  CHECK(general == Catch::Approx(axis).epsilon(1e-4));
}

TEST_CASE("near-axis evaluations route to the on-axis path") {
  const ConeConfig cfg{1.1, kPi - 1e-5, 1.0};
  const double routed = cone_energy(cfg, kDefault).u_hat;
  CHECK(routed == cone_energy_on_axis(1.0, 1.1, kDefault).u_hat);
}

TEST_CASE("m-truncation bound honesty") {
  const ConeConfig cfg{1.9, 2.6, 1.0};  // modest q: several m terms
  const EnergyResult res = cone_energy(cfg, kDefault);
  REQUIRE(res.converged);
  // extend the sum by four more m and watch the change stay below err
  double extra = 0.0;
  for (int m = res.m_max_used + 1; m <= res.m_max_used + 4; ++m) {
    auto f = [&](double lam) { return cone_lambda_integrand(lam, m, cfg); };
    extra += 2.0 * integrate_semi_infinite(f, 0.0, 2.0 * (cfg.theta - cfg.theta0),
                                           kDefault)
                       .value;
  }
  CHECK(std::fabs(extra) / 8.0 < std::max(res.err, 1e-15));
}

TEST_CASE("attractive sign over a configuration sample") {
  for (double theta0 : {0.45, 1.0, 1.8, 2.5}) {
    for (double dth : {0.35, 0.9, 1.6}) {
      const double theta = theta0 + dth;
      if (theta > kPi) continue;
      CHECK(cone_energy(ConeConfig{theta0, theta, 1.0}, kDefault).u_hat < 0.0);
    }
  }
}

TEST_CASE("scaled energy") {
  const ConeConfig cfg{kPi / 3, 2.5, 1.0};
  const double s = std::sin(cfg.theta - cfg.theta0);
  CHECK(scaled_energy(cfg, kDefault) ==
        Catch::Approx(cone_energy(cfg, kDefault).u_hat * s * s * s * s).epsilon(1e-13));
  // on-axis plane point: -3/(8 pi)
  const ConeConfig plane{kPi / 2, kPi, 1.0};
  CHECK(scaled_energy(plane, kDefault) == Catch::Approx(-3.0 / (8.0 * kPi)).epsilon(1e-8));
}

TEST_CASE("kappa-resolved integrand: plane polynomial form on the axis") {
  // theta0 = pi/2, theta = pi: g(kappa) = -(r/(4 pi))(2x^2 + 2x + 1)e^{-2x}
  QuadSpec spec;
  spec.rel_tol = 1e-9;
  const ConeConfig cfg{kPi / 2, kPi, 1.0};
  for (double kappa : {0.05, 0.7, 1.5}) {
    const double got = cone_kappa_integrand(kappa, cfg, spec);
    const double want =
        -(1.0 / (4.0 * kPi)) * (2 * kappa * kappa + 2 * kappa + 1) * std::exp(-2 * kappa);
    CHECK(got == Catch::Approx(want).epsilon(1e-7));
  }
  // kappa -> 0+: finite constant -(r/(4 pi))
  const double near0 = cone_kappa_integrand(1e-4, cfg, spec);
  CHECK(near0 == Catch::Approx(-1.0 / (4.0 * kPi)).epsilon(1e-3));
}

TEST_CASE("kappa-resolved integrand: general geometry golden and consistency") {
  QuadSpec spec;
  spec.rel_tol = 1e-9;
  const ConeConfig cfg{kPi / 3, 2.5, 1.0};
  // golden frozen from an independent 15-digit evaluation
  CHECK(cone_kappa_integrand(0.8, cfg, spec) ==
        Catch::Approx(-0.02937265642281).epsilon(1e-8));

  // integral over kappa reproduces the master-formula energy to 1e-6
  auto g = [&](double kappa) { return cone_kappa_integrand(kappa, cfg, spec); };
  QuadSpec outer;
  outer.rel_tol = 1e-7;
  outer.abs_tol = 1e-10;
  outer.max_subdivisions = 300;
  const Estimate ik = integrate_semi_infinite(g, 0.0, 2.0 * cfg.r, outer);
  const double u = cone_energy(cfg, kDefault).u_hat;
  CHECK(ik.value == Catch::Approx(u).epsilon(1e-6));
}
