// Command-line surface: single cone/wedge/thermal evaluations, verification
// runs, and sweep CSVs.

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "casimir/cone.hpp"
#include "casimir/sweep.hpp"
#include "casimir/thermal.hpp"
#include "casimir/verify.hpp"
#include "casimir/wedge.hpp"

namespace {

using namespace casimir;

double to_rad(double angle, bool deg) {
  double v = deg ? angle * kPi / 180.0 : angle;
  // snap to the axis: 180 deg must mean exactly pi even if the conversion
  // rounds a last bit high
  if (std::fabs(v - kPi) < 1e-12) v = kPi;
  return v;
}

unsigned thread_count_from_env() {
  const char* env = std::getenv("CASIMIR_THREADS");
  if (!env) return 0;
  const long n = std::atol(env);
  return n > 0 ? (unsigned)n : 0;
}

void print_energy(const EnergyResult& res, bool machine, const char* label) {
  if (machine) {
    std::printf("%s u_hat=%.17g err=%.17g electric=%.17g magnetic=%.17g ghost=%.17g "
                "m_max=%d converged=%d\n",
                label, res.u_hat, res.err, res.electric, res.magnetic, res.ghost,
                res.m_max_used, res.converged ? 1 : 0);
    return;
  }
  std::printf("U_hat = U r^4/(alpha hbar c) = %.12g   (err estimate %.3g)\n", res.u_hat,
              res.err);
  std::printf("  channels: electric %.12g, magnetic %.12g, ghost %.12g\n", res.electric,
              res.magnetic, res.ghost);
  std::printf("  m_max used: %d, converged: %s\n", res.m_max_used,
              res.converged ? "yes" : "no");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Casimir-Polder energy of a polarizable particle near a conducting cone or wedge"};
  app.require_subcommand(1);

  QuadSpec spec;  // defaults: rel 1e-8, abs 1e-12
  bool deg = false;
  bool machine = false;
  app.add_flag("--deg", deg, "interpret all angles in degrees");
  app.add_option("--rel-tol", spec.rel_tol, "relative tolerance")->capture_default_str();
  app.add_option("--abs-tol", spec.abs_tol, "absolute tolerance")->capture_default_str();
  app.add_flag("--machine", machine, "emit one machine-readable line instead of text");

  // --- cone ---
  double c_theta0 = 0, c_theta = 0, c_r = 1.0;
  auto* cone_cmd = app.add_subcommand("cone", "energy of a particle near a cone");
  cone_cmd->add_option("--theta0", c_theta0, "cone half-opening angle")->required();
  cone_cmd->add_option("--theta", c_theta, "particle polar angle")->required();
  cone_cmd->add_option("--r", c_r, "radius from the cone vertex")->capture_default_str();

  // --- wedge ---
  double w_theta0 = 0, w_theta = 0, w_ref = -1.0, w_r = 1.0;
  auto* wedge_cmd = app.add_subcommand("wedge", "energy of a particle near a wedge");
  wedge_cmd->add_option("--theta0", w_theta0, "wedge half-opening angle")->required();
  wedge_cmd->add_option("--theta", w_theta, "particle angle")->required();
  wedge_cmd->add_option("--ref-theta", w_ref, "reference angle for the relative lambda-integral");
  wedge_cmd->add_option("--r", w_r, "cylindrical radius")->capture_default_str();

  // --- sweep ---
  SweepRequest sw;
  double sw_theta = std::nan("");
  auto* sweep_cmd = app.add_subcommand("sweep", "grid sweep, CSV output");
  sweep_cmd->add_option("--theta0-start", sw.theta0_start)->required();
  sweep_cmd->add_option("--theta0-stop", sw.theta0_stop);
  sweep_cmd->add_option("--theta0-count", sw.theta0_count)->capture_default_str();
  sweep_cmd->add_option("--theta-start", sw.theta_start);
  sweep_cmd->add_option("--theta-stop", sw.theta_stop);
  sweep_cmd->add_option("--theta-count", sw.theta_count)->capture_default_str();
  sweep_cmd->add_option("--theta", sw_theta, "fixed particle angle (1-point theta grid)");
  sweep_cmd->add_flag("--theta-relative", sw.theta_relative,
                      "theta-start is an offset above theta0");
  sweep_cmd->add_flag("--scaled", sw.scaled, "summarize the scaled energy");
  sweep_cmd->add_option("--output", sw.output_path, "CSV output path")->required();
  sweep_cmd->add_option("--r", sw.r)->capture_default_str();

  // --- thermal ---
  double t_theta0 = 0, t_theta = 0, t_r = 1.0;
  ThermalConfig th;
  std::string alpha_model = "static";
  auto* thermal_cmd = app.add_subcommand("thermal", "finite-temperature Matsubara sum");
  thermal_cmd->add_option("--tau", th.tau, "dimensionless temperature 2 pi k_B T r/(hbar c)")
      ->required();
  thermal_cmd->add_option("--theta0", t_theta0)->required();
  thermal_cmd->add_option("--theta", t_theta)->required();
  thermal_cmd->add_option("--r", t_r)->capture_default_str();
  thermal_cmd->add_option("--alpha-model", alpha_model, "static | oscillator")
      ->capture_default_str();
  thermal_cmd->add_option("--omega0", th.polarizability.omega0,
                          "oscillator resonance scale (units 1/r)")
      ->capture_default_str();
  thermal_cmd->add_option("--n-max", th.n_max)->capture_default_str();

  // --- verify ---
  std::string level = "fast";
  auto* verify_cmd = app.add_subcommand("verify", "run the identity suites");
  verify_cmd->add_option("--level", level, "fast | full")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cone_cmd) {
      ConeConfig cfg{to_rad(c_theta0, deg), to_rad(c_theta, deg), c_r};
      cfg.validate();
      if (cfg.theta > kPi - kOnAxisWindow && cfg.theta < kPi && !machine)
        std::fprintf(stderr, "note: theta within 1e-3 of pi, using the on-axis path\n");
      const EnergyResult res = cone_energy(cfg, spec);
      print_energy(res, machine, "cone");
      const double s = std::sin(cfg.theta - cfg.theta0);
      if (!machine)
        std::printf("  scaled U_hat sin^4(theta-theta0) = %.12g\n",
                    res.u_hat * s * s * s * s);
      return res.converged ? 0 : 2;
    }

    if (*wedge_cmd) {
      WedgeConfig cfg{to_rad(w_theta0, deg), to_rad(w_theta, deg), w_r};
      cfg.validate();
      const double closed = wedge_energy_closed(cfg);
      if (machine)
        std::printf("wedge u_hat_closed=%.17g", closed);
      else
        std::printf("U_hat (closed form) = %.12g\n", closed);
      int rc = 0;
      if (w_ref >= 0) {
        const double ref = to_rad(w_ref, deg);
        const Estimate rel = wedge_energy_relative(cfg, ref, spec);
        const double closed_ref = wedge_energy_closed(WedgeConfig{cfg.theta0, ref, cfg.r});
        const double closed_diff = closed - closed_ref;
        if (machine)
          std::printf(" relative=%.17g closed_diff=%.17g err=%.17g",
                      rel.value, closed_diff, rel.err);
        else {
          std::printf("U_hat(theta) - U_hat(ref)   lambda-integral: %.12g\n", rel.value);
          std::printf("                            closed form:     %.12g\n", closed_diff);
          std::printf("                            difference:      %.3g (err est %.3g)\n",
                      rel.value - closed_diff, rel.err);
        }
        rc = rel.converged ? 0 : 2;
      }
      if (machine) std::printf("\n");
      return rc;
    }

    if (*sweep_cmd) {
      if (deg) {
        sw.theta0_start = to_rad(sw.theta0_start, true);
        sw.theta0_stop = to_rad(sw.theta0_stop, true);
        sw.theta_start = to_rad(sw.theta_start, true);
        sw.theta_stop = to_rad(sw.theta_stop, true);
        if (std::isfinite(sw_theta)) sw_theta = to_rad(sw_theta, true);
      }
      if (std::isfinite(sw_theta)) {
        sw.theta_start = sw_theta;
        sw.theta_stop = sw_theta;
        sw.theta_count = 1;
      }
      sw.spec = spec;
      const auto rows = run_sweep(sw, thread_count_from_env());
      std::ofstream os(sw.output_path, std::ios::binary);
      if (!os) {
        std::fprintf(stderr, "error: cannot write '%s'\n", sw.output_path.c_str());
        return 1;
      }
      write_csv(os, rows);
      int failures = 0;
      double extreme = 0.0;
      for (const auto& r : rows) {
        if (!r.ok) ++failures;
        const double v = sw.scaled ? r.u_hat_scaled : r.u_hat;
        if (std::isfinite(v)) extreme = std::min(extreme, v);
      }
      std::printf("%zu points -> %s  (min %s = %.12g, %d convergence failure%s)\n",
                  rows.size(), sw.output_path.c_str(),
                  sw.scaled ? "u_hat_scaled" : "u_hat", extreme, failures,
                  failures == 1 ? "" : "s");
      return failures == 0 ? 0 : 2;
    }

    if (*thermal_cmd) {
      ConeConfig cfg{to_rad(t_theta0, deg), to_rad(t_theta, deg), t_r};
      cfg.validate();
      th.polarizability.kind = alpha_model == "oscillator"
                                   ? PolarizabilityModel::Kind::single_oscillator
                                   : PolarizabilityModel::Kind::static_value;
      if (alpha_model != "oscillator" && alpha_model != "static") {
        std::fprintf(stderr, "error: --alpha-model must be 'static' or 'oscillator'\n");
        return 1;
      }
      const EnergyResult res = thermal_energy(cfg, th, spec);
      if (machine)
        std::printf("thermal u_hat=%.17g err=%.17g n_terms=%d converged=%d\n", res.u_hat,
                    res.err, res.m_max_used, res.converged ? 1 : 0);
      else {
        std::printf("U_hat(tau = %g) = %.12g   (err estimate %.3g)\n", th.tau, res.u_hat,
                    res.err);
        std::printf("  Matsubara terms beyond n=0: %d, converged: %s\n", res.m_max_used,
                    res.converged ? "yes" : "no");
      }
      return res.converged ? 0 : 2;
    }

    if (*verify_cmd) {
      if (level != "fast" && level != "full") {
        std::fprintf(stderr, "error: --level must be 'fast' or 'full'\n");
        return 1;
      }
      const auto checks =
          run_verification(level == "full" ? VerifyLevel::full : VerifyLevel::fast);
      bool all = true;
      for (const auto& c : checks) {
        std::printf("[%s] %-36s residual %.3g (tol %.1g)\n", c.pass ? "PASS" : "FAIL",
                    c.name.c_str(), c.residual, c.tol);
        all = all && c.pass;
      }
      return all ? 0 : 2;
    }
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
