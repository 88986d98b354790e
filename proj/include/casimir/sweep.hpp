#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "casimir/cone.hpp"
#include "casimir/quadrature.hpp"

// Grid sweeps of the cone energy with deterministic CSV output, used for the
// (theta, theta0) maps of the scaled energy.

namespace casimir {

struct SweepRequest {
  double theta0_start = 0.0;
  double theta0_stop = 0.0;
  int theta0_count = 1;
  double theta_start = 0.0;  // offset from theta0 when theta_relative is set
  double theta_stop = 0.0;
  int theta_count = 1;
  bool theta_relative = false;
  bool scaled = false;  // which quantity the run summary highlights
  std::string output_path;
  double r = 1.0;
  QuadSpec spec;

  void validate() const {
    if (theta0_count < 1 || theta_count < 1)
      throw std::domain_error("sweep: counts must be >= 1");
    if (theta0_count > 1 && !(theta0_stop > theta0_start))
      throw std::domain_error("sweep: theta0 range must be increasing");
    if (theta_count > 1 && !(theta_stop > theta_start || theta_relative))
      throw std::domain_error("sweep: theta range must be increasing");
    spec.validate();
  }
};

struct SweepRow {
  double theta0 = 0, theta = 0;
  double u_hat = 0, u_hat_scaled = 0, err = 0;
  int m_max = 0;
  bool ok = false;
};

namespace detail {

inline double grid_point(double start, double stop, int count, int i) {
  if (count == 1) return start;
  return start + (stop - start) * (double)i / (double)(count - 1);
}

}  // namespace detail

// Evaluates the grid in row-major theta0-then-theta order. Points are
// computed concurrently but assembled in deterministic order; each point's
// evaluation is itself deterministic, so output is identical for any thread
// count. Points with theta <= theta0 are dropped; an empty grid is an error.
inline std::vector<SweepRow> run_sweep(const SweepRequest& req, unsigned threads = 0) {
  req.validate();

  std::vector<std::pair<double, double>> points;
  for (int i = 0; i < req.theta0_count; ++i) {
    const double t0 = detail::grid_point(req.theta0_start, req.theta0_stop, req.theta0_count, i);
    for (int j = 0; j < req.theta_count; ++j) {
      const double lo = req.theta_relative ? t0 + req.theta_start : req.theta_start;
      const double th = detail::grid_point(lo, req.theta_stop, req.theta_count, j);
      if (th > t0 && th <= kPi && t0 > 0.0 && t0 < kPi) points.emplace_back(t0, th);
    }
  }
  if (points.empty())
    throw std::domain_error("sweep: no valid grid points (theta must exceed theta0)");

  std::vector<SweepRow> rows(points.size());
  auto work = [&](size_t begin, size_t end) {
    for (size_t i = begin; i < end; ++i) {
      SweepRow& row = rows[i];
      row.theta0 = points[i].first;
      row.theta = points[i].second;
      const double s = std::sin(row.theta - row.theta0);
      try {
        ConeConfig cfg{row.theta0, row.theta, req.r};
        const EnergyResult res = cone_energy(cfg, req.spec);
        row.u_hat = res.u_hat;
        row.u_hat_scaled = res.u_hat * s * s * s * s;
        row.err = res.converged ? res.err : std::nan("");
        row.m_max = res.m_max_used;
        row.ok = res.converged;
      } catch (const std::exception&) {
        row.u_hat = std::nan("");
        row.u_hat_scaled = std::nan("");
        row.err = std::nan("");
        row.ok = false;
      }
    }
  };

  unsigned n = threads ? threads : std::thread::hardware_concurrency();
  n = std::max(1u, std::min<unsigned>(n, (unsigned)points.size()));
  if (n == 1) {
    work(0, points.size());
  } else {
    std::vector<std::thread> pool;
    const size_t chunk = (points.size() + n - 1) / n;
    for (unsigned t = 0; t < n; ++t) {
      const size_t b = t * chunk;
      const size_t e = std::min(points.size(), b + chunk);
      if (b < e) pool.emplace_back(work, b, e);
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

// Fixed 17-significant-digit formatting: lossless round trip of doubles and
// byte-identical across runs.
inline void write_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
  os << "theta0,theta,u_hat,u_hat_scaled,err,m_max\n";
  char buf[512];
  for (const auto& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%d\n", r.theta0, r.theta,
                  r.u_hat, r.u_hat_scaled, r.err, r.m_max);
    os << buf;
  }
}

}  // namespace casimir
