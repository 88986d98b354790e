#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

#include "casimir/log_signed.hpp"

namespace casimir {

// Tolerance and truncation policy shared by the integrators and the series
// summator.
struct QuadSpec {
  double rel_tol = 1e-8;
  double abs_tol = 1e-12;
  int max_subdivisions = 2000;

  enum class TailPolicy { envelope_cutoff, fixed_bound };
  TailPolicy tail_policy = TailPolicy::envelope_cutoff;
  double fixed_upper_bound = 0.0;  // used when tail_policy == fixed_bound

  void validate() const {
    if (!(rel_tol > 0) || !(abs_tol > 0))
      throw std::domain_error("QuadSpec: tolerances must be positive");
    if (max_subdivisions < 1)
      throw std::domain_error("QuadSpec: max_subdivisions must be >= 1");
  }

  double tolerance_for(double value) const {
    return std::max(abs_tol, rel_tol * std::fabs(value));
  }
};

struct Estimate {
  double value = 0.0;
  double err = 0.0;
  long evaluations = 0;
  bool converged = false;
};

namespace detail {

// Gauss-Kronrod 7/15 nodes and weights (QUADPACK dqk15 constants).
template <class Real>
struct GK15 {
  static constexpr Real xgk[8] = {
      Real(0.991455371120812639206854697526329L), Real(0.949107912342758524526189684047851L),
      Real(0.864864423359769072789712788640926L), Real(0.741531185599394439863864773280788L),
      Real(0.586087235467691130294144838258730L), Real(0.405845151377397166906606412076961L),
      Real(0.207784955007898467600689403773245L), Real(0.0L)};
  static constexpr Real wgk[8] = {
      Real(0.022935322010529224963732008058970L), Real(0.063092092629978553290700663189204L),
      Real(0.104790010322250183839876322541518L), Real(0.140653259715525918745189590510238L),
      Real(0.169004726639267902826583426598550L), Real(0.190350578064785409913256402421014L),
      Real(0.204432940075298892414161999234649L), Real(0.209482141084727828012999174891714L)};
  static constexpr Real wg[4] = {
      Real(0.129484966168869693270611432679082L), Real(0.279705391489276667901467771423780L),
      Real(0.381830050505118944950369775488975L), Real(0.417959183673469387755102040816327L)};
};

template <class Real>
struct PanelResult {
  Real integral = 0;
  Real err = 0;
  Real resabs = 0;
};

// One GK15 panel on [a, b]. Endpoints are never evaluated (all nodes interior).
template <class Real, class F>
PanelResult<Real> gk15_panel(F&& f, Real a, Real b) {
  using K = GK15<Real>;
  const Real c = (a + b) / 2;
  const Real h = (b - a) / 2;

  Real fv1[7], fv2[7];
  const Real fc = f(c);
  Real resk = K::wgk[7] * fc;
  Real resg = K::wg[3] * fc;
  Real resabs = K::wgk[7] * (fc < 0 ? -fc : fc);
  for (int i = 0; i < 7; ++i) {
    const Real dx = h * K::xgk[i];
    fv1[i] = f(c - dx);
    fv2[i] = f(c + dx);
    const Real fsum = fv1[i] + fv2[i];
    resk += K::wgk[i] * fsum;
    resabs += K::wgk[i] * ((fv1[i] < 0 ? -fv1[i] : fv1[i]) + (fv2[i] < 0 ? -fv2[i] : fv2[i]));
    if (i % 2 == 1) resg += K::wg[i / 2] * fsum;
  }

  const Real reskh = resk / 2;
  Real resasc = K::wgk[7] * (fc - reskh < 0 ? reskh - fc : fc - reskh);
  for (int i = 0; i < 7; ++i) {
    const Real d1 = fv1[i] - reskh;
    const Real d2 = fv2[i] - reskh;
    resasc += K::wgk[i] * ((d1 < 0 ? -d1 : d1) + (d2 < 0 ? -d2 : d2));
  }

  PanelResult<Real> out;
  out.integral = resk * h;
  out.resabs = resabs * (h < 0 ? -h : h);
  resasc *= (h < 0 ? -h : h);

  Real err = resk - resg;
  err = (err < 0 ? -err : err) * (h < 0 ? -h : h);
  if (resasc != 0 && err != 0) {
    const Real scaled = std::pow((Real)(200 * err / resasc), (Real)1.5L);
    err = resasc * (scaled < 1 ? scaled : (Real)1);
  }
  const Real eps = std::numeric_limits<Real>::epsilon();
  const Real tiny = std::numeric_limits<Real>::min();
  if (out.resabs > tiny / (50 * eps)) {
    const Real floor_err = 50 * eps * out.resabs;
    err = err > floor_err ? err : floor_err;
  }
  out.err = err;
  return out;
}

struct Segment {
  double a, b, value, err;
};

}  // namespace detail

// Adaptive Gauss-Kronrod 7/15 on a finite interval. The endpoints are
// approached but never evaluated, so integrable endpoint behavior
// (log singularities and the like) is tolerated. On budget exhaustion the
// best estimate is returned with converged = false; never a silent wrong
// answer.
template <class F>
Estimate integrate_finite(F&& f, double a, double b, const QuadSpec& spec) {
  spec.validate();
  if (!(a < b)) throw std::domain_error("integrate_finite requires a < b");

  Estimate out;
  auto first = detail::gk15_panel<double>(f, a, b);
  out.evaluations = 15;

  std::vector<detail::Segment> segs;
  segs.push_back({a, b, first.integral, first.err});
  double total = first.integral;
  double total_err = first.err;

  auto worse = [](const detail::Segment& s, const detail::Segment& t) { return s.err < t.err; };

  while (total_err > spec.tolerance_for(total) &&
         (int)segs.size() < spec.max_subdivisions) {
    std::pop_heap(segs.begin(), segs.end(), worse);
    detail::Segment w = segs.back();
    segs.pop_back();

    const double mid = (w.a + w.b) / 2;
    if (!(mid > w.a && mid < w.b)) {  // interval at roundoff resolution
      segs.push_back(w);
      std::push_heap(segs.begin(), segs.end(), worse);
      break;
    }
    auto left = detail::gk15_panel<double>(f, w.a, mid);
    auto right = detail::gk15_panel<double>(f, mid, w.b);
    out.evaluations += 30;

    total += left.integral + right.integral - w.value;
    total_err += left.err + right.err - w.err;

    segs.push_back({w.a, mid, left.integral, left.err});
    std::push_heap(segs.begin(), segs.end(), worse);
    segs.push_back({mid, w.b, right.integral, right.err});
    std::push_heap(segs.begin(), segs.end(), worse);
  }

  // Recompute the totals from the segments; the incremental updates above can
  // accumulate rounding while the segment list stays exact.
  total = 0;
  total_err = 0;
  for (const auto& s : segs) {
    total += s.value;
    total_err += s.err;
  }

  out.value = total;
  out.err = total_err;
  out.converged = total_err <= spec.tolerance_for(total);
  return out;
}

// Semi-infinite integral of an exponentially bounded integrand:
// |f(x)| <= C exp(-decay_rate_hint * x) eventually. Under the envelope-cutoff
// policy the interval is truncated where the envelope tail is negligible, and
// the truncation is then verified by extending the cutoff once (doubling the
// integrated length) and checking that the extension contributes less than
// the tolerance. A failed verification reports converged = false.
template <class F>
Estimate integrate_semi_infinite(F&& f, double a, double decay_rate_hint,
                                 const QuadSpec& spec) {
  spec.validate();
  double cutoff;
  if (spec.tail_policy == QuadSpec::TailPolicy::fixed_bound) {
    cutoff = spec.fixed_upper_bound;
    if (!(cutoff > a))
      throw std::domain_error("integrate_semi_infinite: fixed_upper_bound must exceed a");
  } else {
    if (!(decay_rate_hint > 0))
      throw std::domain_error("integrate_semi_infinite requires decay_rate_hint > 0");
    // exp(-45) ~ 3e-20 leaves margin for polynomial prefactors.
    const double span = (45.0 + 3.0 * std::log1p(45.0 / decay_rate_hint)) / decay_rate_hint;
    cutoff = a + span;
  }

  Estimate main = integrate_finite(f, a, cutoff, spec);

  QuadSpec tail_spec = spec;
  tail_spec.rel_tol = 0.1;
  tail_spec.abs_tol = 0.5 * spec.tolerance_for(main.value);
  tail_spec.max_subdivisions = std::max(16, spec.max_subdivisions / 8);
  Estimate tail = integrate_finite(f, cutoff, 2.0 * cutoff - a, tail_spec);

  Estimate out;
  out.value = main.value + tail.value;
  out.evaluations = main.evaluations + tail.evaluations;
  const bool tail_ok = std::fabs(tail.value) <= spec.tolerance_for(out.value);
  out.err = main.err + tail.err + std::fabs(tail.value);
  out.converged = main.converged && tail_ok;
  return out;
}

// Sum_{m >= first} term(m) for a tail that is eventually bounded by a
// geometric with ratio <= ratio_hint < 1. Stops once the geometric bound
// term * r / (1 - r) falls below tolerance, with r the larger of the hint and
// the observed ratio. Persistent non-decreasing terms exhaust the cap and
// report converged = false.
template <class Term>
Estimate sum_truncated(Term&& term, double ratio_hint, const QuadSpec& spec,
                       int first = 1) {
  spec.validate();
  if (!(ratio_hint > 0 && ratio_hint < 1))
    throw std::domain_error("sum_truncated requires ratio_hint in (0, 1)");

  Estimate out;
  double prev_mag = std::numeric_limits<double>::infinity();
  const long cap = spec.max_subdivisions;
  for (long i = 0; i < cap; ++i) {
    const int m = first + (int)i;
    const double t = term(m);
    ++out.evaluations;
    out.value += t;
    const double mag = std::fabs(t);

    double r = ratio_hint;
    if (mag > 0 && prev_mag > 0 && std::isfinite(prev_mag))
      r = std::max(r, std::min(mag / prev_mag, 0.999));
    const double tail_bound = mag * r / (1.0 - r);
    if (mag <= prev_mag && tail_bound <= spec.tolerance_for(out.value)) {
      out.err = tail_bound;
      out.converged = true;
      return out;
    }
    prev_mag = mag;
  }
  out.err = std::fabs(out.value);  // no usable bound
  out.converged = false;
  return out;
}

}  // namespace casimir
