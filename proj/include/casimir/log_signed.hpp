#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace casimir {

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// Real number stored as a sign and the natural log of its magnitude.
//
// This is the working representation of the special-function layer: conical
// functions grow like exp(lambda*(pi-theta)) while the sech(pi*lambda) factors
// of the energy formulas decay like exp(-pi*lambda), so individual factors
// overflow doubles long before their product does. Multiplication and
// division are exact in this representation for log-magnitudes up to ~1e6;
// addition uses the larger-exponent factoring rule.
class LogSigned {
 public:
  constexpr LogSigned() = default;  // zero

  static LogSigned from_value(double v) {
    if (v == 0.0) return LogSigned{};
    if (std::isnan(v)) throw std::domain_error("LogSigned: NaN input");
    return LogSigned(v > 0 ? +1 : -1, std::log(std::fabs(v)));
  }

  static LogSigned from_log(int sign, double log_mag) {
    if (sign == 0) return LogSigned{};
    if (sign != 1 && sign != -1)
      throw std::domain_error("LogSigned: sign must be -1, 0 or +1");
    if (log_mag == -std::numeric_limits<double>::infinity()) return LogSigned{};
    return LogSigned(sign, log_mag);
  }

  int sign() const noexcept { return sign_; }
  double log_mag() const noexcept { return log_mag_; }
  bool is_zero() const noexcept { return sign_ == 0; }

  // Exact conversion to a plain double. Per contract this errors out once
  // |log_mag| >= 700 (outside that window exp() would overflow or flush to
  // subnormals), use value_allowing_underflow() when a tiny tail may
  // legitimately round to zero.
  double value() const {
    if (sign_ == 0) return 0.0;
    if (!(std::fabs(log_mag_) < 700.0))
      throw std::range_error("LogSigned: conversion out of double range, log|x| = " +
                             std::to_string(log_mag_));
    return sign_ * std::exp(log_mag_);
  }

  // As value(), but magnitudes below exp(-700) convert to 0. Overflow still throws.
  double value_allowing_underflow() const {
    if (sign_ == 0 || log_mag_ <= -700.0) return 0.0;
    if (!(log_mag_ < 700.0))
      throw std::range_error("LogSigned: conversion overflow, log|x| = " +
                             std::to_string(log_mag_));
    return sign_ * std::exp(log_mag_);
  }

  LogSigned operator-() const {
    LogSigned r = *this;
    r.sign_ = -r.sign_;
    return r;
  }

  LogSigned abs() const {
    LogSigned r = *this;
    if (r.sign_ != 0) r.sign_ = 1;
    return r;
  }

  LogSigned squared() const {
    if (sign_ == 0) return LogSigned{};
    return LogSigned(1, 2.0 * log_mag_);
  }

  friend LogSigned operator*(const LogSigned& a, const LogSigned& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return LogSigned{};
    return LogSigned(a.sign_ * b.sign_, a.log_mag_ + b.log_mag_);
  }

  friend LogSigned operator/(const LogSigned& a, const LogSigned& b) {
    if (b.sign_ == 0) throw std::domain_error("LogSigned: division by zero");
    if (a.sign_ == 0) return LogSigned{};
    return LogSigned(a.sign_ * b.sign_, a.log_mag_ - b.log_mag_);
  }

  // Larger-exponent factoring: a + b = sign_a ^ exp(la) * (1 +/- exp(lb - la))
  // with la >= lb, so the exponential never overflows.
  friend LogSigned operator+(const LogSigned& a, const LogSigned& b) {
    if (a.sign_ == 0) return b;
    if (b.sign_ == 0) return a;
    const LogSigned* hi = &a;
    const LogSigned* lo = &b;
    if (lo->log_mag_ > hi->log_mag_) std::swap(hi, lo);
    const double d = std::exp(lo->log_mag_ - hi->log_mag_);  // in (0, 1]
    if (hi->sign_ == lo->sign_)
      return LogSigned(hi->sign_, hi->log_mag_ + std::log1p(d));
    if (d >= 1.0) return LogSigned{};  // exact cancellation
    return LogSigned(hi->sign_, hi->log_mag_ + std::log1p(-d));
  }

  friend LogSigned operator-(const LogSigned& a, const LogSigned& b) { return a + (-b); }

 private:
  LogSigned(int sign, double log_mag) : sign_(sign), log_mag_(log_mag) {}

  int sign_ = 0;
  double log_mag_ = -std::numeric_limits<double>::infinity();
};

// log(sinh t), log(cosh t), log(tanh t) for t > 0 without overflow.
inline double log_sinh(double t) {
  if (!(t > 0)) throw std::domain_error("log_sinh requires t > 0");
  if (t < 1.0) return std::log(std::sinh(t));
  return t + std::log1p(-std::exp(-2.0 * t)) - std::log(2.0);
}

inline double log_cosh(double t) {
  t = std::fabs(t);
  if (t < 1.0) return std::log(std::cosh(t));
  return t + std::log1p(std::exp(-2.0 * t)) - std::log(2.0);
}

inline double log_tanh(double t) {
  if (!(t > 0)) throw std::domain_error("log_tanh requires t > 0");
  if (t < 20.0) return std::log(std::tanh(t));
  return std::log1p(-2.0 / (std::exp(2.0 * t) + 1.0));
}

}  // namespace casimir
