#pragma once

#include <string>

#include <mpfr.h>

#include "blochlab/core/interval.hpp"
#include "blochlab/core/rational.hpp"

namespace blochlab::core {

/// Interval with MPFR endpoints and a runtime mantissa width (bits).
///
/// Endpoints are computed with MPFR's directed rounding, so every operation
/// is a rigorous enclosure at any precision. Results take the larger of the
/// operand precisions.
class MpInterval {
 public:
  explicit MpInterval(long precision = 128);
  MpInterval(double point, long precision);
  MpInterval(const MpInterval& other);
  MpInterval(MpInterval&& other) noexcept;
  MpInterval& operator=(const MpInterval& other);
  MpInterval& operator=(MpInterval&& other) noexcept;
  ~MpInterval();

  static MpInterval from_rational(const Rational& q, long precision);
  static MpInterval pi(long precision);
  static MpInterval e(long precision);

  long precision() const { return precision_; }
  /// Outward conversion to a double interval.
  Interval to_interval() const;
  double lo_down() const;
  double hi_up() const;
  bool contains_zero() const;
  bool positive() const;  // lo > 0
  /// Decimal rendering of an endpoint with `digits` significant digits.
  std::string lo_string(int digits) const;
  std::string hi_string(int digits) const;

  MpInterval& operator+=(const MpInterval& o);
  MpInterval& operator-=(const MpInterval& o);
  MpInterval& operator*=(const MpInterval& o);
  MpInterval& operator/=(const MpInterval& o);

  friend MpInterval operator-(const MpInterval& a);
  friend MpInterval operator+(MpInterval a, const MpInterval& b) { return a += b; }
  friend MpInterval operator-(MpInterval a, const MpInterval& b) { return a -= b; }
  friend MpInterval operator*(MpInterval a, const MpInterval& b) { return a *= b; }
  friend MpInterval operator/(MpInterval a, const MpInterval& b) { return a /= b; }

  friend MpInterval sqr(const MpInterval& x);
  friend MpInterval sqrt(const MpInterval& x);
  friend MpInterval exp(const MpInterval& x);
  friend MpInterval log(const MpInterval& x);
  friend MpInterval abs(const MpInterval& x);
  friend MpInterval pow(const MpInterval& x, int n);
  friend MpInterval pow(const MpInterval& x, const MpInterval& y);
  friend MpInterval hull(const MpInterval& a, const MpInterval& b);
  friend MpInterval intersect(const MpInterval& a, const MpInterval& b);
  friend MpInterval max(const MpInterval& a, const MpInterval& b);
  friend MpInterval min(const MpInterval& a, const MpInterval& b);

 private:
  void reset_precision(long precision);

  long precision_;
  mpfr_t lo_;
  mpfr_t hi_;
};

}  // namespace blochlab::core
