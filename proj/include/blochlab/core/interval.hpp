#pragma once

#include <iosfwd>
#include <string>

#include "blochlab/core/rational.hpp"

namespace blochlab::core {

/// Closed real interval [lo, hi] with outward rounding.
///
/// Arithmetic runs in round-to-nearest double precision; each endpoint is
/// then corrected with an error-free transformation (TwoSum, FMA residuals),
/// so a result is widened by one ulp only when the rounded value is inexact.
/// exp and log come from libm (< 1 ulp in glibc) and are widened by two ulps.
/// The library must be built without FP contraction or fast-math.
class Interval {
 public:
  Interval() = default;
  explicit Interval(double point);
  Interval(double lo, double hi);

  /// Smallest double interval containing p/q.
  static Interval from_rational(const Rational& q);
  static Interval pi();
  static Interval e();

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  double mid() const;
  double width() const { return hi_ - lo_; }
  double mag() const;  // max |x| over the interval

  bool contains(double x) const { return lo_ <= x && x <= hi_; }
  bool contains(const Interval& other) const { return lo_ <= other.lo_ && other.hi_ <= hi_; }
  bool contains_zero() const { return lo_ <= 0.0 && 0.0 <= hi_; }
  bool is_point() const { return lo_ == hi_; }

  Interval& operator+=(const Interval& o);
  Interval& operator-=(const Interval& o);
  Interval& operator*=(const Interval& o);
  Interval& operator/=(const Interval& o);

  friend Interval operator-(const Interval& a) { return Interval(-a.hi_, -a.lo_); }
  friend Interval operator+(Interval a, const Interval& b) { return a += b; }
  friend Interval operator-(Interval a, const Interval& b) { return a -= b; }
  friend Interval operator*(Interval a, const Interval& b) { return a *= b; }
  friend Interval operator/(Interval a, const Interval& b) { return a /= b; }
  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lo_ = 0.0;
  double hi_ = 0.0;
};

Interval sqr(const Interval& x);
Interval sqrt(const Interval& x);
Interval exp(const Interval& x);
Interval log(const Interval& x);
Interval abs(const Interval& x);
Interval pow(const Interval& x, int n);
/// x^y = exp(y log x); requires x > 0.
Interval pow(const Interval& x, const Interval& y);
Interval hull(const Interval& a, const Interval& b);
/// Throws DomainError when the intervals are disjoint.
Interval intersect(const Interval& a, const Interval& b);
/// Enclosure of {max(x, y)} for x in a, y in b.
Interval max(const Interval& a, const Interval& b);
Interval min(const Interval& a, const Interval& b);

/// Round-trip decimal form of an endpoint ("%.17g").
std::string format_endpoint(double x);
std::ostream& operator<<(std::ostream& os, const Interval& x);

}  // namespace blochlab::core
