#include "blochlab/core/interval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "blochlab/core/errors.hpp"

namespace blochlab::core {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Below this magnitude FMA residuals may underflow and stop being exact.
constexpr double kTiny = 0x1p-960;

double down(double x) { return std::nextafter(x, -kInf); }
double up(double x) { return std::nextafter(x, kInf); }

void require_finite(double x, const char* op) {
  if (!std::isfinite(x)) throw DomainError(std::string("interval overflow in ") + op);
}

// Directed sums via TwoSum.
double add_down(double a, double b) {
  const double s = a + b;
  require_finite(s, "add");
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err < 0.0 ? down(s) : s;
}

double add_up(double a, double b) {
  const double s = a + b;
  require_finite(s, "add");
  const double bb = s - a;
  const double err = (a - (s - bb)) + (b - bb);
  return err > 0.0 ? up(s) : s;
}

bool tiny_inexact(double p, double a, double b) {
  return a != 0.0 && b != 0.0 && std::fabs(p) < kTiny;
}

double mul_down(double a, double b) {
  const double p = a * b;
  require_finite(p, "mul");
  if (tiny_inexact(p, a, b)) return down(p);
  const double err = std::fma(a, b, -p);
  return err < 0.0 ? down(p) : p;
}

double mul_up(double a, double b) {
  const double p = a * b;
  require_finite(p, "mul");
  if (tiny_inexact(p, a, b)) return up(p);
  const double err = std::fma(a, b, -p);
  return err > 0.0 ? up(p) : p;
}

// a / b = q + r / b with r = a - q b exact.
double div_down(double a, double b) {
  const double q = a / b;
  require_finite(q, "div");
  if (tiny_inexact(q, a, 1.0) || (a != 0.0 && q == 0.0)) return down(q);
  const double r = std::fma(-q, b, a);
  const bool below = (r < 0.0 && b > 0.0) || (r > 0.0 && b < 0.0);
  return below ? down(q) : q;
}

double div_up(double a, double b) {
  const double q = a / b;
  require_finite(q, "div");
  if (tiny_inexact(q, a, 1.0) || (a != 0.0 && q == 0.0)) return up(q);
  const double r = std::fma(-q, b, a);
  const bool above = (r > 0.0 && b > 0.0) || (r < 0.0 && b < 0.0);
  return above ? up(q) : q;
}

double sqrt_down(double x) {
  const double s = std::sqrt(x);
  const double r = std::fma(-s, s, x);
  return r < 0.0 ? down(s) : s;
}

double sqrt_up(double x) {
  const double s = std::sqrt(x);
  const double r = std::fma(-s, s, x);
  return r > 0.0 ? up(s) : s;
}

// Nonnegative base; chaining directed products keeps each partial a bound.
double pow_nonneg_down(double x, int n) {
  double acc = 1.0;
  for (int i = 0; i < n; ++i) acc = mul_down(acc, x);
  return acc;
}

double pow_nonneg_up(double x, int n) {
  double acc = 1.0;
  for (int i = 0; i < n; ++i) acc = mul_up(acc, x);
  return acc;
}

Interval from_int64(std::int64_t v) {
  const double d = static_cast<double>(v);
  // |d| <= 2^63 always converts back safely except at exactly 2^63.
  if (std::fabs(d) < 0x1p63 && static_cast<std::int64_t>(d) == v) return Interval(d);
  return Interval(down(d), up(d));
}

}  // namespace

Interval::Interval(double point) : lo_(point), hi_(point) {
  if (!std::isfinite(point)) throw DomainError("interval endpoint must be finite");
}

Interval::Interval(double lo, double hi) : lo_(lo), hi_(hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw DomainError("interval endpoint must be finite");
  if (lo > hi) throw DomainError("interval with lo > hi");
}

Interval Interval::from_rational(const Rational& q) {
  return from_int64(q.num()) / from_int64(q.den());
}

Interval Interval::pi() {
  constexpr double kPiBelow = 3.141592653589793115997963468544185161590576171875;
  return Interval(kPiBelow, up(kPiBelow));
}

Interval Interval::e() {
  constexpr double kEBelow = 2.718281828459045090795598298427648842334747314453125;
  return Interval(kEBelow, up(kEBelow));
}

double Interval::mid() const { return lo_ + 0.5 * (hi_ - lo_); }

double Interval::mag() const { return std::max(std::fabs(lo_), std::fabs(hi_)); }

Interval& Interval::operator+=(const Interval& o) {
  *this = Interval(add_down(lo_, o.lo_), add_up(hi_, o.hi_));
  return *this;
}

Interval& Interval::operator-=(const Interval& o) {
  *this = Interval(add_down(lo_, -o.hi_), add_up(hi_, -o.lo_));
  return *this;
}

Interval& Interval::operator*=(const Interval& o) {
  const double a[2] = {lo_, hi_};
  const double b[2] = {o.lo_, o.hi_};
  double lo = kInf;
  double hi = -kInf;
  for (double x : a) {
    for (double y : b) {
      lo = std::min(lo, mul_down(x, y));
      hi = std::max(hi, mul_up(x, y));
    }
  }
  *this = Interval(lo, hi);
  return *this;
}

Interval& Interval::operator/=(const Interval& o) {
  if (o.contains_zero()) throw DomainError("interval division by an interval containing 0");
  const double a[2] = {lo_, hi_};
  const double b[2] = {o.lo_, o.hi_};
  double lo = kInf;
  double hi = -kInf;
  for (double x : a) {
    for (double y : b) {
      lo = std::min(lo, div_down(x, y));
      hi = std::max(hi, div_up(x, y));
    }
  }
  *this = Interval(lo, hi);
  return *this;
}

Interval sqr(const Interval& x) {
  const Interval m = abs(x);
  return Interval(mul_down(m.lo(), m.lo()), mul_up(m.hi(), m.hi()));
}

Interval sqrt(const Interval& x) {
  if (x.lo() < 0.0) throw DomainError("interval sqrt of a negative value");
  return Interval(sqrt_down(x.lo()), sqrt_up(x.hi()));
}

Interval exp(const Interval& x) {
  const double lo = std::exp(x.lo());
  const double hi = std::exp(x.hi());
  require_finite(hi, "exp");
  return Interval(std::max(0.0, down(down(lo))), up(up(hi)));
}

Interval log(const Interval& x) {
  if (x.lo() <= 0.0) throw DomainError("interval log of a non-positive value");
  return Interval(down(down(std::log(x.lo()))), up(up(std::log(x.hi()))));
}

Interval abs(const Interval& x) {
  if (x.lo() >= 0.0) return x;
  if (x.hi() <= 0.0) return -x;
  return Interval(0.0, std::max(-x.lo(), x.hi()));
}

Interval pow(const Interval& x, int n) {
  if (n == 0) return Interval(1.0);
  if (n < 0) return Interval(1.0) / pow(x, -n);
  if (n % 2 == 0) {
    const Interval m = abs(x);
    return Interval(pow_nonneg_down(m.lo(), n), pow_nonneg_up(m.hi(), n));
  }
  auto lower = [n](double v) { return v >= 0.0 ? pow_nonneg_down(v, n) : -pow_nonneg_up(-v, n); };
  auto upper = [n](double v) { return v >= 0.0 ? pow_nonneg_up(v, n) : -pow_nonneg_down(-v, n); };
  return Interval(lower(x.lo()), upper(x.hi()));
}

Interval pow(const Interval& x, const Interval& y) {
  if (x.lo() <= 0.0) throw DomainError("interval power needs a positive base");
  return exp(y * log(x));
}

Interval hull(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Interval intersect(const Interval& a, const Interval& b) {
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) throw DomainError("intersection of disjoint intervals");
  return Interval(lo, hi);
}

Interval max(const Interval& a, const Interval& b) {
  return Interval(std::max(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

Interval min(const Interval& a, const Interval& b) {
  return Interval(std::min(a.lo(), b.lo()), std::min(a.hi(), b.hi()));
}

std::string format_endpoint(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::ostream& operator<<(std::ostream& os, const Interval& x) {
  return os << '[' << format_endpoint(x.lo()) << ", " << format_endpoint(x.hi()) << ']';
}

}  // namespace blochlab::core
