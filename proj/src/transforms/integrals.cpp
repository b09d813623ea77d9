#include <algorithm>
#include <cmath>
#include <numbers>

#include "blochlab/core/errors.hpp"
#include "blochlab/core/hyperbolic.hpp"
#include "blochlab/core/quadrature.hpp"
#include "blochlab/transforms/transforms.hpp"

namespace blochlab::transforms {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap(double t) {
  t = std::fmod(t, 2.0 * kPi);
  return t < 0.0 ? t + 2.0 * kPi : t;
}

// Angles theta in (lo, hi) where the circle |w - z| = rho meets an edge of
// the support, so that the angular quadrature never straddles a jump.
std::vector<double> angular_breaks(const Support& s, Complex z, double rho, double lo, double hi) {
  std::vector<double> out;
  auto keep = [&](double t) {
    t = wrap(t);
    if (t > lo && t < hi) out.push_back(t);
  };
  for (const Rect& r : s.rects) {
    for (double a : {r.x0, r.x1}) {
      const double c = (a - z.real()) / rho;
      if (std::fabs(c) <= 1.0) {
        keep(std::acos(c));
        keep(-std::acos(c));
      }
    }
    for (double b : {r.y0, r.y1}) {
      const double sn = (b - z.imag()) / rho;
      if (std::fabs(sn) <= 1.0) {
        keep(std::asin(sn));
        keep(kPi - std::asin(sn));
      }
    }
  }
  for (const Circle& c : s.circles) {
    const double d = std::abs(c.center - z);
    if (d == 0.0 || d > rho + c.radius || d < std::fabs(rho - c.radius)) continue;
    const double phi = std::arg(c.center - z);
    const double alpha = std::acos(std::clamp((rho * rho + d * d - c.radius * c.radius) / (2.0 * rho * d), -1.0, 1.0));
    keep(phi + alpha);
    keep(phi - alpha);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Distances from z at which the picture of the support changes.
std::vector<double> radial_breaks(const Support& s, Complex z) {
  std::vector<double> out;
  for (const Rect& r : s.rects) {
    for (double x : {r.x0, r.x1}) {
      for (double y : {r.y0, r.y1}) out.push_back(std::abs(Complex(x, y) - z));
      out.push_back(std::abs(Complex(x, std::clamp(z.imag(), r.y0, r.y1)) - z));
    }
    for (double y : {r.y0, r.y1}) out.push_back(std::abs(Complex(std::clamp(z.real(), r.x0, r.x1), y) - z));
  }
  for (const Circle& c : s.circles) {
    const double d = std::abs(c.center - z);
    out.push_back(d + c.radius);
    out.push_back(std::fabs(d - c.radius));
  }
  return out;
}

double rect_distance(const Rect& r, Complex z) {
  return std::abs(Complex(std::clamp(z.real(), r.x0, r.x1), std::clamp(z.imag(), r.y0, r.y1)) - z);
}

double rect_far(const Rect& r, Complex z) {
  double d = 0.0;
  for (double x : {r.x0, r.x1}) {
    for (double y : {r.y0, r.y1}) d = std::max(d, std::abs(Complex(x, y) - z));
  }
  return d;
}

// int over the lower half-plane (or the support's boxes) of mu(w) K(w) dA in
// polar coordinates w = z + e^s e^{i theta}, with rho <= rho_cap when the
// support is unbounded.
template <class Kernel>
Complex integrate_lower(const BeltramiCoefficient& mu, Complex z, Kernel kernel, double rho_cap, double abs_tol,
                        std::vector<double> extra_breaks) {
  const Support& s = mu.support();
  const double y = z.imag();
  double lo = y;
  double hi = rho_cap;
  if (s.kind == Support::Kind::boxes) {
    if (s.rects.empty()) return 0.0;
    lo = std::numeric_limits<double>::infinity();
    hi = 0.0;
    for (const Rect& r : s.rects) {
      lo = std::min(lo, rect_distance(r, z));
      hi = std::max(hi, rect_far(r, z));
    }
    lo = std::max(lo, y);
  }
  if (!(hi > lo)) return 0.0;
  const double s0 = std::log(lo);
  const double s1 = std::log(hi);
  std::vector<double> breaks;
  for (double r : radial_breaks(s, z)) {
    if (r > lo && r < hi) breaks.push_back(std::log(r));
  }
  for (double r : extra_breaks) {
    if (r > lo && r < hi) breaks.push_back(std::log(r));
  }
  for (double t = std::floor(s0) + 1.0; t < s1; t += 1.0) breaks.push_back(t);
  const double span = s1 - s0;

  core::AdaptiveOptions outer;
  outer.abs_tol = abs_tol;
  outer.rel_tol = 1e-13;
  outer.max_intervals = 4000;
  core::AdaptiveOptions inner = outer;
  inner.max_intervals = 2000;

  auto ring = [&](double sv) -> Complex {
    const double rho = std::exp(sv);
    const double ta = kPi + std::asin(std::min(1.0, y / rho));
    const double tb = 3.0 * kPi - ta;
    if (!(tb > ta)) return 0.0;
    core::AdaptiveOptions opt = inner;
    opt.abs_tol = 0.25 * abs_tol / (span * rho * rho);
    const auto tbreaks = angular_breaks(s, z, rho, ta, tb);
    const auto q = core::integrate_adaptive(
        [&](double t) {
          const Complex w = z + std::polar(rho, t);
          if (!(w.imag() < 0.0)) return Complex(0.0);
          const Complex m = mu(w);
          return m == Complex(0.0) ? m : m * kernel(w);
        },
        ta, tb, opt, tbreaks);
    return rho * rho * q.value;
  };
  const auto q = core::integrate_adaptive(ring, s0, s1, outer, breaks);
  return q.value;
}

void check_upper(Complex z) {
  if (!(z.imag() > 0.0) || !std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw DomainError("evaluation point must lie in the upper half-plane");
  }
}

void check_lower_support(const BeltramiCoefficient& mu) {
  if (mu.support().kind == Support::Kind::disk) throw DomainError("coefficient must live on the lower half-plane");
}

double unbounded_cap(const BeltramiCoefficient& mu, double needed) {
  if (mu.support().kind == Support::Kind::boxes) return 0.0;
  if (!std::isfinite(mu.bound())) throw DomainError("unbounded coefficient on an unbounded support");
  return needed;
}

// (S mu)'(z) to within target / (2 Im z), including the truncated tail.
Complex derivative_once(const BeltramiCoefficient& mu, Complex z, double target) {
  const double y = z.imag();
  const double quotient_tol = target;
  // Tail beyond rho: |2y (S mu)'| <= 4 y bound / rho.
  const double cap = unbounded_cap(mu, std::max(10.0 * y, 40.0 * y * mu.bound() / quotient_tol));
  const double raw_tol = 0.5 * (quotient_tol / (2.0 * y)) / (2.0 / kPi);
  const Complex raw = integrate_lower(
      mu, z, [z](Complex w) {
        const Complex d = w - z;
        return 1.0 / (d * d * d);
      },
      cap, raw_tol, {});
  return -(2.0 / kPi) * raw;
}

Complex value_once(const BeltramiCoefficient& mu, Complex z, double tol) {
  // For |w - z| >= 2(|z| + 1) the kernel is at most 4 C / |w - z|^3.
  const double C = 1.5 * std::abs(2.0 * z - 1.0) + std::abs(z);
  const double cap = unbounded_cap(mu, std::max(2.0 * (std::abs(z) + 1.0), 40.0 * C * mu.bound() / tol));
  const Complex raw = integrate_lower(
      mu, z, [z](Complex w) {
        const Complex d = w - z;
        return 1.0 / (d * d) - 1.0 / (w * (w - 1.0));
      },
      cap, 0.5 * kPi * tol, {std::abs(z), std::abs(z - 1.0)});
  return -raw / kPi;
}

template <class F>
Complex refine(F once, double tol, const char* what) {
  const Complex coarse = once(tol);
  const Complex fine = once(0.25 * tol);
  if (std::abs(fine - coarse) > tol) throw ConvergenceError(std::string(what) + " did not settle", coarse, fine);
  return fine;
}

Complex bergman_once(const BeltramiCoefficient& mu, Complex z, double tol) {
  core::PeriodicOptions popt;
  popt.start_nodes = 64;
  popt.abs_tol = 0.25 * kPi * tol;
  popt.rel_tol = 1e-13;
  popt.max_nodes = std::size_t{1} << 20;
  auto ring = [&](double rho) -> Complex {
    const auto q = core::periodic_trapezoid(
        [&](double t) {
          const Complex w = std::polar(rho, t);
          const Complex d = 1.0 - z * std::conj(w);
          return mu(w) / (d * d);
        },
        2.0 * kPi, popt);
    return rho * q.value;
  };
  core::AdaptiveOptions opt;
  opt.abs_tol = 0.5 * kPi * tol;
  opt.rel_tol = 1e-13;
  const double br[] = {std::abs(z)};
  const auto q = core::integrate_adaptive(ring, 0.0, 1.0, opt, std::span<const double>(br));
  return q.value / kPi;
}

}  // namespace

Complex bergman_project(const BeltramiCoefficient& mu, Complex z, double tol) {
  if (mu.support().kind != Support::Kind::disk) throw DomainError("Bergman projection needs a coefficient on the disk");
  if (!(std::norm(z) < 1.0)) throw DomainError("Bergman projection is evaluated inside the disk");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  return refine([&](double t) { return bergman_once(mu, z, t); }, tol, "Bergman projection");
}

Complex beurling_derivative(const BeltramiCoefficient& mu, Complex z, double tol) {
  check_upper(z);
  check_lower_support(mu);
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  // Agreement is judged on the scale-free quantity 2 Im z (S mu)'.
  const double scale = 2.0 * z.imag();
  return refine([&](double t) { return scale * derivative_once(mu, z, t); }, tol, "Beurling derivative") / scale;
}

BeurlingResult beurling_modified(const BeltramiCoefficient& mu, Complex z, double tol) {
  const Complex d = beurling_derivative(mu, z, tol);
  const Complex v = refine([&](double t) { return value_once(mu, z, t); }, tol, "Beurling transform");
  return {v, d};
}

double beurling_quotient(const BeltramiCoefficient& mu, Complex z, double tol) {
  return 2.0 * z.imag() * std::abs(beurling_derivative(mu, z, tol));
}

double box_average(const BlochFunction& b, const NAdicBox& box, double tol) {
  if (b.domain() != core::Domain::half_plane) throw DomainError("box_average expects a half-plane function");
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  core::AdaptiveOptions inner;
  inner.rel_tol = 0.1 * tol;
  inner.abs_tol = 1e-15;
  bool converged = true;
  auto row = [&](double s) {
    const double y = std::exp(s);
    const auto q = core::integrate_adaptive(
        [&](double x) { return 4.0 * y * y * std::norm(b.derivative(Complex(x, y))); }, box.left(), box.right(), inner);
    if (!q.converged) converged = false;
    return q.value;
  };
  core::AdaptiveOptions outer;
  outer.rel_tol = tol;
  outer.abs_tol = 1e-15;
  const auto q = core::integrate_adaptive(row, std::log(box.bottom()), std::log(box.top()), outer);
  const double avg = q.value / box.weighted_area();
  if (!(converged && q.converged)) throw ConvergenceError("box average did not converge", avg, avg);
  return avg;
}

double collar_ratio(const NAdicBox& box, double S) {
  if (!(S > 0.0)) throw DomainError("collar width S must be positive");
  const double c = box.bottom();
  const double d = box.top();
  const double W = box.width();
  const double lc = std::log(c);
  const double ld = std::log(d);
  // Fraction of the row at height y = e^s lying within S of the boundary.
  auto fraction = [&](double s) {
    if (s < lc + S || s > ld - S) return 1.0;
    const double y = std::exp(s);
    double delta;
    if (y * std::cosh(S) <= d) {
      delta = y * std::sinh(S);
    } else {
      delta = std::sqrt(std::max(0.0, 2.0 * y * d * (std::cosh(S) - 1.0) - (y - d) * (y - d)));
    }
    return std::min(1.0, 2.0 * delta / W);
  };
  std::vector<double> breaks{lc + S, ld - S, std::log(d / std::cosh(S))};
  // Where 2 y sinh S reaches the width the row is entirely collar.
  breaks.push_back(std::log(W / (2.0 * std::sinh(S))));
  core::AdaptiveOptions opt;
  opt.abs_tol = 1e-14;
  opt.rel_tol = 1e-13;
  const auto q = core::integrate_adaptive(fraction, lc, ld, opt, breaks);
  return std::min(1.0, q.value / (ld - lc));
}

double locality_gap(const BeltramiCoefficient& mu1, const BeltramiCoefficient& mu2, Complex z, double R, double tol) {
  check_upper(z);
  check_lower_support(mu1);
  check_lower_support(mu2);
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");
  const Complex zbar = std::conj(z);
  Support s;
  s.kind = Support::Kind::lower_half_plane;
  s.circles = mu1.support().circles;
  s.circles.insert(s.circles.end(), mu2.support().circles.begin(), mu2.support().circles.end());
  s.rects = mu1.support().rects;
  s.rects.insert(s.rects.end(), mu2.support().rects.begin(), mu2.support().rects.end());
  s.circles.push_back({Complex(z.real(), -z.imag() * std::cosh(R)), z.imag() * std::sinh(R)});
  auto diff = [mu1, mu2, zbar, R](Complex w) {
    if (core::distance_half_plane(std::conj(w), std::conj(zbar)) < R) return Complex(0.0);
    return mu1(w) - mu2(w);
  };
  const BeltramiCoefficient d =
      from_function(diff, s, mu1.bound() + mu2.bound(), {{"kind", "difference"}, {"R", R}});
  return beurling_quotient(d, z, tol);
}

}  // namespace blochlab::transforms
