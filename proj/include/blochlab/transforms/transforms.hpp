#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

#include "json.hpp"

#include "blochlab/core/bloch_function.hpp"

namespace blochlab::transforms {

using core::BlochFunction;
using core::Complex;

/// Axis-parallel rectangle [x0, x1] x [y0, y1].
struct Rect {
  double x0, x1, y0, y1;
  bool contains(Complex w) const { return w.real() >= x0 && w.real() < x1 && w.imag() >= y0 && w.imag() < y1; }
};

/// Grid box over I = [j n^-k, (j+1) n^-k] with heights [|I|/n, |I|).
struct NAdicBox {
  int n = 2;
  std::int64_t j = 0;
  int k = 0;

  double width() const;
  double left() const { return static_cast<double>(j) * width(); }
  double right() const { return static_cast<double>(j + 1) * width(); }
  double bottom() const { return width() / n; }
  double top() const { return width(); }

  /// Half-open membership [left, right) x [bottom, top).
  bool contains(Complex w) const;
  Rect rect() const { return {left(), right(), bottom(), top()}; }
  /// The mirror image in the lower half-plane.
  Rect reflected() const { return {left(), right(), -top(), -bottom()}; }

  /// |I| log n, the area under dx dy / y.
  double weighted_area() const;
  /// The same area by adaptive quadrature.
  double weighted_area_quadrature() const;

  /// The unique box of the base-n grid containing w (Im w > 0).
  static NAdicBox locate(int n, Complex w);

  nlohmann::json to_json() const { return nlohmann::json::array({n, j, k}); }
  static NAdicBox from_json(const nlohmann::json& j);
  friend bool operator==(const NAdicBox&, const NAdicBox&) = default;
};

/// Hyperbolic distance from w (inside the closed box) to the box boundary.
double distance_to_boundary(const NAdicBox& box, Complex w);

/// Circle |w - center| = radius across which a coefficient may jump.
struct Circle {
  Complex center;
  double radius;
};

struct Support {
  enum class Kind { disk, lower_half_plane, boxes, periodic };
  Kind kind = Kind::lower_half_plane;
  std::vector<Rect> rects;      // kind == boxes: the union carrying the coefficient
  int grid = 0;                 // kind == periodic: base of the grid
  std::vector<Circle> circles;  // known discontinuities, used as quadrature breakpoints
};

const char* to_string(Support::Kind kind);

/// A measurable field mu with |mu| <= bound, vanishing off its support.
class BeltramiCoefficient {
 public:
  using Fn = std::function<Complex(Complex)>;

  BeltramiCoefficient(Fn mu, Support support, double bound, nlohmann::json descriptor);

  /// mu(w); zero outside the support.
  Complex operator()(Complex w) const;
  bool in_support(Complex w) const;

  const Support& support() const { return support_; }
  double bound() const { return bound_; }
  const nlohmann::json& descriptor() const { return descriptor_; }

 private:
  Fn mu_;
  Support support_;
  double bound_;
  nlohmann::json descriptor_;
};

/// mu = c on the disk or on the lower half-plane.
BeltramiCoefficient constant(Complex c, Support::Kind kind);
/// mu = c on a union of rectangles in the lower half-plane.
BeltramiCoefficient boxed(Complex c, std::vector<Rect> rects);
/// Arbitrary evaluator; `bound` is the caller's bound on |mu|.
BeltramiCoefficient from_function(BeltramiCoefficient::Fn fn, Support support, double bound, nlohmann::json descriptor);
/// `inside` on the hyperbolic ball B(center, R) of the lower half-plane, `outside` elsewhere.
BeltramiCoefficient masked(const BeltramiCoefficient& inside, const BeltramiCoefficient& outside, Complex center,
                           double R);

/// Disk: (1 - |w|^2) b'(w) / conj(w), unbounded near 0.
/// Half-plane: 2i conj(b'(conj w)) / rho(w) on the lower half-plane.
BeltramiCoefficient mu_from_bloch(const BlochFunction& b);

/// Copies mu from the reflected source box to every reflected box of the
/// base-n grid by real affine maps.
BeltramiCoefficient periodize(const BeltramiCoefficient& mu, const NAdicBox& source, int n);

/// (h/S) mu_per where h < S is the hyperbolic distance to the boundary of
/// the containing reflected box; unchanged elsewhere.
BeltramiCoefficient damp_boundary(const BeltramiCoefficient& mu_per, double S);

nlohmann::json to_json(const BeltramiCoefficient& mu);
/// Rebuilds a coefficient from its descriptor (from_bloch goes through the
/// function mini-language; `function` coefficients cannot be rebuilt).
BeltramiCoefficient beltrami_from_json(const nlohmann::json& j);

/// (1/pi) int_D mu(w) / (1 - z conj(w))^2 dA(w). Runs at tol and tol/4 and
/// throws ConvergenceError when they differ by more than tol.
Complex bergman_project(const BeltramiCoefficient& mu, Complex z, double tol);

struct BeurlingResult {
  Complex value;
  Complex derivative;
};

/// S#mu(z) and (S mu)'(z) for mu on the lower half-plane, Im z > 0. The
/// derivative is resolved so that 2 Im z (S mu)'(z) is accurate to tol;
/// unbounded supports are truncated with a rigorous tail bound below tol/10.
BeurlingResult beurling_modified(const BeltramiCoefficient& mu, Complex z, double tol);
/// Only the derivative (cheaper).
Complex beurling_derivative(const BeltramiCoefficient& mu, Complex z, double tol);
/// |2 (S mu)'/rho_H|(z) = 2 Im z |(S mu)'(z)|.
double beurling_quotient(const BeltramiCoefficient& mu, Complex z, double tol);

/// (1/(|I| log n)) int_box |2 y b'|^2 dx dy / y.
double box_average(const BlochFunction& b, const NAdicBox& box, double tol);

/// Area of the S-collar of the box over its area, both under dx dy / y.
double collar_ratio(const NAdicBox& box, double S);

/// |2 (S mu1)'/rho_H - 2 (S mu2)'/rho_H|(z), integrating mu1 - mu2 outside
/// the ball B(conj z, R) on which the caller asserts they agree.
double locality_gap(const BeltramiCoefficient& mu1, const BeltramiCoefficient& mu2, Complex z, double R, double tol);

}  // namespace blochlab::transforms
