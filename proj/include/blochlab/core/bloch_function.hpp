#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "blochlab/core/hyperbolic.hpp"

namespace blochlab::core {

using ComplexFn = std::function<Complex(Complex)>;

/// An analytic function on the disk or the upper half-plane together with
/// its derivative.
///
/// Evaluation checks that the point lies in the open domain and that the
/// result is finite, throwing EvaluationError otherwise. Evaluators must be
/// pure: a BlochFunction is shared freely across threads.
class BlochFunction {
 public:
  BlochFunction(ComplexFn value, ComplexFn derivative, Domain domain, std::string label = {});

  Complex operator()(Complex z) const;
  Complex derivative(Complex z) const;

  Domain domain() const { return domain_; }
  const std::string& label() const { return label_; }

  /// Closed-form Taylor coefficients q_k of b' at 0, when known.
  const std::optional<std::vector<Complex>>& derivative_series() const { return series_; }
  /// A proven upper bound for the Bloch norm, when known.
  std::optional<double> declared_norm() const { return declared_norm_; }
  /// Period in Re w of a half-plane function, when it has one.
  std::optional<double> period() const { return period_; }

  BlochFunction& with_series(std::vector<Complex> q);
  BlochFunction& with_declared_norm(double norm);
  BlochFunction& with_period(double period);
  BlochFunction& with_label(std::string label);

 private:
  ComplexFn value_;
  ComplexFn derivative_;
  Domain domain_;
  std::string label_;
  std::optional<std::vector<Complex>> series_;
  std::optional<double> declared_norm_;
  std::optional<double> period_;
};

/// |2 b' / rho|: |b'(z)| (1 - |z|^2) on the disk, 2 Im z |b'(z)| on the half-plane.
double bloch_quotient(const BlochFunction& b, const HyperbolicPoint& z);
/// Same, for a raw point; throws EvaluationError off the domain.
double bloch_quotient(const BlochFunction& b, Complex z);

// Combinators. Declared norms and series follow where the algebra allows.
BlochFunction scaled(const BlochFunction& b, Complex c);
BlochFunction sum(const BlochFunction& a, const BlochFunction& b);
BlochFunction plus_constant(const BlochFunction& b, Complex c);
/// z -> b(phi(z)); the Bloch norm is unchanged.
BlochFunction compose(const BlochFunction& b, const DiskAutomorphism& phi);
/// Disk function g = b o psi with psi the disk-to-half-plane isometry at `center`.
BlochFunction pull_back_to_disk(const BlochFunction& b, Complex center);

}  // namespace blochlab::core
