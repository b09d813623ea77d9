#include "blochlab/core/bloch_function.hpp"

#include <cmath>
#include <utility>

#include "blochlab/core/errors.hpp"

namespace blochlab::core {
namespace {

bool finite(Complex w) { return std::isfinite(w.real()) && std::isfinite(w.imag()); }

}  // namespace

BlochFunction::BlochFunction(ComplexFn value, ComplexFn derivative, Domain domain, std::string label)
    : value_(std::move(value)), derivative_(std::move(derivative)), domain_(domain), label_(std::move(label)) {
  if (!value_ || !derivative_) throw DomainError("BlochFunction needs both evaluators");
}

Complex BlochFunction::operator()(Complex z) const {
  if (!in_domain(z, domain_)) throw EvaluationError("evaluation point outside the open " + std::string(to_string(domain_)));
  const Complex w = value_(z);
  if (!finite(w)) throw EvaluationError("non-finite value of " + label_);
  return w;
}

Complex BlochFunction::derivative(Complex z) const {
  if (!in_domain(z, domain_)) throw EvaluationError("evaluation point outside the open " + std::string(to_string(domain_)));
  const Complex w = derivative_(z);
  if (!finite(w)) throw EvaluationError("non-finite derivative of " + label_);
  return w;
}

BlochFunction& BlochFunction::with_series(std::vector<Complex> q) {
  series_ = std::move(q);
  return *this;
}

BlochFunction& BlochFunction::with_declared_norm(double norm) {
  declared_norm_ = norm;
  return *this;
}

BlochFunction& BlochFunction::with_period(double period) {
  period_ = period;
  return *this;
}

BlochFunction& BlochFunction::with_label(std::string label) {
  label_ = std::move(label);
  return *this;
}

double bloch_quotient(const BlochFunction& b, const HyperbolicPoint& z) {
  if (z.domain() != b.domain()) throw DomainError("point and function live on different domains");
  return 2.0 * std::abs(b.derivative(z.z())) / z.density();
}

double bloch_quotient(const BlochFunction& b, Complex z) {
  if (!in_domain(z, b.domain())) throw EvaluationError("quotient requested outside the open domain");
  return bloch_quotient(b, HyperbolicPoint::make(z, b.domain()));
}

BlochFunction scaled(const BlochFunction& b, Complex c) {
  BlochFunction out([b, c](Complex z) { return c * b(z); }, [b, c](Complex z) { return c * b.derivative(z); },
                    b.domain(), "scaled(" + b.label() + ")");
  if (b.declared_norm()) out.with_declared_norm(std::abs(c) * *b.declared_norm());
  if (b.derivative_series()) {
    auto q = *b.derivative_series();
    for (auto& x : q) x *= c;
    out.with_series(std::move(q));
  }
  if (b.period()) out.with_period(*b.period());
  return out;
}

BlochFunction sum(const BlochFunction& a, const BlochFunction& b) {
  if (a.domain() != b.domain()) throw DomainError("sum of functions on different domains");
  BlochFunction out([a, b](Complex z) { return a(z) + b(z); },
                    [a, b](Complex z) { return a.derivative(z) + b.derivative(z); }, a.domain(),
                    "sum(" + a.label() + "," + b.label() + ")");
  if (a.declared_norm() && b.declared_norm()) out.with_declared_norm(*a.declared_norm() + *b.declared_norm());
  if (a.period() && b.period() && *a.period() == *b.period()) out.with_period(*a.period());
  return out;
}

BlochFunction plus_constant(const BlochFunction& b, Complex c) {
  BlochFunction out([b, c](Complex z) { return b(z) + c; }, [b](Complex z) { return b.derivative(z); },
                    b.domain(), b.label() + "+const");
  if (b.declared_norm()) out.with_declared_norm(*b.declared_norm());
  if (b.derivative_series()) out.with_series(*b.derivative_series());
  if (b.period()) out.with_period(*b.period());
  return out;
}

BlochFunction compose(const BlochFunction& b, const DiskAutomorphism& phi) {
  if (b.domain() != Domain::disk) throw DomainError("compose expects a disk function");
  BlochFunction out([b, phi](Complex z) { return b(phi(z)); },
                    [b, phi](Complex z) { return b.derivative(phi(z)) * phi.derivative(z); }, Domain::disk,
                    b.label() + " o phi");
  if (b.declared_norm()) out.with_declared_norm(*b.declared_norm());
  return out;
}

BlochFunction pull_back_to_disk(const BlochFunction& b, Complex center) {
  if (b.domain() != Domain::half_plane) throw DomainError("pull_back_to_disk expects a half-plane function");
  const DiskToHalfPlane psi(center);
  BlochFunction out([b, psi](Complex z) { return b(psi(z)); },
                    [b, psi](Complex z) { return b.derivative(psi(z)) * psi.derivative(z); }, Domain::disk,
                    b.label() + " o psi");
  if (b.declared_norm()) out.with_declared_norm(*b.declared_norm());
  return out;
}

}  // namespace blochlab::core
