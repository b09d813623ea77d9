#include "blochlab/core/hyperbolic.hpp"

#include <cmath>
#include <numbers>

#include "blochlab/core/errors.hpp"

namespace blochlab::core {

const char* to_string(Domain d) { return d == Domain::disk ? "disk" : "half-plane"; }

bool in_domain(Complex z, Domain d) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
  return d == Domain::disk ? std::norm(z) < 1.0 : z.imag() > 0.0;
}

double density(Complex z, Domain d) {
  if (!in_domain(z, d)) throw DomainError("point outside the open domain");
  return d == Domain::disk ? 2.0 / (1.0 - std::norm(z)) : 1.0 / z.imag();
}

HyperbolicPoint HyperbolicPoint::make(Complex z, Domain domain) {
  if (!in_domain(z, domain)) {
    throw DomainError(domain == Domain::disk ? "disk point needs |z| < 1" : "half-plane point needs Im z > 0");
  }
  return HyperbolicPoint(z, domain);
}

HyperbolicPoint HyperbolicPoint::disk(Complex z) { return make(z, Domain::disk); }
HyperbolicPoint HyperbolicPoint::half_plane(Complex z) { return make(z, Domain::half_plane); }

double HyperbolicPoint::density() const { return core::density(z_, domain_); }

double hyperbolic_radius(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("hyperbolic_radius needs 0 <= r < 1");
  return 2.0 * std::atanh(r);
}

double euclidean_radius(double hyperbolic_r) {
  if (!(hyperbolic_r >= 0.0) || !std::isfinite(hyperbolic_r)) throw DomainError("radius must be finite and >= 0");
  return std::tanh(0.5 * hyperbolic_r);
}

double hyperbolic_area_disk(double r) {
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("hyperbolic_area_disk needs 0 <= r < 1");
  return 4.0 * std::numbers::pi * r * r / (1.0 - r * r);
}

double distance_disk(Complex z, Complex w) {
  if (!in_domain(z, Domain::disk) || !in_domain(w, Domain::disk)) throw DomainError("point outside the disk");
  const double t = std::abs(z - w) / std::abs(1.0 - std::conj(w) * z);
  return 2.0 * std::atanh(std::min(t, 1.0));
}

double distance_half_plane(Complex z, Complex w) {
  if (!in_domain(z, Domain::half_plane) || !in_domain(w, Domain::half_plane)) {
    throw DomainError("point outside the upper half-plane");
  }
  return std::acosh(1.0 + std::norm(z - w) / (2.0 * z.imag() * w.imag()));
}

DiskAutomorphism::DiskAutomorphism(Complex a, double angle) : a_(a), rotation_(std::polar(1.0, angle)) {
  if (std::norm(a) >= 1.0) throw DomainError("automorphism parameter must lie in the disk");
}

Complex DiskAutomorphism::operator()(Complex z) const {
  return rotation_ * (z + a_) / (1.0 + std::conj(a_) * z);
}

Complex DiskAutomorphism::derivative(Complex z) const {
  const Complex d = 1.0 + std::conj(a_) * z;
  return rotation_ * (1.0 - std::norm(a_)) / (d * d);
}

DiskAutomorphism DiskAutomorphism::inverse() const {
  // w = R (z + a)/(1 + conj(a) z)  =>  z = (w/R - a) / (1 - conj(a) w/R)
  //                                    = conj(R) (w + b) / (1 + conj(b) w),  b = -R a.
  DiskAutomorphism out(-rotation_ * a_);
  out.rotation_ = std::conj(rotation_);
  return out;
}

DiskToHalfPlane::DiskToHalfPlane(Complex center) : center_(center) {
  if (!(center.imag() > 0.0)) throw DomainError("half-plane center needs Im > 0");
}

Complex DiskToHalfPlane::operator()(Complex z) const {
  return center_.real() + center_.imag() * Complex(0.0, 1.0) * (1.0 + z) / (1.0 - z);
}

Complex DiskToHalfPlane::derivative(Complex z) const {
  const Complex d = 1.0 - z;
  return center_.imag() * Complex(0.0, 2.0) / (d * d);
}

Complex DiskToHalfPlane::inverse(Complex w) const {
  const Complex u = (w - center_.real()) / (center_.imag() * Complex(0.0, 1.0));
  return (u - 1.0) / (u + 1.0);
}

}  // namespace blochlab::core
