#pragma once

#include <complex>

namespace blochlab::core {

using Complex = std::complex<double>;

enum class Domain { disk, half_plane };

const char* to_string(Domain d);

/// A point of the unit disk (density 2/(1-|z|^2)) or the upper half-plane
/// (density 1/Im z). Boundary points are rejected.
class HyperbolicPoint {
 public:
  static HyperbolicPoint disk(Complex z);
  static HyperbolicPoint half_plane(Complex z);
  static HyperbolicPoint make(Complex z, Domain domain);

  Complex z() const { return z_; }
  Domain domain() const { return domain_; }
  double density() const;

 private:
  HyperbolicPoint(Complex z, Domain d) : z_(z), domain_(d) {}
  Complex z_;
  Domain domain_;
};

bool in_domain(Complex z, Domain d);
double density(Complex z, Domain d);

/// eta(r) = log((1+r)/(1-r)): hyperbolic distance from 0 to r in the disk.
double hyperbolic_radius(double r);
/// Euclidean radius of the disk ball B(0, R); inverse of hyperbolic_radius.
double euclidean_radius(double hyperbolic_r);
/// Hyperbolic area 4 pi r^2 / (1 - r^2) of {|z| <= r}.
double hyperbolic_area_disk(double r);

double distance_disk(Complex z, Complex w);
double distance_half_plane(Complex z, Complex w);

/// Disk automorphism z -> rotation * (z + a) / (1 + conj(a) z), |a| < 1.
/// Maps 0 to rotation * a.
class DiskAutomorphism {
 public:
  explicit DiskAutomorphism(Complex a, double angle = 0.0);
  /// The automorphism taking 0 to `center` with positive derivative at 0.
  static DiskAutomorphism centered_at(Complex center) { return DiskAutomorphism(center); }

  Complex operator()(Complex z) const;
  Complex derivative(Complex z) const;
  DiskAutomorphism inverse() const;

 private:
  Complex a_;
  Complex rotation_;
};

/// Isometry from the disk onto the upper half-plane taking 0 to `center`:
/// z -> Re c + Im c * i (1 + z) / (1 - z).
class DiskToHalfPlane {
 public:
  explicit DiskToHalfPlane(Complex center);
  Complex operator()(Complex z) const;
  Complex derivative(Complex z) const;
  Complex inverse(Complex w) const;

 private:
  Complex center_;
};

}  // namespace blochlab::core
