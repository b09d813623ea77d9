#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "blochlab/core/bloch_function.hpp"

namespace blochlab::bloch {

using core::BlochFunction;
using core::Complex;

/// b_a(z) = (3/4) sqrt(3) ((z + a)/(1 + a z))^2, a in [0, 1).
/// Carries the closed-form derivative coefficients q_0..q_31 and declared norm 1.
BlochFunction make_special(double a);

/// Closed-form Taylor coefficients q_0..q_K of b_a'.
std::vector<Complex> special_coefficients(double a, int K);
double special_q0(double a);
double special_q1(double a);

/// (k+2)/2 * ((k+2)/k)^(k/2): the bound on |q_k| for unit-norm b, k >= 1.
double cauchy_bound(int k);

struct DerivativeSeries {
  std::vector<Complex> q;  // q[k] is the z^k coefficient of b'
  int order = 0;           // truncation order K
  double radius = 0.0;
  std::size_t nodes = 0;   // contour nodes used by the final pass
};

/// Taylor coefficients of b' at 0 by the trapezoidal rule on |z| = radius.
/// Starts from max(8K, 16) nodes and doubles until two passes agree to 1e-12.
DerivativeSeries derivative_coefficients(const BlochFunction& b, int K, double radius);

/// Gap series sum_{k=0}^{K} z^(base^k). Throws DomainError when base^K
/// does not fit in 62 bits.
BlochFunction lacunary(int base, int K = 40);

/// b(z) = sum c_k z^k on the disk.
BlochFunction polynomial(std::vector<Complex> coefficients);

/// b(z) = log(1/(1 - z)) on the disk.
BlochFunction logmap();

/// b(z) = log z on the upper half-plane.
BlochFunction logz();

/// w -> b(exp(2 pi i w)) on the upper half-plane; period 1.
BlochFunction conjugate_exponential(const BlochFunction& b);

struct NormEstimate {
  double value = 0.0;  // largest quotient found; a lower bound for the norm
  Complex argmax;
  std::size_t evaluations = 0;
};

/// Largest Bloch quotient over shells of equal hyperbolic spacing (out to
/// |z| = 1 - 1e-6 in the disk model) followed by local pattern search around
/// the best samples. Half-plane functions are pulled back to the disk at i.
NormEstimate bloch_norm_search(const BlochFunction& b, int samples);
double bloch_norm_estimate(const BlochFunction& b, int samples);

/// Mini-language: `special:<a>`, `lacunary:<base>[,<K>]`,
/// `poly:<c0>,<c1>,...`, `logmap`, `logz`, and `exp(<spec>)` for the
/// exponential conjugate of a disk spec. Throws ParseError with the offset
/// of the offending character.
BlochFunction parse_function_spec(std::string_view spec);

}  // namespace blochlab::bloch
