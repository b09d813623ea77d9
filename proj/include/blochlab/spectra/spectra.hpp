#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

#include "blochlab/core/bloch_function.hpp"

namespace blochlab::spectra {

using core::BlochFunction;
using core::Complex;
using core::HyperbolicPoint;

enum class Method { circle, strip };
const char* to_string(Method m);

/// Per-step values of a limsup characteristic. `value` is the value at the
/// deepest parameter; nothing is extrapolated.
struct VarianceEstimate {
  double value = 0.0;
  Method method = Method::circle;
  std::vector<double> parameters;  // r (circle) or h (strip)
  std::vector<double> integrals;   // mean of |b|^2 on the circle, or the strip integral
  std::vector<double> steps;       // integral / |log(1 - r)| or / |log h|
  bool converged = true;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  std::size_t max_nodes = std::size_t{1} << 26;
};

/// (1/2pi) int |b(r e^it)|^2 dt / |log(1 - r)| for each r.
VarianceEstimate variance_circle(const BlochFunction& b, const std::vector<double>& rs,
                                 const QuadratureOptions& opt = {});

/// (1/|log h|) int_h^1 int_0^1 |2 y b'(x + iy)|^2 dx dy / y for each h.
VarianceEstimate variance_strip(const BlochFunction& b, const std::vector<double>& hs,
                                const QuadratureOptions& opt = {});
VarianceEstimate variance_strip(const BlochFunction& b, double h, const QuadratureOptions& opt = {});

struct MeansEstimate {
  double value = 0.0;
  std::vector<double> parameters;
  std::vector<double> log_integrals;  // log int_{|z|=r} |e^{tau b}| |dz|
  std::vector<double> steps;
  bool converged = true;
};

/// log int_{|z|=r} |e^{tau b}| |dz| / |log(1 - r)|, evaluated in log space.
/// With `normalized` the arclength measure is replaced by the probability
/// measure dt/2pi, which removes the log(2 pi r) offset.
MeansEstimate integral_means_run(const BlochFunction& b, Complex tau, const std::vector<double>& rs,
                                 bool normalized = false, const QuadratureOptions& opt = {});
double integral_means(const BlochFunction& b, Complex tau, const std::vector<double>& rs);

/// |b(r e^{i theta})| / sqrt(log(1/(1-r)) log log log(1/(1-r))); needs r > 1 - e^{-e}.
double lil_statistic(const BlochFunction& b, double theta, double r);

struct AverageResult {
  double value = 0.0;
  double error = 0.0;
  bool converged = true;
};

/// Mean of |2b'/rho|^2 over the hyperbolic ball B(center, R) against
/// hyperbolic area, computed after moving the center to 0.
AverageResult alpha_average_run(const BlochFunction& b, const HyperbolicPoint& center, double R, double rel_tol = 1e-8);
double alpha_average(const BlochFunction& b, const HyperbolicPoint& center, double R);

struct AlphaCandidate {
  std::string description;
  double norm = 0.0;     // sampled norm before rescaling
  double average = 0.0;  // ball average after rescaling to norm 1
};

struct AlphaSearch {
  double value = 0.0;
  std::vector<AlphaCandidate> candidates;
  std::size_t best = 0;
};

/// Lower bound for alpha(R): best ball average at 0 over a seeded family of
/// unit-ball candidates (the identity, special functions moved by random
/// automorphisms, random polynomial derivatives), each rescaled by its
/// sampled norm.
AlphaSearch alpha_sup_search(double R, int budget, std::uint64_t seed);
double alpha_sup_estimate(double R, int budget, std::uint64_t seed);

struct QuotientBall {
  bool found = false;
  Complex zeta;
  double S = 0.0;
  double max_quotient = 0.0;  // largest sampled quotient in B(zeta, S)
  std::string message;
};

/// Searches B(center, R) for a ball B(zeta, S) on whose samples the Bloch
/// quotient stays below 1/2, maximizing S (S <= R) over a polar grid of
/// candidate centers. `resolution` sets rings and rays per sample set.
QuotientBall small_quotient_ball_search(const BlochFunction& b, const HyperbolicPoint& center, double R,
                                        int resolution = 16);

nlohmann::json to_json(const VarianceEstimate& v);
nlohmann::json to_json(const MeansEstimate& m);
std::string to_csv(const VarianceEstimate& v);
std::string to_csv(const MeansEstimate& m);

}  // namespace blochlab::spectra
