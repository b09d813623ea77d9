#include "blochlab/spectra/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "blochlab/bloch/functions.hpp"
#include "blochlab/core/errors.hpp"
#include "blochlab/core/hyperbolic.hpp"
#include "blochlab/core/interval.hpp"
#include "blochlab/core/parallel.hpp"
#include "blochlab/core/quadrature.hpp"

namespace blochlab::spectra {

using core::Domain;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void check_increasing(const std::vector<double>& xs, const char* what) {
  if (xs.empty()) throw DomainError(std::string(what) + " schedule is empty");
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (!(xs[i] > xs[i - 1])) throw DomainError(std::string(what) + " schedule must be strictly increasing");
  }
}

core::PeriodicOptions periodic_options(const QuadratureOptions& opt) {
  core::PeriodicOptions p;
  p.start_nodes = core::kLacunarySafeNodes;
  p.max_nodes = opt.max_nodes;
  p.abs_tol = opt.abs_tol;
  p.rel_tol = opt.rel_tol;
  return p;
}

// Disk function whose ball at 0 is the image of the ball at `center`.
BlochFunction centered(const BlochFunction& b, const HyperbolicPoint& center) {
  if (center.domain() != b.domain()) throw DomainError("center and function live on different domains");
  if (b.domain() == Domain::disk) return core::compose(b, core::DiskAutomorphism(center.z()));
  return core::pull_back_to_disk(b, center.z());
}

Complex map_back(const HyperbolicPoint& center, Complex u) {
  if (center.domain() == Domain::disk) return core::DiskAutomorphism(center.z())(u);
  return core::DiskToHalfPlane(center.z())(u);
}

}  // namespace

const char* to_string(Method m) { return m == Method::circle ? "circle" : "strip"; }

VarianceEstimate variance_circle(const BlochFunction& b, const std::vector<double>& rs, const QuadratureOptions& opt) {
  if (b.domain() != Domain::disk) throw DomainError("variance_circle expects a disk function");
  check_increasing(rs, "radius");
  if (!(rs.front() > 0.0) || !(rs.back() < 1.0)) throw DomainError("radii must lie in (0, 1)");
  VarianceEstimate out;
  out.method = Method::circle;
  const auto popt = periodic_options(opt);
  for (double r : rs) {
    const auto q = core::periodic_trapezoid([&](double t) { return std::norm(b(std::polar(r, t))); }, kTwoPi, popt);
    const double mean = q.value / kTwoPi;
    out.parameters.push_back(r);
    out.integrals.push_back(mean);
    out.steps.push_back(mean / std::fabs(std::log1p(-r)));
    out.converged = out.converged && q.converged;
  }
  out.value = out.steps.back();
  return out;
}

VarianceEstimate variance_strip(const BlochFunction& b, const std::vector<double>& hs, const QuadratureOptions& opt) {
  if (b.domain() != Domain::half_plane) throw DomainError("variance_strip expects a half-plane function");
  for (double h : hs) {
    if (!(h > 0.0 && h < 1.0)) throw DomainError("strip depth h must lie in (0, 1)");
  }
  check_increasing(std::vector<double>(hs.rbegin(), hs.rend()), "depth");

  const auto popt = periodic_options(opt);
  const bool periodic = b.period() && *b.period() == 1.0;
  bool converged = true;
  // Row integral int_0^1 |2 y b'(x + iy)|^2 dx.
  auto row = [&](double y) {
    auto f = [&](double x) { return 4.0 * y * y * std::norm(b.derivative(Complex(x, y))); };
    if (periodic) {
      const auto q = core::periodic_trapezoid(f, 1.0, popt);
      if (!q.converged) converged = false;
      return q.value;
    }
    core::AdaptiveOptions a;
    a.rel_tol = opt.rel_tol;
    a.abs_tol = opt.abs_tol;
    const auto q = core::integrate_adaptive(f, 0.0, 1.0, a);
    if (!q.converged) converged = false;
    return q.value;
  };

  VarianceEstimate out;
  out.method = Method::strip;
  for (double h : hs) {
    // dy/y = ds with y = e^s; unit pieces in s are dyadic-like slabs in y.
    const double s0 = std::log(h);
    std::vector<double> cuts;
    for (double s = -1.0; s > s0; s -= 1.0) cuts.push_back(s);
    core::AdaptiveOptions a;
    a.rel_tol = opt.rel_tol;
    a.abs_tol = opt.abs_tol * std::fabs(s0);
    a.max_intervals = 20000;
    const auto q = core::integrate_adaptive([&](double s) { return row(std::exp(s)); }, s0, 0.0, a, cuts);
    converged = converged && q.converged;
    out.parameters.push_back(h);
    out.integrals.push_back(q.value);
    out.steps.push_back(q.value / std::fabs(s0));
  }
  out.converged = converged;
  out.value = out.steps.back();
  return out;
}

VarianceEstimate variance_strip(const BlochFunction& b, double h, const QuadratureOptions& opt) {
  return variance_strip(b, std::vector<double>{h}, opt);
}

MeansEstimate integral_means_run(const BlochFunction& b, Complex tau, const std::vector<double>& rs, bool normalized,
                                 const QuadratureOptions& opt) {
  if (b.domain() != Domain::disk) throw DomainError("integral_means expects a disk function");
  check_increasing(rs, "radius");
  if (!(rs.front() > 0.0) || !(rs.back() < 1.0)) throw DomainError("radii must lie in (0, 1)");
  MeansEstimate out;
  for (double r : rs) {
    // Each level is summed as exp(shift) * sum exp(v - shift) and the levels
    // are merged in log space.
    auto level = [&](std::size_t n, double offset) {
      std::vector<double> v(n);
      auto body = [&](std::size_t j) {
        const double t = kTwoPi * (static_cast<double>(j) + offset) / static_cast<double>(n);
        v[j] = (tau * b(std::polar(r, t))).real();
      };
      if (n >= 8192) {
        core::parallel_for(n, body);
      } else {
        for (std::size_t j = 0; j < n; ++j) body(j);
      }
      const double shift = *std::max_element(v.begin(), v.end());
      for (double& x : v) x = std::exp(x - shift);
      return std::pair{shift, core::pairwise_sum(std::span<const double>(v))};
    };
    auto merge = [](std::pair<double, double> a, std::pair<double, double> c) {
      const double shift = std::max(a.first, c.first);
      return std::pair{shift, a.second * std::exp(a.first - shift) + c.second * std::exp(c.first - shift)};
    };
    std::size_t n = core::kLacunarySafeNodes;
    auto acc = level(n, 0.0);
    auto log_mean = [&](std::size_t count) {
      return acc.first + std::log(acc.second / static_cast<double>(count));
    };
    double current = log_mean(n);
    bool ok = false;
    while (2 * n <= opt.max_nodes && std::isfinite(current)) {
      acc = merge(acc, level(n, 0.5));
      n *= 2;
      const double next = log_mean(n);
      const double diff = std::fabs(next - current);
      current = next;
      if (diff <= opt.rel_tol + opt.abs_tol) {
        ok = true;
        break;
      }
    }
    const double logI = normalized ? current : current + std::log(kTwoPi * r);
    out.parameters.push_back(r);
    out.log_integrals.push_back(logI);
    out.steps.push_back(logI / std::fabs(std::log1p(-r)));
    out.converged = out.converged && ok && std::isfinite(logI);
  }
  out.value = out.steps.back();
  return out;
}

double integral_means(const BlochFunction& b, Complex tau, const std::vector<double>& rs) {
  return integral_means_run(b, tau, rs).value;
}

double lil_statistic(const BlochFunction& b, double theta, double r) {
  if (b.domain() != Domain::disk) throw DomainError("lil_statistic expects a disk function");
  if (!(r > 0.0 && r < 1.0)) throw DomainError("lil_statistic needs 0 < r < 1");
  const double L = -std::log1p(-r);
  if (!(L > std::numbers::e)) throw DomainError("lil_statistic needs r > 1 - e^-e so that log log log(1/(1-r)) > 0");
  const double lll = std::log(std::log(L));
  return std::abs(b(std::polar(r, theta))) / std::sqrt(L * lll);
}

AverageResult alpha_average_run(const BlochFunction& b, const HyperbolicPoint& center, double R, double rel_tol) {
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("ball radius must be positive");
  const BlochFunction g = centered(b, center);
  const double r = core::euclidean_radius(R);
  if (!(r < 1.0)) throw DomainError("ball radius too large for double precision");
  core::PeriodicOptions popt;
  popt.start_nodes = 64;
  popt.rel_tol = rel_tol;
  popt.abs_tol = 1e-300;
  popt.max_nodes = std::size_t{1} << 20;
  bool converged = true;
  auto ring = [&](double t) {
    if (t == 0.0) return 0.0;
    const auto q = core::periodic_trapezoid([&](double th) { return std::norm(g.derivative(std::polar(t, th))); },
                                            kTwoPi, popt);
    if (!q.converged) converged = false;
    return t * q.value;
  };
  core::AdaptiveOptions a;
  a.rel_tol = rel_tol;
  a.abs_tol = 1e-300;
  const auto q = core::integrate_adaptive(ring, 0.0, r, a);
  // rho^2 |2b'/rho|^2 = 4 |g'|^2 and the ball has area 4 pi r^2 / (1 - r^2).
  const double scale = (1.0 - r * r) / (std::numbers::pi * r * r);
  return {scale * q.value, scale * q.error, converged && q.converged};
}

double alpha_average(const BlochFunction& b, const HyperbolicPoint& center, double R) {
  return alpha_average_run(b, center, R).value;
}

AlphaSearch alpha_sup_search(double R, int budget, std::uint64_t seed) {
  if (budget < 1) throw DomainError("alpha search budget must be >= 1");
  if (!(R > 0.0)) throw DomainError("ball radius must be positive");

  struct Spec {
    std::string description;
    BlochFunction b;
    std::optional<double> exact_norm;
  };
  std::vector<Spec> specs;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto random_automorphism = [&]() {
    const double rad = 0.9 * std::sqrt(unit(rng));
    return core::DiskAutomorphism(std::polar(rad, kTwoPi * unit(rng)), kTwoPi * unit(rng));
  };
  specs.push_back({"z", bloch::polynomial({0.0, 1.0}), 1.0});
  for (int i = 1; i < budget; ++i) {
    const int kind = i % 3;
    if (kind == 1) {
      const double a = unit(rng);
      const auto phi = random_automorphism();
      specs.push_back({"special:" + core::format_endpoint(a) + " o phi", core::compose(bloch::make_special(a), phi), 1.0});
    } else if (kind == 2) {
      const int degree = 1 + static_cast<int>(unit(rng) * 4.0);
      std::vector<Complex> c(static_cast<std::size_t>(degree) + 2, 0.0);
      std::string d = "poly-derivative:";
      for (int k = 0; k <= degree; ++k) {
        const Complex ck(normal(rng), normal(rng));
        c[static_cast<std::size_t>(k) + 1] = ck / static_cast<double>(k + 1);
        d += (k ? "," : "") + core::format_endpoint(std::abs(ck));
      }
      specs.push_back({d, bloch::polynomial(std::move(c)), std::nullopt});
    } else {
      const double a = unit(rng);
      const double t = unit(rng);
      const auto phi = random_automorphism();
      auto mix = core::sum(core::scaled(core::compose(bloch::make_special(a), phi), t),
                           core::scaled(bloch::polynomial({0.0, 1.0}), 1.0 - t));
      specs.push_back({"convex:" + core::format_endpoint(t), mix, std::nullopt});
    }
  }

  AlphaSearch out;
  out.candidates.resize(specs.size());
  const HyperbolicPoint origin = HyperbolicPoint::disk(0.0);
  core::parallel_for(specs.size(), [&](std::size_t i) {
    const Spec& s = specs[i];
    const double sampled = bloch::bloch_norm_estimate(s.b, 2000);
    const double norm = s.exact_norm ? std::max(*s.exact_norm, sampled) : sampled;
    const double avg = norm > 0.0 ? alpha_average_run(s.b, origin, R, 1e-8).value / (norm * norm) : 0.0;
    out.candidates[i] = {s.description, sampled, avg};
  });
  for (std::size_t i = 0; i < out.candidates.size(); ++i) {
    if (out.candidates[i].average > out.value) {
      out.value = out.candidates[i].average;
      out.best = i;
    }
  }
  return out;
}

double alpha_sup_estimate(double R, int budget, std::uint64_t seed) { return alpha_sup_search(R, budget, seed).value; }

QuotientBall small_quotient_ball_search(const BlochFunction& b, const HyperbolicPoint& center, double R,
                                        int resolution) {
  if (!(R > 0.0) || !std::isfinite(R)) throw DomainError("ball radius must be positive");
  if (resolution < 2) throw DomainError("resolution must be >= 2");
  const BlochFunction g = centered(b, center);
  const int rays = 2 * resolution;
  const int s_steps = 2 * resolution;

  std::vector<Complex> candidates{0.0};
  for (int m = 1; m <= resolution; ++m) {
    const double rad = core::euclidean_radius(R * m / resolution);
    for (int j = 0; j < rays; ++j) candidates.push_back(std::polar(rad, kTwoPi * (j + 0.5 * (m % 2)) / rays));
  }

  struct Found {
    int steps = -1;
    double worst = 0.0;
  };
  std::vector<Found> found(candidates.size());
  core::parallel_for(candidates.size(), [&](std::size_t i) {
    const Complex u = candidates[i];
    double worst = core::bloch_quotient(g, u);
    if (!(worst < 0.5)) return;
    const core::DiskAutomorphism psi(u);
    int k = 0;
    for (; k < s_steps; ++k) {
      const double rad = core::euclidean_radius(R * (k + 1) / s_steps);
      double ring_max = 0.0;
      for (int j = 0; j < rays; ++j) ring_max = std::max(ring_max, core::bloch_quotient(g, psi(std::polar(rad, kTwoPi * j / rays))));
      if (!(ring_max < 0.5)) break;
      worst = std::max(worst, ring_max);
    }
    found[i] = {k, worst};
  });

  QuotientBall out;
  std::size_t best = candidates.size();
  for (std::size_t i = 0; i < found.size(); ++i) {
    if (found[i].steps > 0 && (best == candidates.size() || found[i].steps > found[best].steps)) best = i;
  }
  if (best == candidates.size()) {
    out.message = "no witness at resolution " + std::to_string(resolution);
    return out;
  }
  out.found = true;
  out.zeta = map_back(center, candidates[best]);
  out.S = R * found[best].steps / s_steps;
  out.max_quotient = found[best].worst;
  out.message = "witness found";
  return out;
}

nlohmann::json to_json(const VarianceEstimate& v) {
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t i = 0; i < v.steps.size(); ++i) {
    steps.push_back({{"parameter", v.parameters[i]}, {"integral", v.integrals[i]}, {"value", v.steps[i]}});
  }
  return {{"kind", "variance"}, {"method", to_string(v.method)}, {"value", v.value},
          {"converged", v.converged}, {"steps", steps}};
}

nlohmann::json to_json(const MeansEstimate& m) {
  nlohmann::json steps = nlohmann::json::array();
  for (std::size_t i = 0; i < m.steps.size(); ++i) {
    steps.push_back({{"parameter", m.parameters[i]}, {"log_integral", m.log_integrals[i]}, {"value", m.steps[i]}});
  }
  return {{"kind", "integral_means"}, {"value", m.value}, {"converged", m.converged}, {"steps", steps}};
}

namespace {

std::string csv(const std::vector<double>& p, const std::vector<double>& x, const std::vector<double>& y,
                const char* header) {
  std::ostringstream os;
  os << header << "\n";
  for (std::size_t i = 0; i < p.size(); ++i) {
    os << core::format_endpoint(p[i]) << "," << core::format_endpoint(x[i]) << "," << core::format_endpoint(y[i])
       << "\n";
  }
  return os.str();
}

}  // namespace

std::string to_csv(const VarianceEstimate& v) {
  return csv(v.parameters, v.integrals, v.steps, "parameter,integral,value");
}

std::string to_csv(const MeansEstimate& m) {
  return csv(m.parameters, m.log_integrals, m.steps, "parameter,log_integral,value");
}

}  // namespace blochlab::spectra
