#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <span>
#include <vector>

#include "blochlab/core/parallel.hpp"

namespace blochlab::core {

template <class T>
struct QuadResult {
  T value{};
  double error = 0.0;      // estimated absolute error
  bool converged = false;
  std::size_t evaluations = 0;
};

inline double magnitude(double x) { return std::fabs(x); }
inline double magnitude(std::complex<double> x) { return std::abs(x); }

/// Gauss-Legendre nodes and weights on [-1, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Cached n-point rule (n >= 1); safe to call from several threads.
const GaussRule& gauss_legendre(int n);

/// n-point Gauss-Legendre on [a, b].
template <class F>
auto gauss_integrate(F&& f, double a, double b, int n) -> decltype(f(a)) {
  using T = decltype(f(a));
  const GaussRule& rule = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double center = 0.5 * (a + b);
  T acc{};
  for (int i = 0; i < n; ++i) acc += rule.weights[i] * f(center + half * rule.nodes[i]);
  return acc * half;
}

namespace detail {

struct Gk15 {
  // Nonnegative Kronrod abscissae, descending from 1; odd indices are Gauss points.
  static const double* abscissae();
  static const double* kronrod_weights();
  static const double* gauss_weights();  // for abscissae 1, 3, 5 and the center
};

template <class F>
auto gk15(F& f, double a, double b, double& error) -> decltype(f(a)) {
  using T = decltype(f(a));
  const double* x = Gk15::abscissae();
  const double* wk = Gk15::kronrod_weights();
  const double* wg = Gk15::gauss_weights();
  const double half = 0.5 * (b - a);
  const double center = 0.5 * (a + b);
  const T fc = f(center);
  T kronrod = wk[7] * fc;
  T gauss = wg[3] * fc;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * x[i];
    const T pair = f(center - dx) + f(center + dx);
    kronrod += wk[i] * pair;
    if (i % 2 == 1) gauss += wg[i / 2] * pair;
  }
  error = magnitude((kronrod - gauss) * half);
  return kronrod * half;
}

}  // namespace detail

struct AdaptiveOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_intervals = 4000;
};

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b]. Optional interior
/// breakpoints (kinks, discontinuities, near-singularities) start the
/// subdivision. The interval with the largest error estimate is bisected
/// until the total estimate meets max(abs_tol, rel_tol |I|).
template <class F>
auto integrate_adaptive(F&& f, double a, double b, const AdaptiveOptions& opt = {},
                        std::span<const double> breakpoints = {}) -> QuadResult<decltype(f(a))> {
  using T = decltype(f(a));
  struct Piece {
    double a, b;
    T value;
    double error;
    std::size_t order;
  };
  auto worse = [](const Piece& p, const Piece& q) {
    return p.error < q.error || (p.error == q.error && p.order > q.order);
  };
  std::priority_queue<Piece, std::vector<Piece>, decltype(worse)> heap(worse);
  std::vector<double> cuts{a};
  for (double c : breakpoints) {
    if (c > a && c < b) cuts.push_back(c);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  QuadResult<T> out;
  std::size_t order = 0;
  T total{};
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    double err = 0.0;
    const T v = detail::gk15(f, cuts[i], cuts[i + 1], err);
    out.evaluations += 15;
    heap.push({cuts[i], cuts[i + 1], v, err, order++});
    total += v;
    total_error += err;
  }
  int intervals = static_cast<int>(heap.size());
  while (total_error > std::max(opt.abs_tol, opt.rel_tol * magnitude(total)) && intervals < opt.max_intervals) {
    Piece worst = heap.top();
    if (worst.b - worst.a <= 1e-14 * std::max(1.0, std::fabs(worst.a))) break;
    heap.pop();
    const double m = 0.5 * (worst.a + worst.b);
    double e1 = 0.0;
    double e2 = 0.0;
    const T v1 = detail::gk15(f, worst.a, m, e1);
    const T v2 = detail::gk15(f, m, worst.b, e2);
    out.evaluations += 30;
    heap.push({worst.a, m, v1, e1, order++});
    heap.push({m, worst.b, v2, e2, order++});
    ++intervals;
    total += v1 + v2 - worst.value;
    total_error += e1 + e2 - worst.error;
  }
  // Final sum in left-to-right order.
  std::vector<Piece> pieces;
  pieces.reserve(heap.size());
  while (!heap.empty()) {
    pieces.push_back(heap.top());
    heap.pop();
  }
  std::sort(pieces.begin(), pieces.end(), [](const Piece& p, const Piece& q) { return p.a < q.a; });
  std::vector<T> values;
  values.reserve(pieces.size());
  double err = 0.0;
  for (const auto& p : pieces) {
    values.push_back(p.value);
    err += p.error;
  }
  out.value = pairwise_sum(std::span<const T>(values));
  out.error = err;
  out.converged = err <= std::max(opt.abs_tol, opt.rel_tol * magnitude(out.value));
  return out;
}

struct PeriodicOptions {
  std::size_t start_nodes = 64;
  std::size_t max_nodes = std::size_t{1} << 22;
  double abs_tol = 1e-14;
  double rel_tol = 1e-12;
  int threads = 0;  // 0: default_threads()
};

/// Node count with no short cycles under doubling of dyadic or triadic
/// frequencies: 1061 is prime and both 2 and 3 are primitive roots mod 1061.
/// Trapezoid sums with 1061 * 2^j nodes therefore never alias two distinct
/// terms z^(2^k), z^(2^l) (or powers of 3) onto each other.
inline constexpr std::size_t kLacunarySafeNodes = 1061;

/// Trapezoidal rule over one period [0, period) with node doubling; each
/// level reuses the previous nodes. Stops when two successive levels agree.
template <class F>
auto periodic_trapezoid(F&& f, double period, const PeriodicOptions& opt = {}) -> QuadResult<decltype(f(0.0))> {
  using T = decltype(f(0.0));
  QuadResult<T> out;
  auto batch_mean = [&](std::size_t n, double offset) {
    std::vector<T> vals(n);
    const double h = period / static_cast<double>(n);
    auto body = [&](std::size_t j) { vals[j] = f((static_cast<double>(j) + offset) * h); };
    if (n >= 8192) {
      parallel_for(n, body, opt.threads);
    } else {
      for (std::size_t j = 0; j < n; ++j) body(j);
    }
    out.evaluations += n;
    return pairwise_sum(std::span<const T>(vals)) / static_cast<double>(n);
  };
  std::size_t n = std::max<std::size_t>(opt.start_nodes, 1);
  T mean = batch_mean(n, 0.0);
  for (;;) {
    if (2 * n > opt.max_nodes) {
      out.value = mean * period;
      out.converged = false;
      return out;
    }
    const T mid = batch_mean(n, 0.5);
    const T next = 0.5 * (mean + mid);
    const double diff = magnitude(next - mean) * period;
    n *= 2;
    mean = next;
    out.error = diff;
    if (diff <= std::max(opt.abs_tol, opt.rel_tol * magnitude(next) * period)) {
      out.value = mean * period;
      out.converged = true;
      return out;
    }
  }
}

}  // namespace blochlab::core
