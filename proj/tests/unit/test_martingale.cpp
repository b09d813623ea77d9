#include <cmath>
#include <random>

#include "doctest.h"

#include "blochlab/bloch/functions.hpp"
#include "blochlab/core/errors.hpp"
#include "blochlab/core/quadrature.hpp"
#include "blochlab/martingale/martingale.hpp"
#include "blochlab/transforms/transforms.hpp"

using namespace blochlab;
using namespace blochlab::martingale;
using core::Complex;

namespace {

BlochFunction half_plane_poly(std::vector<Complex> c) {
  auto value = [c](Complex z) {
    Complex acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * z + *it;
    return acc;
  };
  auto derivative = [c](Complex z) {
    Complex acc = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) acc = acc * z + static_cast<double>(k) * c[k];
    return acc;
  };
  return BlochFunction(value, derivative, core::Domain::half_plane, "poly");
}

// Mean of log x over [a, a + w] (the h -> 0 limit for log z on the positive axis).
double mean_log(double a, double w) {
  auto F = [](double x) { return x == 0.0 ? 0.0 : x * std::log(x) - x; };
  return (F(a + w) - F(a)) / w;
}

}  // namespace

TEST_CASE("constant functions give flat trees") {
  const auto c = half_plane_poly({Complex(2.0, -1.0)});
  const auto tree = build_martingale(c, 3, 3, 1e-3);
  for (int k = 0; k <= 3; ++k) {
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(std::pow(3, k)); ++j) {
      CHECK(std::abs(tree.value({k, j}) - Complex(2.0, -1.0)) < 1e-14);
    }
  }
  CHECK(local_variance(tree, {0, 0}) < 1e-28);
  const auto ext = variance_extremes(tree, 2);
  CHECK(ext.m < 1e-28);
  CHECK(ext.M < 1e-28);
}

TEST_CASE("identity function") {
  const double h0 = 1e-4;
  const auto tree = build_martingale(half_plane_poly({0.0, 1.0}), 2, 1, h0);
  CHECK(std::abs(tree.value({0, 0}) - Complex(0.5, h0)) < 1e-14);
  CHECK(std::abs(tree.value({1, 0}) - Complex(0.25, h0)) < 1e-14);
  CHECK(std::abs(tree.value({1, 1}) - Complex(0.75, h0)) < 1e-14);
  CHECK(local_variance(tree, {0, 0}) == doctest::Approx(1.0 / 16).epsilon(1e-13));
  // The drift i h0 / 2 between the two heights exceeds the default check.
  CHECK(tree.flagged_count() == 3);
  CHECK(tree.node({0, 0}).tol == doctest::Approx(h0 / 2));
}

TEST_CASE("linearity and scaling") {
  const auto b1 = half_plane_poly({0.0, 1.0, Complex(0.0, 0.5)});
  const auto b2 = bloch::logz();
  const auto both = core::sum(b1, b2);
  const double h0 = 1e-3;
  const auto t1 = build_martingale(b1, 4, 2, h0);
  const auto t2 = build_martingale(b2, 4, 2, h0);
  const auto t12 = build_martingale(both, 4, 2, h0);
  for (int k = 0; k <= 2; ++k) {
    for (std::int64_t j = 0; j < (k == 0 ? 1 : k == 1 ? 4 : 16); ++j) {
      CHECK(std::abs(t12.value({k, j}) - t1.value({k, j}) - t2.value({k, j})) < 1e-11);
    }
  }
  const Complex c(1.5, -2.0);
  const auto ts = build_martingale(core::scaled(b2, c), 4, 2, h0);
  CHECK(local_variance(ts, {1, 2}) == doctest::Approx(std::norm(c) * local_variance(t2, {1, 2})).epsilon(1e-10));
}

TEST_CASE("martingale property") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const auto poly = half_plane_poly({Complex(u(rng), u(rng)), Complex(u(rng), u(rng)), Complex(u(rng), u(rng)),
                                     Complex(u(rng), u(rng))});
  for (const auto& b : {poly, bloch::logz(), bloch::conjugate_exponential(bloch::make_special(0.3))}) {
    for (int n : {2, 3, 5}) {
      const auto tree = build_martingale(b, n, 3, 1e-6);
      for (int k = 0; k < 3; ++k) {
        for (std::int64_t j = 0; j < static_cast<std::int64_t>(std::pow(n, k)); ++j) {
          Complex mean = 0.0;
          for (int c = 0; c < n; ++c) mean += tree.value({k + 1, j * n + c});
          CHECK(std::abs(mean / static_cast<double>(n) - tree.value({k, j})) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("logarithm averages approach the boundary means") {
  const auto tree = build_martingale(bloch::logz(), 4, 2, 1e-9);
  for (int k = 0; k <= 2; ++k) {
    const double w = std::pow(4.0, -k);
    for (std::int64_t j = 0; j < static_cast<std::int64_t>(std::pow(4, k)); ++j) {
      CHECK(std::abs(tree.value({k, j}).real() - mean_log(j * w, w)) < 1e-7);
      CHECK(tree.node({k, j}).tol < 1e-6);
    }
  }
}

TEST_CASE("Richardson check flags coarse heights") {
  const auto coarse = build_martingale(bloch::logz(), 2, 2, 0.2);
  CHECK(coarse.flagged_count() > 0);
  CHECK(coarse.node({0, 0}).tol > 1e-3);
  const auto fine = build_martingale(half_plane_poly({0.0, 1.0}), 2, 2, 1e-8);
  CHECK(fine.flagged_count() == 0);
}

TEST_CASE("extremes") {
  const auto tree = build_martingale(bloch::logz(), 2, 4, 1e-7);
  for (int level = 0; level < 4; ++level) {
    const auto e = variance_extremes(tree, level);
    CHECK(e.m <= e.M);
    CHECK(e.m >= 0.0);
  }
  // log z is dilation invariant: the leftmost interval at every level has the same variance.
  const double v0 = local_variance(tree, {0, 0});
  for (int level = 1; level < 4; ++level) CHECK(local_variance(tree, {level, 0}) == doctest::Approx(v0).epsilon(1e-5));
  CHECK(variance_extremes(tree, 3).M == doctest::Approx(v0 / std::log(2.0)).epsilon(1e-5));
}

TEST_CASE("periodized coefficients pinch the extremes") {
  // A function with period 1/n^2 looks the same on every level-2 interval.
  for (int n : {2, 4}) {
    const double p = 1.0 / (n * n);
    const double k = 2 * 3.141592653589793 / p;
    auto value = [k](Complex z) { return std::exp(Complex(0.0, k) * z) / k; };
    auto derivative = [k](Complex z) { return Complex(0.0, 1.0) * std::exp(Complex(0.0, k) * z); };
    const BlochFunction b(value, derivative, core::Domain::half_plane, "wave");
    const auto tree = build_martingale(b, n, 3, 1e-7);
    const auto e = variance_extremes(tree, 2);
    CHECK(e.M - e.m < 1e-9 * std::max(1.0, e.M));
  }
}

TEST_CASE("variance stays within the loose bound") {
  // Unit-norm test function: sup quotient 1.
  const auto b = bloch::conjugate_exponential(bloch::make_special(0.3));
  for (int n : {2, 4, 16}) {
    const auto tree = build_martingale(b, n, 2, 1e-6);
    const double logn = std::log(static_cast<double>(n));
    for (std::int64_t j = 0; j < n; ++j) CHECK(local_variance(tree, {1, j}) <= logn + 4.0 * std::sqrt(logn));
  }
}

TEST_CASE("box comparison") {
  CHECK(compare_box_variance(half_plane_poly({3.0}), 2, {0, 0}, 1e-6) == 0.0);
  const auto lz = bloch::logz();
  const double d = compare_box_variance(lz, 4, {0, 0}, 1e-9);
  CHECK(compare_box_variance(core::plus_constant(lz, Complex(5.0, -2.0)), 4, {0, 0}, 1e-9) ==
        doctest::Approx(d).epsilon(1e-7));

  // Independent pieces: closed-form boundary means and a 1-D form of the box average.
  for (int n : {2, 4, 16, 256}) {
    const double parent = mean_log(0.0, 1.0);
    double var = 0.0;
    for (int c = 0; c < n; ++c) {
      const double child = mean_log(static_cast<double>(c) / n, 1.0 / n);
      var += (child - parent) * (child - parent);
    }
    var /= n;
    // int_0^1 |2y/w|^2 dx = 4 y atan(1/y); weighted by dy/y and normalized by log n.
    const double box = 4.0 *
                       core::integrate_adaptive([](double y) { return std::atan(1.0 / y); }, 1.0 / n, 1.0).value /
                       std::log(static_cast<double>(n));
    const double oracle = std::fabs(var / std::log(static_cast<double>(n)) - box);
    CHECK(compare_box_variance(lz, n, {0, 0}, 1e-9) == doctest::Approx(oracle).epsilon(1e-5));
  }

  double prev = INFINITY;
  for (int n : {2, 4, 16, 256}) {
    const double g = compare_box_variance(lz, n, {0, 0}, 1e-9);
    CHECK(g < prev);
    prev = g;
    CHECK(g * std::sqrt(std::log(static_cast<double>(n))) < 2.5);
  }
}

TEST_CASE("json round trip") {
  const auto tree = build_martingale(bloch::logz(), 3, 2, 1e-3);
  const auto j = tree.to_json();
  CHECK(j.at("nodes").size() == 13);
  CHECK(j.at("nodes")[0].size() == 5);
  const auto back = MartingaleTree::from_json(nlohmann::json::parse(j.dump()));
  CHECK(back.to_json() == j);
  CHECK_THROWS_AS(MartingaleTree::from_json(nlohmann::json{{"n", 3}}), DomainError);
}

TEST_CASE("preconditions") {
  const auto lz = bloch::logz();
  CHECK_THROWS_AS(build_martingale(lz, 1, 2, 1e-3), DomainError);
  CHECK_THROWS_AS(build_martingale(lz, 2, 0, 1e-3), DomainError);
  CHECK_THROWS_AS(build_martingale(lz, 2, 3, 0.2), DomainError);
  CHECK_THROWS_AS(build_martingale(lz, 2, 3, 0.0), DomainError);
  CHECK_THROWS_AS(build_martingale(bloch::make_special(0.3), 2, 1, 1e-3), DomainError);
  const auto tree = build_martingale(lz, 2, 2, 1e-3);
  CHECK_THROWS_AS(local_variance(tree, {2, 0}), DomainError);
  CHECK_THROWS_AS(variance_extremes(tree, 2), DomainError);
  CHECK_THROWS_AS(tree.value({1, 2}), DomainError);
}
