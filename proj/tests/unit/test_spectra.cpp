#include <cmath>
#include <numbers>

#include "doctest.h"

#include "blochlab/bloch/functions.hpp"
#include "blochlab/core/errors.hpp"
#include "blochlab/core/hyperbolic.hpp"
#include "blochlab/core/quadrature.hpp"
#include "blochlab/spectra/spectra.hpp"

using namespace blochlab;
using namespace blochlab::spectra;
using core::Complex;
using core::HyperbolicPoint;

namespace {

const double kInvLog2 = 1.0 / std::log(2.0);

// (1/2pi) int |sum z^(2^k)|^2 dt = sum r^(2 * 2^k).
double lacunary_circle_oracle(double r, int K) {
  double s = 0.0;
  for (int k = 0; k <= K; ++k) s += std::pow(r, 2.0 * std::ldexp(1.0, k));
  return s / std::fabs(std::log1p(-r));
}

// Each term contributes int_h^1 c^2 y e^{-c y} dy with c = 4 pi 2^k.
double lacunary_strip_oracle(double h, int K) {
  double s = 0.0;
  for (int k = 0; k <= K; ++k) {
    const double c = 4.0 * std::numbers::pi * std::ldexp(1.0, k);
    s += (1.0 + c * h) * std::exp(-c * h) - (1.0 + c) * std::exp(-c);
  }
  return s / std::fabs(std::log(h));
}

BlochFunction identity() { return bloch::polynomial({0.0, 1.0}); }

}  // namespace

TEST_CASE("circle variance") {
  const auto zero = variance_circle(bloch::polynomial({0.0}), {0.5, 0.9, 0.99});
  for (double s : zero.steps) CHECK(s == 0.0);
  const auto id = variance_circle(identity(), {0.5, 0.9, 0.999});
  for (std::size_t i = 0; i < id.steps.size(); ++i) {
    const double r = id.parameters[i];
    CHECK(id.steps[i] == doctest::Approx(r * r / std::fabs(std::log1p(-r))).epsilon(1e-12));
  }
  CHECK(id.value == id.steps.back());
  CHECK(id.steps.back() < id.steps.front());

  const double r = 1.0 - 1e-8;
  const auto lac = variance_circle(bloch::lacunary(2, 40), {0.99, r});
  CHECK(lac.converged);
  // Repeated squaring loses about 2^k ulps on the k-th term near the circle.
  CHECK(lac.value == doctest::Approx(lacunary_circle_oracle(r, 40)).epsilon(1e-7));
  CHECK(std::fabs(lac.value - kInvLog2) / kInvLog2 < 0.08);
  for (double x : lac.integrals) CHECK(x >= 0.0);

  CHECK_THROWS_AS(variance_circle(identity(), {}), DomainError);
  CHECK_THROWS_AS(variance_circle(identity(), {0.5, 1.0}), DomainError);
  CHECK_THROWS_AS(variance_circle(identity(), {0.9, 0.5}), DomainError);
  CHECK_THROWS_AS(variance_circle(bloch::logz(), {0.5}), DomainError);
}

TEST_CASE("variance scales quadratically") {
  const auto b = bloch::make_special(0.3);
  const std::vector<double> rs{0.5, 0.9, 0.99};
  const auto v = variance_circle(b, rs);
  const auto v2 = variance_circle(core::scaled(b, 2.0), rs);
  const auto v3 = variance_circle(core::scaled(b, 0.3), rs);
  for (std::size_t i = 0; i < rs.size(); ++i) {
    CHECK(v2.steps[i] == 4.0 * v.steps[i]);
    CHECK(v3.steps[i] == doctest::Approx(0.09 * v.steps[i]).epsilon(1e-12));
  }
}

TEST_CASE("strip variance") {
  const auto c = variance_strip(bloch::conjugate_exponential(bloch::polynomial({1.5})), 1e-3);
  CHECK(c.value == 0.0);
  const BlochFunction w([](Complex z) { return z; }, [](Complex) { return Complex(1.0); }, core::Domain::half_plane);
  const double h = 1e-4;
  const auto s = variance_strip(w, h);
  CHECK(s.value == doctest::Approx((2.0 - 2.0 * h * h) / std::fabs(std::log(h))).epsilon(1e-10));
  CHECK(s.value == doctest::Approx(0.217147).epsilon(1e-6));

  const auto lac = bloch::conjugate_exponential(bloch::lacunary(2, 40));
  const auto v = variance_strip(lac, std::vector<double>{1e-3, 1e-6});
  CHECK(v.converged);
  CHECK(v.steps[0] == doctest::Approx(lacunary_strip_oracle(1e-3, 40)).epsilon(1e-8));
  CHECK(v.steps[1] == doctest::Approx(lacunary_strip_oracle(1e-6, 40)).epsilon(1e-8));
  CHECK_THROWS_AS(variance_strip(lac, 1.0), DomainError);
  CHECK_THROWS_AS(variance_strip(lac, std::vector<double>{1e-6, 1e-3}), DomainError);
}

TEST_CASE("circle and strip agree at matched depth") {
  const double d = 1e-8;
  const auto lac = bloch::lacunary(2, 40);
  const double circle = variance_circle(lac, {1.0 - d}).value;
  const double strip = variance_strip(bloch::conjugate_exponential(lac), d).value;
  CHECK(std::fabs(strip - circle) / circle < 0.10);

  const auto sp = bloch::make_special(0.3);
  const double c2 = variance_circle(sp, {1.0 - 1e-4}).value;
  const double s2 = variance_strip(bloch::conjugate_exponential(sp), 1e-4).value;
  CHECK(std::fabs(s2 - c2) / c2 < 0.10);
}

TEST_CASE("integral means") {
  const auto lac = bloch::lacunary(2, 40);
  const double r = 1.0 - 1e-6;
  CHECK(integral_means_run(lac, 0.0, {r}, true).value == 0.0);
  const double offset = std::log(2 * std::numbers::pi * r) / std::fabs(std::log1p(-r));
  CHECK(integral_means(lac, 0.0, {r}) == doctest::Approx(offset).epsilon(1e-12));
  CHECK(integral_means(bloch::polynomial({0.0}), 1.0, {r}) == doctest::Approx(offset).epsilon(1e-12));
  CHECK(offset < 0.14);

  // int |1 - z|^-2 |dz| = 2 pi r / (1 - r^2) exactly.
  QuadratureOptions opt;
  opt.rel_tol = 1e-6;
  const auto m = integral_means_run(bloch::logmap(), 2.0, {r}, false, opt);
  CHECK(m.converged);
  const double exact = std::log(2 * std::numbers::pi * r / (1 - r * r)) / std::fabs(std::log1p(-r));
  CHECK(m.value == doctest::Approx(exact).epsilon(1e-6));
  CHECK(std::fabs(m.value - 1.0) < 0.1);
}

TEST_CASE("small-tau means track the variance") {
  const auto lac = bloch::lacunary(2, 40);
  const double r = 1.0 - 1e-8;
  const double sigma2 = variance_circle(lac, {r}).value;
  const double beta = integral_means_run(lac, 0.1, {r}, true).value;
  const double ratio = beta * 4.0 / 0.01 / sigma2;
  CHECK(ratio > 0.5);
  CHECK(ratio < 2.0);
}

TEST_CASE("lil statistic") {
  const double r = 1.0 - 1e-6;
  CHECK(lil_statistic(bloch::polynomial({0.0}), 0.3, r) == 0.0);
  const double L = -std::log1p(-r);
  CHECK(lil_statistic(bloch::polynomial({2.0}), 0.3, r) ==
        doctest::Approx(2.0 / std::sqrt(L * std::log(std::log(L)))).epsilon(1e-14));
  const auto b = bloch::make_special(0.4);
  CHECK(lil_statistic(core::scaled(b, 2.0), 1.1, r) == 2.0 * lil_statistic(b, 1.1, r));
  CHECK_THROWS_AS(lil_statistic(b, 0.0, 0.9), DomainError);
}

TEST_CASE("ball averages") {
  const double R = core::hyperbolic_radius(0.4);
  const auto origin = HyperbolicPoint::disk(0.0);
  CHECK(alpha_average(bloch::polynomial({5.0}), origin, R) == 0.0);
  CHECK(alpha_average(identity(), origin, R) == doctest::Approx(0.84).epsilon(1e-12));

  // Parseval: the average at 0 is (1 - r^2) sum |q_k|^2 r^(2k) / (k + 1).
  const auto q = bloch::special_coefficients(0.3, 200);
  double oracle = 0.0;
  for (int k = 0; k <= 200; ++k) oracle += std::norm(q[k]) * std::pow(0.16, k) / (k + 1);
  oracle *= 0.84;
  const double avg = alpha_average(bloch::make_special(0.3), origin, R);
  CHECK(avg == doctest::Approx(oracle).epsilon(1e-9));
  CHECK(avg >= 0.0);
  CHECK(avg <= 0.8998);

  CHECK_THROWS_AS(alpha_average(identity(), origin, 0.0), DomainError);
  CHECK_THROWS_AS(alpha_average(identity(), HyperbolicPoint::half_plane({0, 1}), 1.0), DomainError);
}

TEST_CASE("half-plane ball average against direct quadrature") {
  // B_hyp(i, R) is the Euclidean disk with center i cosh R and radius sinh R.
  const double R = 1.3;
  const double yc = std::cosh(R);
  const double rad = std::sinh(R);
  auto ring = [&](double t) {
    return t * core::periodic_trapezoid(
                   [&](double th) {
                     const Complex z = Complex(0.0, yc) + std::polar(t, th);
                     return 4.0 / std::norm(z);  // (2y/|z|)^2 / y^2
                   },
                   2 * std::numbers::pi)
                   .value;
  };
  const double total = core::integrate_adaptive(ring, 0.0, rad).value;
  const double area = 4.0 * std::numbers::pi * std::pow(std::sinh(R / 2), 2);
  const double got = alpha_average(bloch::logz(), HyperbolicPoint::half_plane({0.0, 1.0}), R);
  CHECK(got == doctest::Approx(total / area).epsilon(1e-8));
  CHECK(got <= 4.0);
}

TEST_CASE("ball averages stay below the squared sup quotient") {
  const double R = 1.5;
  for (const auto& b : {bloch::make_special(0.2), bloch::make_special(0.7), bloch::logmap(),
                        bloch::polynomial({0.0, 0.3, -0.2, 0.1})}) {
    const double sup = bloch::bloch_norm_estimate(b, 4000);
    for (Complex c : {Complex(0.0), Complex(0.5, 0.2), Complex(-0.1, 0.8)}) {
      CHECK(alpha_average(b, HyperbolicPoint::disk(c), R) <= sup * sup + 1e-6);
    }
  }
}

TEST_CASE("alpha search") {
  const double R = core::hyperbolic_radius(0.4);
  const auto a = alpha_sup_search(R, 24, 42);
  CHECK(a.value >= 0.84);
  CHECK(a.value <= 0.8998);
  CHECK(a.candidates.size() == 24);
  CHECK(alpha_sup_estimate(R, 24, 42) == a.value);
  CHECK(alpha_sup_estimate(R, 1, 7) == doctest::Approx(0.84).epsilon(1e-12));
  CHECK_THROWS_AS(alpha_sup_estimate(R, 0, 1), DomainError);
}

TEST_CASE("small quotient balls") {
  const auto z = small_quotient_ball_search(identity(), HyperbolicPoint::disk(0.0), 2.0);
  REQUIRE(z.found);
  CHECK(1.0 - std::norm(z.zeta) < 0.5);
  CHECK(z.S > 0.0);
  CHECK(z.max_quotient < 0.5);

  const auto sp = bloch::make_special(0.3);
  const auto w = small_quotient_ball_search(sp, HyperbolicPoint::disk(0.0), 1.0);
  REQUIRE(w.found);
  CHECK(core::bloch_quotient(sp, w.zeta) < 0.5);
  CHECK(core::distance_disk(w.zeta, -0.3) < 0.5);

  const auto c = small_quotient_ball_search(bloch::polynomial({1.0}), HyperbolicPoint::disk(0.2), 1.5);
  REQUIRE(c.found);
  CHECK(std::abs(c.zeta - 0.2) < 1e-15);
  CHECK(c.S == 1.5);

  const auto none = small_quotient_ball_search(identity(), HyperbolicPoint::disk(0.0), 0.5);
  CHECK_FALSE(none.found);
  CHECK(none.message.find("no witness") != std::string::npos);
}

TEST_CASE("serialization") {
  const auto v = variance_circle(identity(), {0.5, 0.75});
  const auto j = to_json(v);
  CHECK(j["method"] == "circle");
  CHECK(j["steps"].size() == 2);
  CHECK(j["value"].get<double>() == v.value);
  const std::string csv = to_csv(v);
  CHECK(csv.rfind("parameter,integral,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}
